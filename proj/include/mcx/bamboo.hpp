#ifndef MCX_BAMBOO_HPP
#define MCX_BAMBOO_HPP

#include <mcx/operad_util.hpp>

#include <algorithm>
#include <string>
#include <tuple>
#include <vector>

namespace mcx {

/*
 * Possibly disconnected linear graph ("bamboo"). Vertices are listed left to
 * right; 0 stands for a black vertex, a positive entry is a white input label.
 * White labels always read 1..n from left to right (nonsymmetric operad).
 * edge[s] connects vertices s and s+1. tad[v] marks a tadpole at vertex v
 * (only used by the tadpole complex; plain bamboos keep it all-zero).
 *
 * Degree bookkeeping: every edge and tadpole contributes +1, every black
 * vertex -2. The default orientation lists plain edges left to right first,
 * then tadpoles left to right; all signs below are parities of permutations
 * relative to that order.
 */
struct Bamboo {
    std::vector<int> vert;
    std::vector<char> edge;
    std::vector<char> tad;

    auto key() const { return std::tie(vert, edge, tad); }
    bool operator==(const Bamboo& o) const { return key() == o.key(); }
    bool operator<(const Bamboo& o) const { return key() < o.key(); }

    int arity() const {
        int n = 0;
        for (int v : vert) n += v > 0;
        return n;
    }
    int blacks() const { return (int)vert.size() - arity(); }
    int n_edges() const { return (int)std::count(edge.begin(), edge.end(), 1); }
    int n_tads() const { return (int)std::count(tad.begin(), tad.end(), 1); }
    int degree() const { return n_edges() + n_tads() - 2 * blacks(); }
};

inline Bamboo make_bamboo(std::vector<int> vert, std::vector<int> edge_slots,
                          std::vector<int> tad_verts = {}) {
    Bamboo g;
    g.vert = std::move(vert);
    g.edge.assign(g.vert.empty() ? 0 : g.vert.size() - 1, 0);
    g.tad.assign(g.vert.size(), 0);
    for (int s : edge_slots) g.edge[s] = 1;
    for (int v : tad_verts) g.tad[v] = 1;
    return g;
}

inline void validate_bamboo(const Bamboo& g) {
    if (g.vert.empty()) throw std::invalid_argument("empty bamboo");
    size_t m = g.vert.size();
    if (g.edge.size() != m - 1 || g.tad.size() != m)
        throw std::invalid_argument("bamboo field sizes inconsistent");
    int next = 1;
    for (int v : g.vert)
        if (v > 0 && v != next++)
            throw std::invalid_argument("white labels must read 1..n left to right");
}

// "w1-w2 . b-b" style; "*" marks a tadpole.
inline std::string bamboo_to_string(const Bamboo& g) {
    std::string s;
    for (size_t v = 0; v < g.vert.size(); ++v) {
        if (v > 0) s += g.edge[v - 1] ? "-" : " . ";
        s += g.vert[v] ? "w" + std::to_string(g.vert[v]) : "b";
        if (g.tad[v]) s += "*";
    }
    return s;
}

namespace detail {

// Slot id: plain edge slot s -> s, tadpole at vertex v -> (#edge slots) + v.
inline int tad_slot(const Bamboo& g, int v) { return (int)g.edge.size() + v; }

// Parity of the given slot list against the bamboo's default orientation.
inline int orientation_sign(const Bamboo& g, const std::vector<int>& slots) {
    std::vector<int> rank_of(g.edge.size() + g.tad.size(), -1);
    int r = 0;
    for (size_t s = 0; s < g.edge.size(); ++s)
        if (g.edge[s]) rank_of[s] = r++;
    for (size_t v = 0; v < g.tad.size(); ++v)
        if (g.tad[v]) rank_of[g.edge.size() + v] = r++;
    std::vector<int> perm;
    perm.reserve(slots.size());
    for (int s : slots) perm.push_back(rank_of[s]);
    return perm_parity(perm);
}

// Default-orientation slot list of g mapped through a slot translation.
template <class EdgeMap, class TadMap>
void push_mapped_slots(const Bamboo& g, std::vector<int>& out, EdgeMap em, TadMap tm) {
    for (size_t s = 0; s < g.edge.size(); ++s)
        if (g.edge[s]) out.push_back(em((int)s));
    for (size_t v = 0; v < g.tad.size(); ++v)
        if (g.tad[v]) out.push_back(tm((int)v));
}

} // namespace detail

/*
 * Operadic insertion: place g2 at the white vertex labelled i of g1 and
 * relabel left to right. The boundary edges of the slot survive exactly when
 * g1 had them; a tadpole sitting at the replaced vertex redistributes either
 * as a tadpole on a tadpole-free vertex of the inserted block or as an extra
 * edge between consecutive block vertices not already joined. The sign is the
 * parity of (g1's slots, then g2's slots) against the result's orientation.
 */
inline LinComb<Bamboo> bamboo_compose(const Bamboo& g1, int i, const Bamboo& g2) {
    if (i < 1 || i > g1.arity()) throw IndexOutOfRange("bamboo_compose: bad input slot");
    int p = 0;
    while (g1.vert[p] != i) ++p;
    int k2 = (int)g2.vert.size();

    Bamboo base;
    base.vert.reserve(g1.vert.size() + k2 - 1);
    for (int q = 0; q < p; ++q) base.vert.push_back(g1.vert[q]);
    base.vert.insert(base.vert.end(), g2.vert.begin(), g2.vert.end());
    for (size_t q = p + 1; q < g1.vert.size(); ++q) base.vert.push_back(g1.vert[q]);
    int next = 1;
    for (int& v : base.vert)
        if (v > 0) v = next++;
    base.edge.assign(base.vert.size() - 1, 0);
    base.tad.assign(base.vert.size(), 0);

    auto e1 = [&](int s) { return s < p ? s : s + k2 - 1; };
    auto v1 = [&](int q) { return q < p ? q : q + k2 - 1; };
    auto e2 = [&](int s) { return p + s; };
    auto v2 = [&](int v) { return p + v; };

    for (size_t s = 0; s + 1 < g1.vert.size(); ++s)
        if (g1.edge[s]) base.edge[e1((int)s)] = 1;
    for (size_t s = 0; s + 1 < g2.vert.size(); ++s)
        if (g2.edge[s]) base.edge[e2((int)s)] = 1;
    for (size_t q = 0; q < g1.vert.size(); ++q)
        if (g1.tad[q] && (int)q != p) base.tad[v1((int)q)] = 1;
    for (size_t v = 0; v < g2.vert.size(); ++v)
        if (g2.tad[v]) base.tad[v2((int)v)] = 1;

    // (kind, position): kind 0 keeps the tadpole-at-slot unused, 1 = new
    // tadpole at position, 2 = new edge at slot position.
    std::vector<std::pair<int, int>> variants;
    if (g1.tad[p]) {
        for (int v = p; v < p + k2; ++v)
            if (!base.tad[v]) variants.push_back({1, v});
        for (int s = p; s < p + k2 - 1; ++s)
            if (!base.edge[s]) variants.push_back({2, s});
    } else {
        variants.push_back({0, 0});
    }

    LinComb<Bamboo> out;
    for (auto [kind, pos] : variants) {
        Bamboo r = base;
        int new_slot = -1;
        if (kind == 1) {
            r.tad[pos] = 1;
            new_slot = detail::tad_slot(r, pos);
        } else if (kind == 2) {
            r.edge[pos] = 1;
            new_slot = pos;
        }
        std::vector<int> slots;
        for (size_t s = 0; s < g1.edge.size(); ++s)
            if (g1.edge[s]) slots.push_back(e1((int)s));
        for (size_t v = 0; v < g1.tad.size(); ++v) {
            if (!g1.tad[v]) continue;
            slots.push_back((int)v == p ? new_slot : detail::tad_slot(r, v1((int)v)));
        }
        detail::push_mapped_slots(g2, slots, [&](int s) { return e2(s); },
                                  [&](int v) { return detail::tad_slot(r, v2(v)); });
        add_term(out, r, Scalar(detail::orientation_sign(r, slots)));
    }
    return out;
}

/*
 * Twisted differential: attach a black vertex at the far left / far right
 * with an edge to the end vertex, or replace any vertex by a pair joined by a
 * new edge (black-white, white-black, black-black), distributing a tadpole at
 * the split vertex over the two results. The new edge comes first in the
 * orientation; vertex-replacing terms carry an extra -1. Cancelling pairs are
 * generated in full and erased by the accumulator.
 */
inline LinComb<Bamboo> bamboo_twisted_differential(const Bamboo& g) {
    LinComb<Bamboo> out;
    int m = (int)g.vert.size();

    auto emit = [&](const Bamboo& r, const std::vector<int>& old_slots, int new_slot,
                    int coeff) {
        std::vector<int> slots;
        slots.push_back(new_slot);
        slots.insert(slots.end(), old_slots.begin(), old_slots.end());
        add_term(out, r, Scalar(coeff * detail::orientation_sign(r, slots)));
    };

    { // attach on the left
        Bamboo r = make_bamboo({}, {});
        r.vert.assign(1, 0);
        r.vert.insert(r.vert.end(), g.vert.begin(), g.vert.end());
        r.edge.assign(m, 0);
        r.edge[0] = 1;
        for (int s = 0; s + 1 < m; ++s) r.edge[s + 1] = g.edge[s];
        r.tad.assign(1, 0);
        r.tad.insert(r.tad.end(), g.tad.begin(), g.tad.end());
        std::vector<int> old_slots;
        detail::push_mapped_slots(g, old_slots, [&](int s) { return s + 1; },
                                  [&](int v) { return detail::tad_slot(r, v + 1); });
        emit(r, old_slots, 0, +1);
    }
    { // attach on the right
        Bamboo r = g;
        r.vert.push_back(0);
        r.edge.push_back(1);
        r.tad.push_back(0);
        std::vector<int> old_slots;
        detail::push_mapped_slots(g, old_slots, [](int s) { return s; },
                                  [&](int v) { return detail::tad_slot(r, v); });
        emit(r, old_slots, m - 1, +1);
    }

    // vertex splittings; black_at = q means the new black sits left of the
    // original vertex, q+1 means right of it
    for (int q = 0; q < m; ++q) {
        std::vector<int> black_positions =
            g.vert[q] > 0 ? std::vector<int>{q, q + 1} : std::vector<int>{q};
        for (int bp : black_positions) {
            std::vector<int> tad_targets = g.tad[q] ? std::vector<int>{q, q + 1}
                                                    : std::vector<int>{-1};
            for (int tt : tad_targets) {
                Bamboo r;
                r.vert = g.vert;
                r.vert.insert(r.vert.begin() + bp, 0);
                r.edge.assign(m, 0);
                r.edge[q] = 1;
                for (int s = 0; s + 1 < m; ++s) r.edge[s < q ? s : s + 1] = g.edge[s];
                r.tad.assign(m + 1, 0);
                for (int v = 0; v < m; ++v)
                    if (g.tad[v] && v != q) r.tad[v < q ? v : v + 1] = 1;
                if (tt >= 0) r.tad[tt] = 1;
                std::vector<int> old_slots;
                detail::push_mapped_slots(
                    g, old_slots, [&](int s) { return s < q ? s : s + 1; },
                    [&](int v) {
                        if (v == q) return detail::tad_slot(r, tt);
                        return detail::tad_slot(r, v < q ? v : v + 1);
                    });
                emit(r, old_slots, q, -1);
            }
        }
    }
    return out;
}

// Lifted operations on linear combinations.
inline LinComb<Bamboo> bamboo_compose(const LinComb<Bamboo>& a, int i,
                                      const LinComb<Bamboo>& b) {
    LinComb<Bamboo> out;
    for (const auto& [g1, c1] : a)
        for (const auto& [g2, c2] : b) add_scaled(out, bamboo_compose(g1, i, g2), c1 * c2);
    return out;
}

inline LinComb<Bamboo> bamboo_twisted_differential(const LinComb<Bamboo>& a) {
    LinComb<Bamboo> out;
    for (const auto& [g, c] : a) add_scaled(out, bamboo_twisted_differential(g), c);
    return out;
}

/*
 * Basis of the (n, k, e, t) cell: choose black positions among the n+k
 * vertices, then any edge subset of size e and any tadpole subset of size t.
 */
inline std::vector<Bamboo> enumerate_bamboos(int n, int k, int e, int t) {
    std::vector<Bamboo> out;
    int m = n + k;
    if (m == 0 || e < 0 || t < 0 || e > m - 1 || t > m) return out;
    std::vector<char> black(m, 0);
    std::fill(black.begin(), black.begin() + k, 1);
    std::sort(black.begin(), black.end());
    do {
        std::vector<char> es(std::max(0, m - 1), 0);
        std::fill(es.begin(), es.begin() + e, 1);
        std::sort(es.begin(), es.end());
        do {
            std::vector<char> ts(m, 0);
            std::fill(ts.begin(), ts.begin() + t, 1);
            std::sort(ts.begin(), ts.end());
            do {
                Bamboo g;
                g.tad.assign(ts.begin(), ts.end());
                g.edge.assign(es.begin(), es.end());
                int next = 1;
                for (int v = 0; v < m; ++v) g.vert.push_back(black[v] ? 0 : next++);
                out.push_back(std::move(g));
            } while (std::next_permutation(ts.begin(), ts.end()));
        } while (std::next_permutation(es.begin(), es.end()));
    } while (std::next_permutation(black.begin(), black.end()));
    std::sort(out.begin(), out.end());
    return out;
}

/*
 * Slice machinery. Edges are bounded by #vertices - 1, so a fixed
 * (arity, degree, tadpole count) slice forces e = d + 2k - t <= n + k - 1:
 * the black count is capped by n - 1 + t - d and every slice is finite.
 */
inline int bamboo_black_cap(int n, int d, int t) { return n - 1 + t - d; }

inline std::vector<Bamboo> bamboo_slice_basis(int n, int d, int t) {
    std::vector<Bamboo> out;
    for (int k = 0; k <= bamboo_black_cap(n, d, t); ++k) {
        auto cell = enumerate_bamboos(n, k, d + 2 * k - t, t);
        out.insert(out.end(), cell.begin(), cell.end());
    }
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace mcx

#include <mcx/chain_slice.hpp>

namespace mcx {

inline ChainSlice bamboo_chain_slice(bool tadpoles, int n, int d, int t) {
    if (!tadpoles && t != 0)
        throw std::invalid_argument("plain bamboo complex has no tadpole grading");
    ChainSlice s;
    s.complex_id = tadpoles ? "ncBV" : "ncGerst";
    s.arity = n;
    s.degree = d;
    if (tadpoles) s.gradings = {{"tadpoles", t}};
    auto basis = bamboo_slice_basis(n, d, t);
    auto below = bamboo_slice_basis(n, d - 1, t);
    for (const auto& g : basis) s.basis.push_back(bamboo_to_string(g));
    s.differential_out = slice_matrix(basis, below,
                                      [](const Bamboo& g) { return bamboo_twisted_differential(g); });
    return s;
}

inline HomologyRow bamboo_homology(bool tadpoles, int n, int d, int t) {
    auto dfun = [](const Bamboo& g) { return bamboo_twisted_differential(g); };
    auto mid = bamboo_slice_basis(n, d, t);
    auto low = bamboo_slice_basis(n, d - 1, t);
    auto high = bamboo_slice_basis(n, d + 1, t);
    auto h = homology_dims(slice_matrix(mid, low, dfun), slice_matrix(high, mid, dfun));
    HomologyRow r;
    r.complex_id = tadpoles ? "ncBV" : "ncGerst";
    r.arity = n;
    r.degree = d;
    if (tadpoles) r.gradings = {{"tadpoles", t}};
    r.dim_chains = h.dim_chains;
    r.betti = h.betti;
    return r;
}

// The twist element of the shifted multiplicative structure: the operad map
// sends the binary generator to the two-vertex edge bamboo, so the arity-one
// twisting series collapses to two terms.
inline LinComb<Bamboo> bamboo_twist_element() {
    LinComb<Bamboo> mu;
    mu[make_bamboo({0, 1}, {0})] = 1;
    mu[make_bamboo({1, 0}, {0})] = 1;
    return mu;
}

// Rearranged operadic Maurer-Cartan identity: the twisted differential of the
// twist element must equal its self-composition at the only input.
inline bool bamboo_operadic_mc_check() {
    auto mu = bamboo_twist_element();
    return bamboo_twisted_differential(mu) == bamboo_compose(mu, 1, mu);
}

} // namespace mcx

#endif
