#ifndef MCX_SGRAPH_HPP
#define MCX_SGRAPH_HPP

#include <mcx/chain_slice.hpp>
#include <mcx/operad_util.hpp>

#include <algorithm>
#include <numeric>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

namespace mcx {

/*
 * Simple graph with white (labelled) and black vertices: vertices 0..n-1 are
 * the whites (vertex v carries label v+1), vertices n..n+k-1 the unlabelled
 * blacks. Edges are unordered pairs of distinct vertices, stored as (lo, hi)
 * in sorted list order; the sorted order is the reference orientation. Edges
 * have degree 1, blacks -2. No loops, and multiple edges vanish, as does any
 * graph with a black relabelling that fixes the edge set but induces an odd
 * edge permutation.
 */
struct SGraph {
    int n = 0;
    int k = 0;
    std::vector<std::pair<int, int>> edges;

    auto key() const { return std::tie(n, k, edges); }
    bool operator==(const SGraph& o) const { return key() == o.key(); }
    bool operator<(const SGraph& o) const { return key() < o.key(); }

    int verts() const { return n + k; }
    int arity() const { return n; }
    int blacks() const { return k; }
    int n_edges() const { return (int)edges.size(); }
    int degree() const { return n_edges() - 2 * k; }

    int components() const {
        std::vector<int> par(verts());
        std::iota(par.begin(), par.end(), 0);
        auto find = [&](int v) {
            while (par[v] != v) v = par[v] = par[par[v]];
            return v;
        };
        for (auto [a, b] : edges) par[find(a)] = find(b);
        int c = 0;
        for (int v = 0; v < verts(); ++v) c += find(v) == v;
        return c;
    }
    int loop_order() const { return n_edges() - verts() + components(); }
};

// unnormalized input: edge list order is the orientation
struct RawSGraph {
    int n = 0;
    int k = 0;
    std::vector<std::pair<int, int>> edges;
};

/*
 * Canonical form: the black relabelling whose normalized sorted edge list is
 * lexicographically least. The sign is the parity of the edge reordering;
 * two minimizing relabellings of opposite parity mean an orientation-
 * reversing automorphism, i.e. zero. Multiple edges are zero as well.
 */
inline std::optional<std::pair<SGraph, int>> sgraph_canonicalize(const RawSGraph& g) {
    for (auto [a, b] : g.edges)
        if (a == b) throw std::invalid_argument("sgraph: loops are not allowed");

    std::vector<int> perm(g.k);
    std::iota(perm.begin(), perm.end(), 0);
    bool have = false, zero = false;
    std::vector<std::pair<std::pair<int, int>, int>> best, cur;
    int best_sign = 1;
    do {
        cur.clear();
        for (size_t j = 0; j < g.edges.size(); ++j) {
            auto [a, b] = g.edges[j];
            if (a >= g.n) a = g.n + perm[a - g.n];
            if (b >= g.n) b = g.n + perm[b - g.n];
            cur.push_back({{std::min(a, b), std::max(a, b)}, (int)j});
        }
        std::sort(cur.begin(), cur.end());
        for (size_t j = 0; j + 1 < cur.size(); ++j)
            if (cur[j].first == cur[j + 1].first) return std::nullopt;
        std::vector<int> order;
        for (auto& [e, idx] : cur) order.push_back(idx);
        int sign = perm_parity(order);
        auto cmp = [](const auto& x, const auto& y) { return x.first < y.first; };
        if (!have || std::lexicographical_compare(cur.begin(), cur.end(), best.begin(),
                                                  best.end(), cmp)) {
            best = cur;
            best_sign = sign;
            have = true;
        } else if (std::equal(cur.begin(), cur.end(), best.begin(),
                              [](const auto& x, const auto& y) { return x.first == y.first; })) {
            if (sign != best_sign) zero = true;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    if (zero) return std::nullopt;

    SGraph out;
    out.n = g.n;
    out.k = g.k;
    for (auto& [e, idx] : best) out.edges.push_back(e);
    return std::make_pair(out, best_sign);
}

inline RawSGraph sgraph_raw(const SGraph& g) { return {g.n, g.k, g.edges}; }

// "w1-w2 b-w1 ." notation: edges as endpoint pairs, isolated vertices alone
inline std::string sgraph_to_string(const SGraph& g) {
    auto name = [&](int v) {
        return v < g.n ? "w" + std::to_string(v + 1) : "b" + std::to_string(v - g.n + 1);
    };
    std::string s;
    std::vector<char> seen(g.verts(), 0);
    for (auto [a, b] : g.edges) {
        if (!s.empty()) s += " ";
        s += name(a) + "-" + name(b);
        seen[a] = seen[b] = 1;
    }
    for (int v = 0; v < g.verts(); ++v)
        if (!seen[v]) {
            if (!s.empty()) s += " ";
            s += name(v);
        }
    return s.empty() ? "empty" : s;
}

/*
 * Insertion: replace white vertex i of g1 by g2 and sum over all maps f
 * sending each half-edge at that vertex to a vertex of g2. Orientation:
 * g1's edges in their stored order, then g2's.
 */
inline LinComb<SGraph> sgraph_compose(const SGraph& g1, int i, const SGraph& g2) {
    if (i < 1 || i > g1.n) throw IndexOutOfRange("sgraph_compose: bad input slot");
    int p = i - 1;
    int n = g1.n + g2.n - 1, k = g1.k + g2.k;
    auto map1 = [&](int v) {
        if (v < g1.n) return v < p ? v : v + g2.n - 1; // white, label shift
        return n + (v - g1.n);                         // black of g1
    };
    auto map2 = [&](int v) {
        if (v < g2.n) return v + p; // white of g2, labels shifted by i-1
        return n + g1.k + (v - g2.n);
    };

    std::vector<int> hooks; // indices of g1 edges incident to p
    for (size_t j = 0; j < g1.edges.size(); ++j)
        if (g1.edges[j].first == p || g1.edges[j].second == p) hooks.push_back((int)j);

    LinComb<SGraph> out;
    std::vector<int> f(hooks.size(), 0);
    for (;;) {
        RawSGraph raw;
        raw.n = n;
        raw.k = k;
        size_t h = 0;
        for (size_t j = 0; j < g1.edges.size(); ++j) {
            auto [a, b] = g1.edges[j];
            if (a == p || b == p) {
                int other = map1(a == p ? b : a);
                raw.edges.push_back({other, map2(f[h++])});
            } else {
                raw.edges.push_back({map1(a), map1(b)});
            }
        }
        for (auto [a, b] : g2.edges) raw.edges.push_back({map2(a), map2(b)});
        if (auto c = sgraph_canonicalize(raw)) add_term(out, c->first, Scalar(c->second));

        size_t j = 0;
        while (j < f.size() && ++f[j] == g2.verts()) f[j++] = 0;
        if (j == f.size()) break;
    }
    return out;
}

/*
 * Twisted differential, three families; the new edge comes first in the
 * orientation. Splitting a black vertex into an edge-joined pair of
 * (temporarily distinguished) blacks redistributes its half-edges in all
 * ways with weight -1/2; splitting a white into (white)-(black) likewise
 * with weight -1; hanging a fresh black leaf on any vertex gives +1.
 */
inline LinComb<SGraph> sgraph_twisted_differential(const SGraph& g) {
    LinComb<SGraph> out;
    int B = g.verts(); // the added black, before canonical relabelling

    auto emit = [&](const std::vector<std::pair<int, int>>& old_edges, int v,
                    const Scalar& coeff) {
        RawSGraph raw;
        raw.n = g.n;
        raw.k = g.k + 1;
        raw.edges.push_back({v, B});
        raw.edges.insert(raw.edges.end(), old_edges.begin(), old_edges.end());
        if (auto c = sgraph_canonicalize(raw)) add_term(out, c->first, coeff * c->second);
    };

    for (int v = 0; v < g.verts(); ++v) {
        std::vector<int> hooks;
        for (size_t j = 0; j < g.edges.size(); ++j)
            if (g.edges[j].first == v || g.edges[j].second == v) hooks.push_back((int)j);
        Scalar coeff = v < g.n ? Scalar(-1) : Scalar(-1) / 2;
        for (int mask = 0; mask < (1 << hooks.size()); ++mask) {
            auto edges = g.edges;
            for (size_t h = 0; h < hooks.size(); ++h)
                if (mask >> h & 1) {
                    auto& e = edges[hooks[h]];
                    (e.first == v ? e.first : e.second) = B;
                }
            emit(edges, v, coeff);
        }
        emit(g.edges, v, Scalar(1)); // fresh black leaf on v
    }
    return out;
}

inline LinComb<SGraph> sgraph_compose(const LinComb<SGraph>& a, int i, const LinComb<SGraph>& b) {
    LinComb<SGraph> out;
    for (const auto& [g1, c1] : a)
        for (const auto& [g2, c2] : b) add_scaled(out, sgraph_compose(g1, i, g2), c1 * c2);
    return out;
}

inline LinComb<SGraph> sgraph_twisted_differential(const LinComb<SGraph>& a) {
    LinComb<SGraph> out;
    for (const auto& [g, c] : a) add_scaled(out, sgraph_twisted_differential(g), c);
    return out;
}

// relabelling the whites permutes edge endpoints and hence carries the sign
// of the induced edge reordering
inline LinComb<SGraph> sgraph_relabel(const LinComb<SGraph>& a, const std::vector<int>& s) {
    LinComb<SGraph> out;
    for (const auto& [g, c] : a) {
        RawSGraph raw = sgraph_raw(g);
        for (auto& [x, y] : raw.edges) {
            if (x < g.n) x = s[x] - 1;
            if (y < g.n) y = s[y] - 1;
        }
        if (auto can = sgraph_canonicalize(raw)) add_term(out, can->first, c * can->second);
    }
    return out;
}

// all simple graphs with n whites, k blacks and e edges, up to black
// relabelling, dropping the ones that vanish
inline std::vector<SGraph> enumerate_sgraphs(int n, int k, int e) {
    int m = n + k;
    std::vector<SGraph> out;
    if (m < 0 || e < 0) return out;
    std::vector<std::pair<int, int>> all;
    for (int a = 0; a < m; ++a)
        for (int b = a + 1; b < m; ++b) all.push_back({a, b});
    if (e > (int)all.size()) return out;
    std::vector<int> sel(all.size(), 0);
    std::fill(sel.begin(), sel.begin() + e, 1);
    std::sort(sel.begin(), sel.end());
    do {
        RawSGraph raw;
        raw.n = n;
        raw.k = k;
        for (size_t j = 0; j < all.size(); ++j)
            if (sel[j]) raw.edges.push_back(all[j]);
        if (auto c = sgraph_canonicalize(raw)) out.push_back(c->first);
    } while (std::next_permutation(sel.begin(), sel.end()));
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

/*
 * The (arity, degree) slice is infinite, but fixing the component count c
 * and the loop order b1 pins the black count to k = n - c + b1 - d, hence
 * the edge count e = n + k - c + b1, and the slice is finite.
 */
inline std::vector<SGraph> sgraph_slice_basis(int n, int d, int c, int b1) {
    int k = n - c + b1 - d;
    if (k < 0 || (n == 0 && k == 0)) return {};
    int e = n + k - c + b1;
    auto cell = enumerate_sgraphs(n, k, e);
    cell.erase(std::remove_if(cell.begin(), cell.end(),
                              [&](const SGraph& g) {
                                  return g.components() != c || g.loop_order() != b1;
                              }),
               cell.end());
    return cell;
}

inline HomologyRow sgraph_homology(int n, int d, int c, int b1) {
    auto dfun = [](const SGraph& g) { return sgraph_twisted_differential(g); };
    auto h = homology_dims(
        slice_matrix(sgraph_slice_basis(n, d, c, b1), sgraph_slice_basis(n, d - 1, c, b1), dfun),
        slice_matrix(sgraph_slice_basis(n, d + 1, c, b1), sgraph_slice_basis(n, d, c, b1), dfun));
    HomologyRow r;
    r.complex_id = "Gra";
    r.arity = n;
    r.degree = d;
    r.gradings = {{"components", c}, {"loops", b1}};
    r.dim_chains = h.dim_chains;
    r.betti = h.betti;
    return r;
}

// images of the Gerstenhaber generators: product = two whites and no edge,
// bracket = the single-edge graph
inline SGraph sgraph_mu() { return {2, 0, {}}; }
inline SGraph sgraph_lambda() { return {2, 0, {{0, 1}}}; }

inline LinComb<SGraph> sgraph_twist_element() {
    LinComb<SGraph> lam;
    lam[SGraph{1, 1, {{0, 1}}}] = 1;
    return lam;
}

inline bool sgraph_operadic_mc_check() {
    auto lam = sgraph_twist_element();
    return sgraph_twisted_differential(lam) == sgraph_compose(lam, 1, lam);
}

// the Gerstenhaber relations hold on the nose for the graph images
inline bool sgraph_gerst_relations_check() {
    auto mu = LinComb<SGraph>{{sgraph_mu(), 1}};
    auto lam = LinComb<SGraph>{{sgraph_lambda(), 1}};
    bool ok = true;

    // commutativity and symmetry: relabelling is invisible on both images
    ok = ok && sgraph_relabel(mu, {2, 1}) == mu;
    ok = ok && sgraph_relabel(lam, {2, 1}) == lam;
    // associativity of the product
    ok = ok && sgraph_compose(mu, 1, mu) == sgraph_compose(mu, 2, mu);
    // Jacobi: the cyclic symmetrization of lambda o1 lambda vanishes
    auto sq = sgraph_compose(lam, 1, lam);
    LinComb<SGraph> jac = sq;
    add_scaled(jac, sgraph_relabel(sq, {2, 3, 1}), Scalar(1));
    add_scaled(jac, sgraph_relabel(sq, {3, 1, 2}), Scalar(1));
    ok = ok && jac.empty();
    // Leibniz: [x1, x2 x3] = [x1, x2] x3 + x2 [x1, x3]
    LinComb<SGraph> rhs = sgraph_compose(mu, 1, lam);
    add_scaled(rhs, sgraph_relabel(sgraph_compose(mu, 2, lam), {2, 1, 3}), Scalar(1));
    ok = ok && sgraph_compose(lam, 2, mu) == rhs;
    return ok;
}

} // namespace mcx

#endif
