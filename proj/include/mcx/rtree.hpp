#ifndef MCX_RTREE_HPP
#define MCX_RTREE_HPP

#include <mcx/chain_slice.hpp>
#include <mcx/operad_util.hpp>

#include <algorithm>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

namespace mcx {

/*
 * Non-planar rooted tree with white (labelled) and black vertices, stored in
 * canonical form: vertices renumbered in preorder (root first, children in
 * canonical encoding order), so parent[v] < v and parent[0] == -1. Each
 * non-root vertex owns the edge to its parent; the default orientation is the
 * preorder listing of those edges. Edges have degree 1, black vertices -2.
 *
 * A tree with an automorphism swapping two equal sibling branches with an odd
 * number of edges is orientation-reversing, hence zero; canonicalization
 * reports that as "no canonical form".
 */
struct RTree {
    std::vector<int> parent;
    std::vector<int> color; // 0 = black, >0 = white label

    auto key() const { return std::tie(parent, color); }
    bool operator==(const RTree& o) const { return key() == o.key(); }
    bool operator<(const RTree& o) const { return key() < o.key(); }

    int verts() const { return (int)parent.size(); }
    int arity() const {
        int n = 0;
        for (int c : color) n += c > 0;
        return n;
    }
    int blacks() const { return verts() - arity(); }
    int degree() const { return (verts() - 1) - 2 * blacks(); }
};

// Unnormalized input: any vertex numbering plus an explicit edge order given
// as the list of child vertices.
struct RawTree {
    std::vector<int> parent;
    std::vector<int> color;
    std::vector<int> orient;
};

namespace detail {

struct TreeCanon {
    const RawTree& in;
    std::vector<std::vector<int>> kids;
    bool graded = true;
    bool zero = false;

    explicit TreeCanon(const RawTree& t) : in(t), kids(t.parent.size()) {
        for (size_t v = 0; v < t.parent.size(); ++v)
            if (t.parent[v] >= 0) kids[t.parent[v]].push_back((int)v);
    }

    // returns (encoding, preorder vertex list in the original numbering)
    std::pair<std::string, std::vector<int>> run(int v) {
        std::vector<std::pair<std::string, std::vector<int>>> sub;
        for (int c : kids[v]) sub.push_back(run(c));
        std::sort(sub.begin(), sub.end());
        for (size_t i = 0; i + 1 < sub.size(); ++i)
            if (graded && sub[i].first == sub[i + 1].first && sub[i].second.size() % 2 == 1)
                zero = true; // odd branch swap reverses the orientation
        std::string enc = "(" + std::to_string(in.color[v]);
        std::vector<int> pre = {v};
        for (auto& [e, p] : sub) {
            enc += e;
            pre.insert(pre.end(), p.begin(), p.end());
        }
        enc += ")";
        return {enc, pre};
    }
};

} // namespace detail

// (canonical tree, orientation sign), or nothing when the tree vanishes.
// With graded = false the vanishing rule and the sign are switched off
// (ungraded rooted trees).
inline std::optional<std::pair<RTree, int>> rtree_canonicalize(const RawTree& t,
                                                              bool graded = true) {
    int root = -1;
    for (size_t v = 0; v < t.parent.size(); ++v)
        if (t.parent[v] < 0) root = (int)v;
    detail::TreeCanon canon(t);
    canon.graded = graded;
    auto [enc, pre] = canon.run(root);
    if (canon.zero) return std::nullopt;

    std::vector<int> pos(t.parent.size());
    for (size_t i = 0; i < pre.size(); ++i) pos[pre[i]] = (int)i;
    std::vector<int> perm;
    perm.reserve(t.orient.size());
    for (int child : t.orient) perm.push_back(pos[child]);
    int sign = perm_parity(perm);

    RTree out;
    out.parent.resize(pre.size());
    out.color.resize(pre.size());
    for (size_t i = 0; i < pre.size(); ++i) {
        out.color[i] = t.color[pre[i]];
        out.parent[i] = i == 0 ? -1 : pos[t.parent[pre[i]]];
    }
    return std::make_pair(out, sign);
}

// Default orientation of a canonical tree: children edges in preorder.
inline RawTree rtree_raw(const RTree& t) {
    RawTree r;
    r.parent = t.parent;
    r.color = t.color;
    for (int v = 1; v < t.verts(); ++v) r.orient.push_back(v);
    return r;
}

// nested parenthesis dump: root(child,child,...)
inline std::string rtree_to_string(const RTree& t) {
    std::vector<std::vector<int>> kids(t.verts());
    for (int v = 1; v < t.verts(); ++v) kids[t.parent[v]].push_back(v);
    auto rec = [&](auto&& self, int v) -> std::string {
        std::string s = t.color[v] ? "w" + std::to_string(t.color[v]) : "b";
        if (!kids[v].empty()) {
            s += "(";
            for (size_t i = 0; i < kids[v].size(); ++i)
                s += (i ? "," : "") + self(self, kids[v][i]);
            s += ")";
        }
        return s;
    };
    return rec(rec, 0);
}

namespace detail {

/*
 * Insertion: replace the white vertex labelled i of g1 by g2; the incoming
 * branches of that vertex reattach to the vertices of g2 in all possible
 * ways, the output edge goes to the root of g2. Orientation: g1's edges (the
 * replaced vertex's own edge becomes the edge of g2's root), then g2's edges.
 * Each resulting raw tree is handed to the sink uncanonicalized.
 */
template <class Sink>
void rtree_compose_terms(const RTree& g1, int i, const RTree& g2, Sink sink) {
    if (i < 1 || i > g1.arity()) throw IndexOutOfRange("rtree_compose: bad input slot");
    int p = 0;
    while (g1.color[p] != i) ++p;
    int m1 = g1.verts(), m2 = g2.verts(), n2 = g2.arity();

    std::vector<int> kids_p;
    for (int v = 1; v < m1; ++v)
        if (g1.parent[v] == p) kids_p.push_back(v);

    // relabelled colors; g2's vertex v becomes m1 + v, vertex p goes unused
    std::vector<int> color(m1 + m2), base_parent(m1 + m2, -2);
    for (int v = 0; v < m1; ++v) {
        int c = g1.color[v];
        color[v] = c > i ? c + n2 - 1 : c;
        base_parent[v] = g1.parent[v];
    }
    for (int v = 0; v < m2; ++v) {
        int c = g2.color[v];
        color[m1 + v] = c ? c + i - 1 : 0;
        base_parent[m1 + v] = v ? m1 + g2.parent[v] : g1.parent[p];
    }
    color[p] = -1; // orphaned slot

    std::vector<int> target(kids_p.size(), 0);
    for (;;) {
        RawTree raw;
        raw.color = color;
        raw.parent = base_parent;
        for (size_t j = 0; j < kids_p.size(); ++j)
            raw.parent[kids_p[j]] = m1 + target[j];
        for (int v = 1; v < m1; ++v)
            if (v != p) raw.orient.push_back(v);
        if (g1.parent[p] >= 0) {
            // p's edge is inherited by g2's root; keep its slot in the order
            auto it = std::lower_bound(raw.orient.begin(), raw.orient.end(), p);
            raw.orient.insert(it, m1);
        }
        for (int v = 1; v < m2; ++v) raw.orient.push_back(m1 + v);

        // drop the orphaned slot before canonicalizing
        RawTree packed;
        std::vector<int> newid(raw.parent.size(), -1);
        for (size_t v = 0; v < raw.parent.size(); ++v) {
            if ((int)v == p) continue;
            newid[v] = (int)packed.parent.size();
            packed.parent.push_back(raw.parent[v]);
            packed.color.push_back(raw.color[v]);
        }
        for (auto& pv : packed.parent)
            if (pv >= 0) pv = newid[pv];
        for (int child : raw.orient) packed.orient.push_back(newid[child]);

        sink(packed);

        size_t j = 0;
        while (j < target.size() && ++target[j] == m2) target[j++] = 0;
        if (j == target.size()) break;
    }
}

} // namespace detail

inline LinComb<RTree> rtree_compose(const RTree& g1, int i, const RTree& g2) {
    LinComb<RTree> out;
    detail::rtree_compose_terms(g1, i, g2, [&](const RawTree& raw) {
        if (auto c = rtree_canonicalize(raw)) add_term(out, c->first, Scalar(c->second));
    });
    return out;
}

// ungraded rooted-tree (pre-Lie) composition: no orientations, no vanishing,
// coefficients count the grafting maps
inline LinComb<RTree> prelie_compose(const RTree& g1, int i, const RTree& g2) {
    LinComb<RTree> out;
    detail::rtree_compose_terms(g1, i, g2, [&](const RawTree& raw) {
        add_term(out, rtree_canonicalize(raw, false)->first, Scalar(1));
    });
    return out;
}

/*
 * Twisted differential, four families of terms; the new edge always comes
 * first in the orientation. Vertex splittings (black -> black/black, white ->
 * white-over-black plus black-over-white) distribute the incoming branches
 * over the pair and carry a -1; adding a black leaf to any vertex or a black
 * vertex below the root carries +1. Cancellations happen in the accumulator.
 */
inline LinComb<RTree> rtree_twisted_differential(const RTree& g) {
    LinComb<RTree> out;
    int m = g.verts();

    auto emit = [&](RawTree raw, int new_child, const Scalar& coeff) {
        raw.orient.insert(raw.orient.begin(), new_child);
        if (auto c = rtree_canonicalize(raw))
            add_term(out, c->first, coeff * c->second);
    };

    // splittings: bottom keeps the slot v (and v's output edge), top is the
    // new vertex m with the new edge; branches of v go to top or bottom
    for (int v = 0; v < m; ++v) {
        std::vector<int> kids_v;
        for (int w = 1; w < m; ++w)
            if (g.parent[w] == v) kids_v.push_back(w);
        std::vector<std::pair<int, int>> colorings; // (top, bottom)
        if (g.color[v] == 0)
            colorings = {{0, 0}};
        else
            colorings = {{g.color[v], 0}, {0, g.color[v]}};
        for (auto [ctop, cbot] : colorings) {
            for (int mask = 0; mask < (1 << kids_v.size()); ++mask) {
                RawTree raw;
                raw.parent = g.parent;
                raw.color = g.color;
                raw.parent.push_back(v);
                raw.color.push_back(ctop);
                raw.color[v] = cbot;
                for (size_t j = 0; j < kids_v.size(); ++j)
                    if (mask >> j & 1) raw.parent[kids_v[j]] = m;
                for (int w = 1; w < m; ++w) raw.orient.push_back(w);
                emit(std::move(raw), m, Scalar(-1));
            }
        }
    }

    // black leaf attached to an existing vertex
    for (int v = 0; v < m; ++v) {
        RawTree raw;
        raw.parent = g.parent;
        raw.color = g.color;
        raw.parent.push_back(v);
        raw.color.push_back(0);
        for (int w = 1; w < m; ++w) raw.orient.push_back(w);
        emit(std::move(raw), m, Scalar(1));
    }

    { // black vertex below the root; the root acquires the new edge
        RawTree raw;
        raw.parent = g.parent;
        raw.color = g.color;
        raw.parent.push_back(-1);
        raw.parent[0] = m;
        raw.color.push_back(0);
        for (int w = 1; w < m; ++w) raw.orient.push_back(w);
        emit(std::move(raw), 0, Scalar(1));
    }
    return out;
}

inline LinComb<RTree> rtree_compose(const LinComb<RTree>& a, int i, const LinComb<RTree>& b) {
    LinComb<RTree> out;
    for (const auto& [g1, c1] : a)
        for (const auto& [g2, c2] : b) add_scaled(out, rtree_compose(g1, i, g2), c1 * c2);
    return out;
}

inline LinComb<RTree> rtree_twisted_differential(const LinComb<RTree>& a) {
    LinComb<RTree> out;
    for (const auto& [g, c] : a) add_scaled(out, rtree_twisted_differential(g), c);
    return out;
}

/*
 * All rooted trees with whites 1..n and k blacks: decode every Pruefer
 * sequence over the n+k vertices, pick every root, canonicalize, dedupe.
 */
inline std::vector<RTree> enumerate_rtrees(int n, int k) {
    int m = n + k;
    std::vector<RTree> out;
    if (m <= 0) return out;
    std::vector<int> colors(m);
    for (int v = 0; v < m; ++v) colors[v] = v < n ? v + 1 : 0;

    auto emit_tree = [&](const std::vector<std::pair<int, int>>& edges) {
        for (int root = 0; root < m; ++root) {
            std::vector<std::vector<int>> adj(m);
            for (auto [a, b] : edges) {
                adj[a].push_back(b);
                adj[b].push_back(a);
            }
            RawTree raw;
            raw.parent.assign(m, -1);
            raw.color = colors;
            std::vector<int> stack = {root}, seen(m, 0);
            seen[root] = 1;
            while (!stack.empty()) {
                int v = stack.back();
                stack.pop_back();
                for (int w : adj[v])
                    if (!seen[w]) {
                        seen[w] = 1;
                        raw.parent[w] = v;
                        raw.orient.push_back(w);
                        stack.push_back(w);
                    }
            }
            if (auto c = rtree_canonicalize(raw)) out.push_back(c->first);
        }
    };

    if (m == 1) {
        emit_tree({});
    } else {
        std::vector<int> seq(m - 2, 0);
        for (;;) {
            // standard Pruefer decoding
            std::vector<int> deg(m, 1);
            for (int s : seq) ++deg[s];
            std::vector<std::pair<int, int>> edges;
            std::vector<char> used(m, 0);
            for (int s : seq) {
                for (int v = 0; v < m; ++v)
                    if (deg[v] == 1 && !used[v]) {
                        edges.push_back({v, s});
                        used[v] = 1;
                        --deg[s];
                        break;
                    }
            }
            int a = -1, b = -1;
            for (int v = 0; v < m; ++v)
                if (!used[v] && deg[v] == 1) (a < 0 ? a : b) = v;
            edges.push_back({a, b});
            emit_tree(edges);
            size_t j = 0;
            while (j < seq.size() && ++seq[j] == m) seq[j++] = 0;
            if (j == seq.size()) break;
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

// k is pinned by the slice data: every tree on n + k vertices has n + k - 1
// edges, so degree d forces k = n - 1 - d.
inline std::vector<RTree> rtree_slice_basis(int n, int d) {
    int k = n - 1 - d;
    if (k < 0) return {};
    return enumerate_rtrees(n, k);
}

inline HomologyRow rtree_homology(int n, int d) {
    auto dfun = [](const RTree& g) { return rtree_twisted_differential(g); };
    auto mid = rtree_slice_basis(n, d);
    auto low = rtree_slice_basis(n, d - 1);
    auto high = rtree_slice_basis(n, d + 1);
    auto h = homology_dims(slice_matrix(mid, low, dfun), slice_matrix(high, mid, dfun));
    HomologyRow r;
    r.complex_id = "S-1RT";
    r.arity = n;
    r.degree = d;
    r.dim_chains = h.dim_chains;
    r.betti = h.betti;
    return r;
}

// Image of the shifted Lie generator with a Maurer-Cartan input: a black
// root with a white child plus a white root with a black leaf.
inline LinComb<RTree> rtree_twist_element() {
    LinComb<RTree> lam;
    RTree bw;
    bw.parent = {-1, 0};
    bw.color = {0, 1};
    RTree wb;
    wb.parent = {-1, 0};
    wb.color = {1, 0};
    lam[bw] = 1;
    lam[wb] = 1;
    return lam;
}

inline bool rtree_operadic_mc_check() {
    auto lam = rtree_twist_element();
    return rtree_twisted_differential(lam) == rtree_compose(lam, 1, lam);
}

// relabelling whites can reorder the canonical branches, hence carries the
// induced edge-permutation sign
inline LinComb<RTree> rtree_relabel(const LinComb<RTree>& a, const std::vector<int>& s) {
    LinComb<RTree> out;
    for (const auto& [g, c] : a) {
        RawTree raw = rtree_raw(g);
        for (auto& col : raw.color)
            if (col > 0) col = s[col - 1];
        if (auto can = rtree_canonicalize(raw)) add_term(out, can->first, c * can->second);
    }
    return out;
}

// cyclic symmetrization of the square of the two-tree element vanishes
inline bool rtree_shifted_jacobi_check() {
    LinComb<RTree> ell;
    RTree a, b;
    a.parent = {-1, 0};
    a.color = {1, 2};
    b.parent = {-1, 0};
    b.color = {2, 1};
    ell[a] = 1;
    ell[b] = 1;
    auto sq = rtree_compose(ell, 1, ell);
    LinComb<RTree> total = sq;
    add_scaled(total, rtree_relabel(sq, {2, 3, 1}), Scalar(1));
    add_scaled(total, rtree_relabel(sq, {3, 1, 2}), Scalar(1));
    return total.empty();
}

/*
 * Lie elements in the free pre-Lie algebra: the kernel of the twisted
 * differential from the black-free slice to the one-black slice. The
 * black-black edge quotient is invisible here (a single black vertex cannot
 * span such an edge), and the operadic suspension relating the shifted and
 * plain tree operads only rescales basis vectors, so the rank is unchanged.
 */
inline int rpl_lie_rank(int n) {
    auto dfun = [](const RTree& g) { return rtree_twisted_differential(g); };
    auto dom = rtree_slice_basis(n, n - 1);
    auto cod = rtree_slice_basis(n, n - 2);
    auto mat = slice_matrix(dom, cod, dfun);
    return (int)dom.size() - rank(mat);
}

} // namespace mcx

#endif
