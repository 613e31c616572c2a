#ifndef MCX_PTREE_HPP
#define MCX_PTREE_HPP

#include <mcx/chain_slice.hpp>
#include <mcx/operad_util.hpp>

#include <algorithm>
#include <string>
#include <tuple>
#include <vector>

namespace mcx {

/*
 * Planar rooted tree with white (labelled) and black vertices: vertices in
 * preorder (root = 0), children of a vertex appear in planar left-to-right
 * order, which in preorder numbering means increasing index. Edges (the link
 * of a non-root vertex to its parent) have degree 1, black vertices -2.
 *
 * The reference edge order is bottom-to-top then left-to-right: non-root
 * vertices sorted by (depth, index). Planar trees have no symmetries, so
 * there is no vanishing rule here.
 */
struct PTree {
    std::vector<int> parent;
    std::vector<int> color; // 0 = black, >0 = white label

    auto key() const { return std::tie(parent, color); }
    bool operator==(const PTree& o) const { return key() == o.key(); }
    bool operator<(const PTree& o) const { return key() < o.key(); }

    int verts() const { return (int)parent.size(); }
    int arity() const {
        int n = 0;
        for (int c : color) n += c > 0;
        return n;
    }
    int blacks() const { return verts() - arity(); }
    int degree() const { return (verts() - 1) - 2 * blacks(); }

    std::vector<std::vector<int>> kids() const {
        std::vector<std::vector<int>> k(parent.size());
        for (size_t v = 1; v < parent.size(); ++v) k[parent[v]].push_back((int)v);
        return k;
    }
};

// Surgery scratch form: explicit ordered child lists plus an explicit edge
// order (edges named by their child vertex).
struct RawPTree {
    std::vector<std::vector<int>> kids;
    std::vector<int> color;
    int root = 0;
    std::vector<int> orient;
};

namespace detail {

inline std::vector<int> ptree_depths(const PTree& t) {
    std::vector<int> d(t.verts(), 0);
    for (int v = 1; v < t.verts(); ++v) d[v] = d[t.parent[v]] + 1;
    return d;
}

// reference edge order of a canonical tree: by depth, then left to right
inline std::vector<int> ptree_edge_order(const PTree& t) {
    std::vector<int> e;
    for (int v = 1; v < t.verts(); ++v) e.push_back(v);
    auto dep = ptree_depths(t);
    std::stable_sort(e.begin(), e.end(),
                     [&](int a, int b) { return dep[a] < dep[b]; });
    return e;
}

} // namespace detail

// (canonical tree, sign of the given edge order against the reference one)
inline std::pair<PTree, int> ptree_canonicalize(const RawPTree& t) {
    std::vector<int> pre, stack = {t.root};
    // iterative preorder respecting the planar child order
    while (!stack.empty()) {
        int v = stack.back();
        stack.pop_back();
        pre.push_back(v);
        for (auto it = t.kids[v].rbegin(); it != t.kids[v].rend(); ++it)
            stack.push_back(*it);
    }
    std::vector<int> pos(t.kids.size(), -1);
    for (size_t i = 0; i < pre.size(); ++i) pos[pre[i]] = (int)i;

    PTree out;
    out.parent.assign(pre.size(), -1);
    out.color.resize(pre.size());
    for (size_t i = 0; i < pre.size(); ++i) {
        out.color[i] = t.color[pre[i]];
        for (int c : t.kids[pre[i]]) out.parent[pos[c]] = (int)i;
    }

    auto ref = detail::ptree_edge_order(out);
    std::vector<int> rank(pre.size(), -1);
    for (size_t i = 0; i < ref.size(); ++i) rank[ref[i]] = (int)i;
    std::vector<int> perm;
    for (int child : t.orient) perm.push_back(rank[pos[child]]);
    return {out, perm_parity(perm)};
}

inline RawPTree ptree_raw(const PTree& t) {
    RawPTree r;
    r.kids = t.kids();
    r.color = t.color;
    for (int v : detail::ptree_edge_order(t)) r.orient.push_back(v);
    return r;
}

inline std::string ptree_to_string(const PTree& t) {
    auto kids = t.kids();
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

// insertion slots of a planar tree in left-to-right contour order:
// (vertex, position among its children)
inline std::vector<std::pair<int, int>> ptree_gaps(const PTree& t) {
    auto kids = t.kids();
    std::vector<std::pair<int, int>> gaps;
    auto rec = [&](auto&& self, int v) -> void {
        for (size_t i = 0; i <= kids[v].size(); ++i) {
            gaps.push_back({v, (int)i});
            if (i < kids[v].size()) self(self, kids[v][i]);
        }
    };
    rec(rec, 0);
    return gaps;
}

} // namespace detail

/*
 * Brace-tree insertion: replace the white vertex labelled i of g1 by g2; the
 * output edge of that vertex goes to the root of g2 and its ordered incoming
 * branches are grafted onto g2 in every way that preserves their left-to-
 * right order. Orientation: g1's reference edge order (the replaced vertex's
 * edge becomes the edge of g2's root) followed by g2's.
 */
inline LinComb<PTree> ptree_compose(const PTree& g1, int i, const PTree& g2) {
    if (i < 1 || i > g1.arity()) throw IndexOutOfRange("ptree_compose: bad input slot");
    int p = 0;
    while (g1.color[p] != i) ++p;
    int m1 = g1.verts(), m2 = g2.verts(), n2 = g2.arity();
    auto kids1 = g1.kids();
    const std::vector<int>& branches = kids1[p];
    auto gaps = detail::ptree_gaps(g2);

    // shared vertex bookkeeping: g1's vertices keep their ids, g2's vertex v
    // becomes m1 + v; the slot p is dropped when packing
    std::vector<int> color(m1 + m2);
    for (int v = 0; v < m1; ++v) color[v] = g1.color[v] > i ? g1.color[v] + n2 - 1 : g1.color[v];
    for (int v = 0; v < m2; ++v) color[m1 + v] = g2.color[v] ? g2.color[v] + i - 1 : 0;

    LinComb<PTree> out;
    std::vector<int> at(branches.size(), 0); // weakly increasing gap choices
    for (;;) {
        RawPTree raw;
        raw.color = color;
        raw.kids.assign(m1 + m2, {});
        for (int v = 0; v < m1; ++v)
            if (v != p)
                for (int c : kids1[v]) raw.kids[v].push_back(c == p ? m1 : c);
        auto kids2 = g2.kids();
        for (int v = 0; v < m2; ++v)
            for (int c : kids2[v]) raw.kids[m1 + v].push_back(m1 + c);
        // graft the branches, rightmost first so stored positions stay valid
        for (int j = (int)branches.size() - 1; j >= 0; --j) {
            auto [gv, gpos] = gaps[at[j]];
            auto& lst = raw.kids[m1 + gv];
            lst.insert(lst.begin() + gpos, branches[j]);
        }
        raw.root = p == 0 ? m1 : 0;
        // the edge of p, if any, is inherited by g2's root and keeps its slot
        for (int v : detail::ptree_edge_order(g1))
            raw.orient.push_back(v == p ? m1 : v);
        for (int v : detail::ptree_edge_order(g2)) raw.orient.push_back(m1 + v);

        // pack out the orphaned slot p
        RawPTree packed;
        std::vector<int> newid(m1 + m2, -1);
        for (int v = 0; v < m1 + m2; ++v) {
            if (v == p) continue;
            newid[v] = (int)packed.color.size();
            packed.color.push_back(raw.color[v]);
            packed.kids.push_back(raw.kids[v]);
        }
        for (auto& lst : packed.kids)
            for (auto& c : lst) c = newid[c];
        packed.root = newid[raw.root];
        for (int child : raw.orient) packed.orient.push_back(newid[child]);

        auto [can, sign] = ptree_canonicalize(packed);
        add_term(out, can, Scalar(sign));

        // next weakly increasing assignment
        int j = (int)at.size() - 1;
        while (j >= 0 && at[j] == (int)gaps.size() - 1) --j;
        if (j < 0) break;
        int v = at[j] + 1;
        for (size_t l = j; l < at.size(); ++l) at[l] = v;
    }
    return out;
}

/*
 * Twisted differential, four families; the new edge comes first in the
 * orientation. Splitting a vertex into a (top, bottom) pair distributes its
 * ordered branches over the pair in all order-preserving ways (prefix left
 * of the top branch, middle onto the top, suffix right of it) and carries a
 * -1; adding a black leaf in any planar slot, or a black root below, +1.
 */
inline LinComb<PTree> ptree_twisted_differential(const PTree& g) {
    LinComb<PTree> out;
    int m = g.verts();
    auto kids = g.kids();

    auto emit = [&](RawPTree raw, int new_child, const Scalar& coeff) {
        raw.orient.insert(raw.orient.begin(), new_child);
        auto [can, sign] = ptree_canonicalize(raw);
        add_term(out, can, coeff * sign);
    };
    auto base = [&]() {
        RawPTree raw;
        raw.kids = kids;
        raw.color = g.color;
        for (int v : detail::ptree_edge_order(g)) raw.orient.push_back(v);
        return raw;
    };

    for (int v = 0; v < m; ++v) {
        const auto& L = kids[v];
        std::vector<std::pair<int, int>> colorings; // (top, bottom)
        if (g.color[v] == 0)
            colorings = {{0, 0}};
        else
            colorings = {{g.color[v], 0}, {0, g.color[v]}};
        for (auto [ctop, cbot] : colorings)
            for (size_t a = 0; a <= L.size(); ++a)
                for (size_t b = a; b <= L.size(); ++b) {
                    RawPTree raw = base();
                    raw.kids.push_back({}); // top = m
                    raw.color.push_back(ctop);
                    raw.color[v] = cbot;
                    raw.kids[v].clear();
                    for (size_t j = 0; j < a; ++j) raw.kids[v].push_back(L[j]);
                    raw.kids[v].push_back(m);
                    for (size_t j = b; j < L.size(); ++j) raw.kids[v].push_back(L[j]);
                    for (size_t j = a; j < b; ++j) raw.kids[m].push_back(L[j]);
                    emit(std::move(raw), m, Scalar(-1));
                }
    }

    for (int v = 0; v < m; ++v)
        for (size_t pos = 0; pos <= kids[v].size(); ++pos) {
            RawPTree raw = base();
            raw.kids.push_back({});
            raw.color.push_back(0);
            raw.kids[v].insert(raw.kids[v].begin() + pos, m);
            emit(std::move(raw), m, Scalar(1));
        }

    {
        RawPTree raw = base();
        raw.kids.push_back({0});
        raw.color.push_back(0);
        raw.root = m;
        emit(std::move(raw), 0, Scalar(1));
    }
    return out;
}

inline LinComb<PTree> ptree_compose(const LinComb<PTree>& a, int i, const LinComb<PTree>& b) {
    LinComb<PTree> out;
    for (const auto& [g1, c1] : a)
        for (const auto& [g2, c2] : b) add_scaled(out, ptree_compose(g1, i, g2), c1 * c2);
    return out;
}

inline LinComb<PTree> ptree_twisted_differential(const LinComb<PTree>& a) {
    LinComb<PTree> out;
    for (const auto& [g, c] : a) add_scaled(out, ptree_twisted_differential(g), c);
    return out;
}

/*
 * All planar rooted trees with whites 1..n and k blacks: generate the
 * preorder shapes (each new vertex hangs off the current rightmost path)
 * and decorate with every placement of the labels.
 */
inline std::vector<PTree> enumerate_ptrees(int n, int k) {
    int m = n + k;
    std::vector<PTree> out;
    if (m <= 0) return out;

    std::vector<std::vector<int>> shapes;
    std::vector<int> parent(m, -1);
    auto build = [&](auto&& self, int v, std::vector<int> rightmost) -> void {
        if (v == m) {
            shapes.push_back(parent);
            return;
        }
        for (size_t i = 0; i < rightmost.size(); ++i) {
            parent[v] = rightmost[i];
            std::vector<int> next(rightmost.begin(), rightmost.begin() + i + 1);
            next.push_back(v);
            self(self, v + 1, next);
        }
    };
    build(build, 1, {0});

    // all injective placements of the white labels on each shape
    std::vector<int> select(m, 0);
    for (int i = 0; i < n; ++i) select[m - 1 - i] = 1;
    std::sort(select.begin(), select.end());
    for (const auto& shape : shapes) {
        std::vector<int> sel = select;
        do {
            std::vector<int> whites;
            for (int v = 0; v < m; ++v)
                if (sel[v]) whites.push_back(v);
            std::vector<int> lab(n);
            for (int i = 0; i < n; ++i) lab[i] = i + 1;
            do {
                PTree t;
                t.parent = shape;
                t.color.assign(m, 0);
                for (int i = 0; i < n; ++i) t.color[whites[i]] = lab[i];
                out.push_back(t);
            } while (std::next_permutation(lab.begin(), lab.end()));
        } while (std::next_permutation(sel.begin(), sel.end()));
    }
    std::sort(out.begin(), out.end());
    return out;
}

// degree pins the black count: a tree on n + k vertices has n + k - 1 edges
inline std::vector<PTree> ptree_slice_basis(int n, int d) {
    int k = n - 1 - d;
    if (k < 0) return {};
    return enumerate_ptrees(n, k);
}

inline HomologyRow ptree_homology(int n, int d) {
    auto dfun = [](const PTree& g) { return ptree_twisted_differential(g); };
    auto h = homology_dims(
        slice_matrix(ptree_slice_basis(n, d), ptree_slice_basis(n, d - 1), dfun),
        slice_matrix(ptree_slice_basis(n, d + 1), ptree_slice_basis(n, d), dfun));
    HomologyRow r;
    r.complex_id = "BT";
    r.arity = n;
    r.degree = d;
    r.dim_chains = h.dim_chains;
    r.betti = h.betti;
    return r;
}

// a brace tree: every black vertex has at least two incoming edges
inline bool ptree_in_br(const PTree& t) {
    auto kids = t.kids();
    for (int v = 0; v < t.verts(); ++v)
        if (t.color[v] == 0 && kids[v].size() < 2) return false;
    return true;
}

// basis of the braces sub-operad slice together with its differential; the
// matrix assembly throws NotClosed if the differential leaks out of Br
inline ChainSlice br_subcomplex(int n, int d) {
    auto dfun = [](const PTree& g) { return ptree_twisted_differential(g); };
    auto filter = [](std::vector<PTree> v) {
        v.erase(std::remove_if(v.begin(), v.end(),
                               [](const PTree& t) { return !ptree_in_br(t); }),
                v.end());
        return v;
    };
    auto mid = filter(ptree_slice_basis(n, d));
    auto low = filter(ptree_slice_basis(n, d - 1));
    ChainSlice s;
    s.complex_id = "Br";
    s.arity = n;
    s.degree = d;
    for (const auto& t : mid) s.basis.push_back(ptree_to_string(t));
    s.differential_out = slice_matrix(mid, low, dfun);
    return s;
}

// image of the shifted Lie generator with a Maurer-Cartan input
inline LinComb<PTree> ptree_twist_element() {
    LinComb<PTree> lam;
    PTree bw;
    bw.parent = {-1, 0};
    bw.color = {0, 1};
    PTree wb;
    wb.parent = {-1, 0};
    wb.color = {1, 0};
    lam[bw] = 1;
    lam[wb] = 1;
    return lam;
}

inline bool ptree_operadic_mc_check() {
    auto lam = ptree_twist_element();
    return ptree_twisted_differential(lam) == ptree_compose(lam, 1, lam);
}

// relabelling whites moves no edge, so it is sign-free on planar trees
inline LinComb<PTree> ptree_relabel(const LinComb<PTree>& a, const std::vector<int>& s) {
    LinComb<PTree> out;
    for (const auto& [g, c] : a) {
        PTree h = g;
        for (auto& col : h.color)
            if (col > 0) col = s[col - 1];
        add_term(out, h, c);
    }
    return out;
}

// the two-tree image of the shifted Lie generator squares to a Jacobiator
// whose cyclic symmetrization vanishes
inline bool ptree_shifted_jacobi_check() {
    LinComb<PTree> ell;
    PTree a, b;
    a.parent = {-1, 0};
    a.color = {1, 2};
    b.parent = {-1, 0};
    b.color = {2, 1};
    ell[a] = 1;
    ell[b] = 1;
    auto sq = ptree_compose(ell, 1, ell);
    LinComb<PTree> total = sq;
    add_scaled(total, ptree_relabel(sq, {2, 3, 1}), Scalar(1));
    add_scaled(total, ptree_relabel(sq, {3, 1, 2}), Scalar(1));
    return total.empty();
}

} // namespace mcx

#endif
