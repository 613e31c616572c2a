#ifndef MCX_DGRAPH_HPP
#define MCX_DGRAPH_HPP

#include <mcx/sgraph.hpp>

#include <algorithm>
#include <numeric>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

namespace mcx {

/*
 * Simple graph with an optional degree +1 operator mark on each vertex.
 * Whites 0..n-1 (vertex v is label v+1), blacks n..n+k-1. Marks are odd, so
 * the orientation is an ordering of all edges followed by all marks; the
 * reference order is sorted edges, then marked whites ascending, then marked
 * blacks ascending. A marked black is the image of the closed arity-zero
 * element, an unmarked black the ordinary one.
 */
struct DGraph {
    int n = 0;
    int k = 0;
    std::vector<std::pair<int, int>> edges;
    std::vector<char> wmark, bmark; // sizes n and k

    auto key() const { return std::tie(n, k, edges, wmark, bmark); }
    bool operator==(const DGraph& o) const { return key() == o.key(); }
    bool operator<(const DGraph& o) const { return key() < o.key(); }

    int verts() const { return n + k; }
    int arity() const { return n; }
    int blacks() const { return k; }
    int marks() const {
        return (int)(std::count(wmark.begin(), wmark.end(), 1) +
                     std::count(bmark.begin(), bmark.end(), 1));
    }
    int degree() const { return (int)edges.size() - 2 * k + marks(); }
};

// unnormalized input: edge list order, then the mark list order, is the
// orientation
struct RawDGraph {
    int n = 0;
    int k = 0;
    std::vector<std::pair<int, int>> edges;
    std::vector<int> marks; // vertices carrying a mark, in orientation order
};

namespace detail {

// partition the blacks into vertex-refinement classes: whites are fixed, so
// seed each vertex with (is-black, mark) and iterate "append the sorted
// multiset of neighbour colours" until stable. Any black relabelling that
// fixes the graph also fixes the classes, so restricting the canonical-form
// search to class-preserving relabellings is safe and prunes the k! loop.
inline std::vector<std::vector<int>> black_classes(const RawDGraph& g) {
    int m = g.n + g.k;
    std::vector<char> mark(m, 0);
    for (int v : g.marks) mark[v] = 1;
    std::vector<int> color(m);
    for (int v = 0; v < m; ++v) color[v] = v < g.n ? v : g.n + mark[v];
    std::vector<std::vector<int>> adj(m);
    for (auto [a, b] : g.edges) {
        adj[a].push_back(b);
        adj[b].push_back(a);
    }
    for (;;) {
        std::map<std::pair<int, std::vector<int>>, std::vector<int>> buckets;
        for (int v = 0; v < m; ++v) {
            std::vector<int> nb;
            for (int u : adj[v]) nb.push_back(color[u]);
            std::sort(nb.begin(), nb.end());
            buckets[{color[v], nb}].push_back(v);
        }
        int next = 0;
        std::vector<int> refined(m);
        for (auto& [key, verts] : buckets) {
            for (int v : verts) refined[v] = next;
            ++next;
        }
        if (refined == color) break;
        color = refined;
    }
    std::map<int, std::vector<int>> by_color;
    for (int v = g.n; v < m; ++v) by_color[color[v]].push_back(v - g.n);
    std::vector<std::vector<int>> classes;
    for (auto& [c, blacks] : by_color) classes.push_back(blacks);
    return classes;
}

} // namespace detail

/*
 * Canonical form: the black relabelling with the lexicographically least
 * (sorted edge list, sorted mark list). The sign is the parity of the
 * reordering of the combined odd-object list; a relabelling that fixes both
 * lists with opposite parity kills the graph, as do parallel edges and a
 * doubled mark (the operator squares to zero).
 */
inline std::optional<std::pair<DGraph, int>> dgraph_canonicalize(const RawDGraph& g) {
    for (auto [a, b] : g.edges)
        if (a == b) throw std::invalid_argument("dgraph: loops are not allowed");

    int E = (int)g.edges.size();
    auto classes = detail::black_classes(g);
    // each class is relabelled onto its own contiguous range (classes are
    // ordered by invariant colour, so the ranges do not depend on the input
    // labelling); the search runs over the per-class target permutations
    std::vector<std::vector<int>> targets;
    int off = 0;
    for (auto& cls : classes) {
        std::vector<int> range(cls.size());
        std::iota(range.begin(), range.end(), off);
        off += (int)cls.size();
        targets.push_back(range);
    }
    std::vector<int> perm(g.k);
    for (size_t ci = 0; ci < classes.size(); ++ci)
        for (size_t i = 0; i < classes[ci].size(); ++i)
            perm[classes[ci][i]] = targets[ci][i];
    bool have = false, zero = false;
    using TaggedEdges = std::vector<std::pair<std::pair<int, int>, int>>;
    using TaggedMarks = std::vector<std::pair<int, int>>;
    TaggedEdges best_e, cur_e;
    TaggedMarks best_m, cur_m;
    int best_sign = 1;
    do {
        auto rename = [&](int v) { return v < g.n ? v : g.n + perm[v - g.n]; };
        cur_e.clear();
        for (int j = 0; j < E; ++j) {
            int a = rename(g.edges[j].first), b = rename(g.edges[j].second);
            cur_e.push_back({{std::min(a, b), std::max(a, b)}, j});
        }
        std::sort(cur_e.begin(), cur_e.end());
        for (size_t j = 0; j + 1 < cur_e.size(); ++j)
            if (cur_e[j].first == cur_e[j + 1].first) return std::nullopt;
        cur_m.clear();
        for (size_t j = 0; j < g.marks.size(); ++j)
            cur_m.push_back({rename(g.marks[j]), E + (int)j});
        std::sort(cur_m.begin(), cur_m.end());
        for (size_t j = 0; j + 1 < cur_m.size(); ++j)
            if (cur_m[j].first == cur_m[j + 1].first) return std::nullopt;

        std::vector<int> order;
        for (auto& [e, idx] : cur_e) order.push_back(idx);
        for (auto& [v, idx] : cur_m) order.push_back(idx);
        int sign = perm_parity(order);

        auto shape = [](const TaggedEdges& te, const TaggedMarks& tm) {
            std::pair<std::vector<std::pair<int, int>>, std::vector<int>> s;
            for (auto& [e, idx] : te) s.first.push_back(e);
            for (auto& [v, idx] : tm) s.second.push_back(v);
            return s;
        };
        auto cur_shape = shape(cur_e, cur_m);
        if (!have || cur_shape < shape(best_e, best_m)) {
            best_e = cur_e;
            best_m = cur_m;
            best_sign = sign;
            have = true;
        } else if (cur_shape == shape(best_e, best_m) && sign != best_sign) {
            zero = true;
        }

        // advance the class-preserving relabelling (mixed-radix odometer)
        size_t c = classes.size();
        while (c > 0 &&
               !std::next_permutation(targets[c - 1].begin(), targets[c - 1].end()))
            --c;
        if (c == 0) break;
        for (size_t ci = 0; ci < classes.size(); ++ci)
            for (size_t i = 0; i < classes[ci].size(); ++i)
                perm[classes[ci][i]] = targets[ci][i];
    } while (true);
    if (zero) return std::nullopt;

    DGraph out;
    out.n = g.n;
    out.k = g.k;
    out.wmark.assign(g.n, 0);
    out.bmark.assign(g.k, 0);
    for (auto& [e, idx] : best_e) out.edges.push_back(e);
    for (auto& [v, idx] : best_m)
        (v < g.n ? out.wmark[v] : out.bmark[v - g.n]) = 1;
    return std::make_pair(out, best_sign);
}

inline RawDGraph dgraph_raw(const DGraph& g) {
    RawDGraph raw{g.n, g.k, g.edges, {}};
    for (int v = 0; v < g.n; ++v)
        if (g.wmark[v]) raw.marks.push_back(v);
    for (int b = 0; b < g.k; ++b)
        if (g.bmark[b]) raw.marks.push_back(g.n + b);
    return raw;
}

// like the plain graph notation, a "*" suffix marking decorated vertices
inline std::string dgraph_to_string(const DGraph& g) {
    auto name = [&](int v) {
        std::string s = v < g.n ? "w" + std::to_string(v + 1)
                                : "b" + std::to_string(v - g.n + 1);
        if (v < g.n ? g.wmark[v] : g.bmark[v - g.n]) s += "*";
        return s;
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
 * Twisted differential. The plain-graph rules apply verbatim: black split
 * -1/2, white split -1, fresh black leaf +1, with the new edge first in the
 * orientation. Marks refine them: a marked black splits like a white (-1,
 * mark staying put), and a marked white splits twice with weight -1 each,
 * once keeping its mark next to a plain new black and once handing the mark
 * to the new black (the operator either lands on the fresh bracket argument
 * or passes onto it); a handed-over mark keeps its slot in the mark order.
 */
inline LinComb<DGraph> dgraph_twisted_differential(const DGraph& g) {
    LinComb<DGraph> out;
    int B = g.verts();
    RawDGraph base = dgraph_raw(g);

    auto emit = [&](const std::vector<std::pair<int, int>>& old_edges, int v,
                    const std::vector<int>& marks, const Scalar& coeff) {
        RawDGraph raw;
        raw.n = g.n;
        raw.k = g.k + 1;
        raw.edges.push_back({v, B});
        raw.edges.insert(raw.edges.end(), old_edges.begin(), old_edges.end());
        raw.marks = marks;
        if (auto c = dgraph_canonicalize(raw)) add_term(out, c->first, coeff * c->second);
    };

    for (int v = 0; v < g.verts(); ++v) {
        bool marked = v < g.n ? g.wmark[v] : g.bmark[v - g.n];
        std::vector<int> hooks;
        for (size_t j = 0; j < g.edges.size(); ++j)
            if (g.edges[j].first == v || g.edges[j].second == v) hooks.push_back((int)j);
        for (int mask = 0; mask < (1 << hooks.size()); ++mask) {
            auto edges = g.edges;
            for (size_t h = 0; h < hooks.size(); ++h)
                if (mask >> h & 1) {
                    auto& e = edges[hooks[h]];
                    (e.first == v ? e.first : e.second) = B;
                }
            Scalar coeff = v < g.n || marked ? Scalar(-1) : Scalar(-1) / 2;
            emit(edges, v, base.marks, coeff);
            if (marked && v < g.n) {
                auto marks = base.marks;
                *std::find(marks.begin(), marks.end(), v) = B;
                emit(edges, v, marks, coeff);
            }
        }
        emit(g.edges, v, base.marks, Scalar(1)); // fresh black leaf on v
    }
    return out;
}

inline LinComb<DGraph> dgraph_twisted_differential(const LinComb<DGraph>& a) {
    LinComb<DGraph> out;
    for (const auto& [g, c] : a) add_scaled(out, dgraph_twisted_differential(g), c);
    return out;
}

// all mark-decorated simple graphs with the given vertex counts, edge count
// and total number of marks, up to black relabelling
inline std::vector<DGraph> enumerate_dgraphs(int n, int k, int e, int marks) {
    std::vector<DGraph> out;
    int m = n + k;
    if (m < 0 || e < 0 || marks < 0 || marks > m) return out;
    std::vector<int> msel(m, 0);
    std::fill(msel.begin(), msel.begin() + marks, 1);
    std::sort(msel.begin(), msel.end());
    do {
        for (const auto& plain : enumerate_sgraphs(n, k, e)) {
            RawDGraph raw{n, k, plain.edges, {}};
            for (int v = 0; v < m; ++v)
                if (msel[v]) raw.marks.push_back(v);
            if (auto c = dgraph_canonicalize(raw)) out.push_back(c->first);
        }
    } while (std::next_permutation(msel.begin(), msel.end()));
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

} // namespace mcx

#endif
