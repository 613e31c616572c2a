#ifndef MCX_INFTY_MORPHISM_HPP
#define MCX_INFTY_MORPHISM_HPP

#include <mcx/linfty.hpp>

namespace mcx {

/*
 * Morphism of curved symmetric homotopy structures: a family of degree-0
 * symmetric maps f_n from tuples over the source module into the target
 * module, with the arity-0 component stored under the empty tuple.
 */
struct InftyMorphism {
    CurvedLInftyAlgebra source, target;
    std::vector<MultiMap> comp; // arity 0..arity_cap of the source module

    SparseVec constant_term() const {
        if (comp.empty()) return {};
        auto it = comp[0].find(KeyTuple{});
        return it == comp[0].end() ? SparseVec{} : it->second;
    }
};

inline void validate_morphism(const InftyMorphism& f) {
    validate_linfty(f.source);
    validate_linfty(f.target);
    const auto& src = *f.source.module;
    const auto& tgt = *f.target.module;
    if ((int)f.comp.size() != src.arity_cap + 1)
        throw std::invalid_argument("component table must cover arities 0..arity_cap");
    for (int n = 0; n <= src.arity_cap; ++n)
        for (const auto& [t, v] : f.comp[n]) {
            if ((int)t.size() != n) throw std::invalid_argument("tuple arity mismatch");
            if (!std::is_sorted(t.begin(), t.end()))
                throw std::invalid_argument("symmetric component keyed on an unsorted tuple");
            for (size_t i = 1; i < t.size(); ++i)
                if (t[i] == t[i - 1] && (src.degree[t[i]] & 1))
                    throw std::invalid_argument(
                        "nonzero value on a repeated odd generator (forced to vanish)");
            int din = tuple_degree(src, t), win = tuple_weight(src, t);
            for (const auto& [g, c] : v) {
                if (tgt.degree[g] != din)
                    throw std::invalid_argument("morphism component is not degree 0");
                if (tgt.weight[g] < win || (n == 0 && tgt.weight[g] < 1))
                    throw std::invalid_argument("morphism component violates the filtration");
                if (tgt.weight[g] > tgt.truncation_weight)
                    throw std::invalid_argument("morphism component above the weight cap");
            }
        }
}

namespace detail {

// All set partitions of {0,...,n-1}, blocks listed by smallest element.
template <class Body>
inline void for_each_partition(int n, Body&& body) {
    std::vector<std::vector<int>> blocks;
    auto rec = [&](auto&& self, int i) -> void {
        if (i == n) {
            body((const std::vector<std::vector<int>>&)blocks);
            return;
        }
        // index loop: the recursive call appends to blocks and may reallocate
        size_t k = blocks.size();
        for (size_t bi = 0; bi < k; ++bi) {
            blocks[bi].push_back(i);
            self(self, i + 1);
            blocks[bi].pop_back();
        }
        blocks.push_back({i});
        self(self, i + 1);
        blocks.pop_back();
    };
    rec(rec, 0);
}

/*
 * Composite evaluation shared by the morphism checker and composition:
 *   sum over set partitions of the inputs and over j >= 0 of
 *   1/j! * outer_{m+j}( f_0^j, f_{|B_1|}(t_{B_1}), ..., f_{|B_m|}(t_{B_m}) )
 * with the Koszul sign of unshuffling t into the blocks. The outer family
 * takes inputs in the middle module `mid`; the f-components take inputs in
 * `src` and land in `mid`.
 */
inline SparseVec compose_eval(const GradedModuleSpec& src, const GradedModuleSpec& mid,
                              const std::vector<MultiMap>& fcomp,
                              const std::vector<MultiMap>& outer, const KeyTuple& t) {
    int n = (int)t.size();
    SparseVec f0;
    if (!fcomp.empty()) {
        auto it = fcomp[0].find(KeyTuple{});
        if (it != fcomp[0].end()) f0 = it->second;
    }
    SparseVec out;
    for_each_partition(n, [&](const std::vector<std::vector<int>>& blocks) {
        int m = (int)blocks.size();
        std::vector<int> order;
        std::vector<SparseVec> vals;
        for (const auto& b : blocks) {
            if ((int)b.size() >= (int)fcomp.size()) return;
            KeyTuple bt;
            for (int i : b) bt.push_back(t[(size_t)i]);
            SparseVec v = eval_sym(src, fcomp[(size_t)b.size()], bt);
            if (v.empty()) return;
            vals.push_back(std::move(v));
            order.insert(order.end(), b.begin(), b.end());
        }
        Scalar base(koszul_perm_sign(src, t, order));
        for (int j = 0; m + j < (int)outer.size(); ++j) {
            if (j > 0 && f0.empty()) break;
            std::vector<const SparseVec*> slots;
            for (int k = 0; k < j; ++k) slots.push_back(&f0);
            for (const auto& v : vals) slots.push_back(&v);
            Scalar coeff = base / factorial(j);
            // multilinear expansion over the middle module
            KeyTuple key;
            auto rec = [&](auto&& self, size_t pos, int wt, Scalar c) -> void {
                if (pos == slots.size()) {
                    SparseVec v = eval_sym(mid, outer[(size_t)(m + j)], key);
                    add_scaled(out, v, c);
                    return;
                }
                for (const auto& [g, x] : *slots[pos]) {
                    if (wt + mid.weight[g] > mid.truncation_weight) continue;
                    key.push_back(g);
                    self(self, pos + 1, wt + mid.weight[g], c * x);
                    key.pop_back();
                }
            };
            rec(rec, 0, 0, coeff);
        }
    });
    return out;
}

} // namespace detail

/*
 * Residual of the defining equation on one sorted source tuple:
 *   sum_S +/- f( alpha_{|S|}(t_S), t_rest )  -  (beta-side composite above).
 * Zero on the whole window exactly when f is a morphism.
 */
inline SparseVec morphism_residual(const InftyMorphism& f, const KeyTuple& t) {
    const auto& src = *f.source.module;
    const auto& tgt = *f.target.module;
    int n = (int)t.size();
    SparseVec out;
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
        int q = __builtin_popcount(mask);
        if (q >= (int)f.source.maps.size() || n - q + 1 >= (int)f.comp.size()) continue;
        KeyTuple inner, rest;
        std::vector<char> sel(n, 0);
        for (int i = 0; i < n; ++i)
            ((mask >> i) & 1 ? (sel[i] = 1, inner) : rest).push_back(t[i]);
        auto it = f.source.maps[(size_t)q].find(inner);
        if (it == f.source.maps[(size_t)q].end()) continue;
        int sgn = front_sign(src, t, sel);
        for (const auto& [g, c] : it->second) {
            KeyTuple arg{g};
            arg.insert(arg.end(), rest.begin(), rest.end());
            SparseVec v = eval_sym(src, f.comp[(size_t)(n - q + 1)], arg);
            add_scaled(out, v, sgn > 0 ? c : -c);
        }
    }
    SparseVec rhs = detail::compose_eval(src, tgt, f.comp, f.target.maps, t);
    add_scaled(out, rhs, Scalar(-1));
    weight_truncate(tgt, out);
    return out;
}

inline RelationReport check_infty_morphism(const InftyMorphism& f) {
    RelationReport rep;
    for (int n = 0; n <= f.source.module->arity_cap; ++n) {
        long cnt = 0;
        for_each_sorted_tuple(*f.source.module, n, [&](const KeyTuple& t) {
            cnt += (long)morphism_residual(f, t).size();
        });
        rep.record(n, cnt);
    }
    return rep;
}

inline InftyMorphism identity_morphism(const CurvedLInftyAlgebra& A) {
    InftyMorphism f{A, A, std::vector<MultiMap>((size_t)A.module->arity_cap + 1)};
    for (int g = 0; g < (int)A.module->dim(); ++g)
        f.comp[1][KeyTuple{g}] = SparseVec{{g, Scalar(1)}};
    return f;
}

inline InftyMorphism infty_compose(const InftyMorphism& g, const InftyMorphism& f) {
    if (!(f.target == g.source)) throw SourceTargetMismatch();
    const auto& src = *f.source.module;
    InftyMorphism out{f.source, g.target,
                      std::vector<MultiMap>((size_t)src.arity_cap + 1)};
    for (int n = 0; n <= src.arity_cap; ++n)
        for_each_sorted_tuple(src, n, [&](const KeyTuple& t) {
            SparseVec v = detail::compose_eval(src, *f.target.module, f.comp, g.comp, t);
            weight_truncate(*g.target.module, v);
            if (!v.empty()) out.comp[(size_t)n][t] = std::move(v);
        });
    return out;
}

// f(a) = sum_k 1/k! f_k(a, ..., a)
inline SparseVec morphism_apply(const InftyMorphism& f, const SparseVec& a) {
    const auto& src = *f.source.module;
    detail::require_twistable(src, a, 0);
    SparseVec out;
    KeyTuple key;
    auto rec = [&](auto&& self, int k, int wt, Scalar coeff) -> void {
        if (k >= (int)f.comp.size()) return;
        SparseVec v = eval_sym(src, f.comp[(size_t)k], key);
        add_scaled(out, v, coeff / factorial(k));
        for (const auto& [g, c] : a) {
            if (wt + src.weight[g] > src.truncation_weight) continue;
            key.push_back(g);
            self(self, k + 1, wt + src.weight[g], coeff * c);
            key.pop_back();
        }
    };
    rec(rec, 0, 0, Scalar(1));
    weight_truncate(*f.target.module, out);
    return out;
}

/*
 * Twist a morphism by a weight-positive degree-0 element of its source.
 * Components f^a_n = sum_k 1/k! f_{k+n}(a^k, -), constant term dropped;
 * the new source is twisted by a, the new target by b = f(a). The arity-0
 * consequence of the defining equation (the twisted target curvature must
 * equal sum_k 1/k! f_{k+1}(a^k, twisted source curvature)) is rechecked
 * here, which catches inputs that were not morphisms to begin with.
 */
inline std::pair<InftyMorphism, SparseVec> twist_morphism(const InftyMorphism& f,
                                                          const SparseVec& a) {
    const auto& src = *f.source.module;
    detail::require_twistable(src, a, 0);
    SparseVec b = morphism_apply(f, a);
    InftyMorphism out{twist_linfty(f.source, a), twist_linfty(f.target, b),
                      std::vector<MultiMap>((size_t)src.arity_cap + 1)};
    for (int n = 1; n <= src.arity_cap; ++n)
        for_each_sorted_tuple(src, n, [&](const KeyTuple& t) {
            SparseVec acc;
            KeyTuple key = t;
            auto rec = [&](auto&& self, int k, int wt, Scalar coeff) -> void {
                if (n + k >= (int)f.comp.size()) return;
                SparseVec v = eval_sym(src, f.comp[(size_t)(n + k)], key);
                add_scaled(acc, v, coeff / factorial(k));
                for (const auto& [g, c] : a) {
                    if (wt + src.weight[g] > src.truncation_weight) continue;
                    key.push_back(g);
                    self(self, k + 1, wt + src.weight[g], coeff * c);
                    key.pop_back();
                }
            };
            rec(rec, 0, tuple_weight(src, t), Scalar(1));
            weight_truncate(*f.target.module, acc);
            if (!acc.empty()) out.comp[(size_t)n][t] = std::move(acc);
        });

    SparseVec want = out.target.curvature();
    SparseVec got;
    for (const auto& [g, c] : out.source.curvature()) {
        SparseVec v = eval_sym(src, out.comp[1], KeyTuple{g});
        add_scaled(got, v, c);
    }
    add_scaled(got, want, Scalar(-1));
    if (!got.empty()) throw std::invalid_argument("input does not satisfy the morphism equation");
    return {std::move(out), std::move(b)};
}

/*
 * Composition in the category whose morphisms are pairs (b, f) of a
 * weight-positive element b of the target and a morphism f landing in the
 * twist by b:  (c, g) after (b, f)  =  ( c + g(b), (g^b - g(b)) after f ).
 */
inline std::pair<SparseVec, InftyMorphism> dolgushev_rogers_compose(const SparseVec& c,
                                                                    const InftyMorphism& g,
                                                                    const SparseVec& b,
                                                                    const InftyMorphism& f) {
    if (!f.constant_term().empty() || !g.constant_term().empty())
        throw std::invalid_argument("pair morphisms carry their constants separately");
    CurvedLInftyAlgebra shifted_src = twist_linfty(g.source, b);
    if (!(f.target == shifted_src)) throw SourceTargetMismatch();
    auto [gb, g_of_b] = twist_morphism(g, b);
    InftyMorphism comp = infty_compose(gb, f);
    SparseVec cc = c;
    add_scaled(cc, g_of_b, Scalar(1));
    weight_truncate(*g.target.module, cc);
    return {std::move(cc), std::move(comp)};
}

} // namespace mcx

#endif
