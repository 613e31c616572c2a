#ifndef MCX_LINFTY_HPP
#define MCX_LINFTY_HPP

#include <mcx/ainfty.hpp>

namespace mcx {

// Symmetric-operations analogue: only the shifted flavors exist here, so
// every l_n has degree -1 and the defining relations are sign-free apart
// from Koszul signs of shuffling inputs around.
enum class LiVariant { ShiftedCurved, Shifted };

inline bool li_curved(LiVariant v) { return v == LiVariant::ShiftedCurved; }

inline LiVariant li_variant_from_string(const std::string& s) {
    if (s == "shifted-curved") return LiVariant::ShiftedCurved;
    if (s == "shifted") return LiVariant::Shifted;
    throw std::invalid_argument("unknown variant " + s);
}

inline std::string li_variant_to_string(LiVariant v) {
    return li_curved(v) ? "shifted-curved" : "shifted";
}

struct CurvedLInftyAlgebra {
    ModulePtr module;
    LiVariant variant = LiVariant::Shifted;
    std::vector<MultiMap> maps; // arity 0..arity_cap, keyed on sorted tuples

    const SparseVec curvature() const {
        if (maps.empty()) return {};
        auto it = maps[0].find(KeyTuple{});
        return it == maps[0].end() ? SparseVec{} : it->second;
    }

    friend bool operator==(const CurvedLInftyAlgebra& a, const CurvedLInftyAlgebra& b) {
        return a.variant == b.variant && a.module->names == b.module->names &&
               a.module->degree == b.module->degree && a.module->weight == b.module->weight &&
               a.maps == b.maps;
    }
};

inline void validate_linfty(const CurvedLInftyAlgebra& A) {
    validate_module(A.module);
    const auto& m = *A.module;
    if ((int)A.maps.size() != m.arity_cap + 1)
        throw std::invalid_argument("map table must cover arities 0..arity_cap");
    if (!li_curved(A.variant) && !A.maps[0].empty())
        throw std::invalid_argument("uncurved variant with a nonzero arity-0 component");
    for (int n = 0; n <= m.arity_cap; ++n)
        for (const auto& [t, v] : A.maps[n]) {
            if ((int)t.size() != n) throw std::invalid_argument("tuple arity mismatch");
            if (!std::is_sorted(t.begin(), t.end()))
                throw std::invalid_argument("symmetric map keyed on an unsorted tuple");
            for (size_t i = 1; i < t.size(); ++i)
                if (t[i] == t[i - 1] && (m.degree[t[i]] & 1))
                    throw std::invalid_argument(
                        "nonzero value on a repeated odd generator (forced to vanish)");
            int din = tuple_degree(m, t), win = tuple_weight(m, t);
            for (const auto& [g, c] : v) {
                if (m.degree[g] != din - 1)
                    throw std::invalid_argument("structure map entry is not degree-homogeneous");
                if (m.weight[g] < win)
                    throw std::invalid_argument("structure map entry decreases weight");
                if (m.weight[g] > m.truncation_weight)
                    throw std::invalid_argument("structure map entry above the weight cap");
            }
        }
}

/*
 * Square of the structure element on one sorted basis tuple:
 *   sum over subsets S of  +/- l_{n-|S|+1}( l_{|S|}(t_S), t_rest )
 * where the sign moves the entries of S to the front. Vanishing for every
 * tuple in the window is the curved relation list.
 */
inline SparseVec li_relation_residual(const CurvedLInftyAlgebra& A, const KeyTuple& t) {
    const auto& m = *A.module;
    int n = (int)t.size();
    SparseVec out;
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
        int q = __builtin_popcount(mask);
        if (q > m.arity_cap || n - q + 1 > m.arity_cap) continue;
        KeyTuple inner, rest;
        std::vector<char> sel(n, 0);
        for (int i = 0; i < n; ++i)
            ((mask >> i) & 1 ? (sel[i] = 1, inner) : rest).push_back(t[i]);
        auto it = A.maps[(size_t)q].find(inner); // subsequence of sorted stays sorted
        if (it == A.maps[(size_t)q].end()) continue;
        int sgn = front_sign(m, t, sel);
        for (const auto& [g, c] : it->second) {
            KeyTuple outer{g};
            outer.insert(outer.end(), rest.begin(), rest.end());
            SparseVec v = eval_sym(m, A.maps[(size_t)(n - q + 1)], outer);
            add_scaled(out, v, sgn > 0 ? c : -c);
        }
    }
    weight_truncate(m, out);
    return out;
}

inline RelationReport check_curved_linfty(const CurvedLInftyAlgebra& A) {
    RelationReport rep;
    for (int n = 0; n <= A.module->arity_cap; ++n) {
        long cnt = 0;
        for_each_sorted_tuple(*A.module, n, [&](const KeyTuple& t) {
            cnt += (long)li_relation_residual(A, t).size();
        });
        rep.record(n, cnt);
    }
    return rep;
}

// l_n^a = sum_k 1/k! l_{k+n}(a^k, -, ..., -); a has degree 0 so no signs
inline CurvedLInftyAlgebra twist_linfty(const CurvedLInftyAlgebra& A, const SparseVec& a) {
    const auto& m = *A.module;
    detail::require_twistable(m, a, 0);
    // a non-MC direction creates curvature, so the result lives in the
    // curved flavor even when the input did not
    CurvedLInftyAlgebra out{A.module, LiVariant::ShiftedCurved,
                            std::vector<MultiMap>((size_t)m.arity_cap + 1)};
    for (int n = 0; n <= m.arity_cap; ++n) {
        for_each_sorted_tuple(m, n, [&](const KeyTuple& t) {
            SparseVec acc;
            KeyTuple key = t;
            auto rec = [&](auto&& self, int k, int wt, Scalar coeff) -> void {
                if (n + k <= m.arity_cap) {
                    SparseVec v = eval_sym(m, A.maps[(size_t)(n + k)], key);
                    add_scaled(acc, v, coeff / factorial(k));
                } else {
                    return;
                }
                for (const auto& [g, c] : a) {
                    if (wt + m.weight[g] > m.truncation_weight) continue;
                    key.push_back(g);
                    self(self, k + 1, wt + m.weight[g], coeff * c);
                    key.pop_back();
                }
            };
            rec(rec, 0, tuple_weight(m, t), Scalar(1));
            weight_truncate(m, acc);
            if (!acc.empty()) out.maps[(size_t)n][t] = std::move(acc);
        });
    }
    return out;
}

// twisted curvature sum_k 1/k! l_k(a^k); zero exactly for Maurer-Cartan a
inline SparseVec mc_residual_linfty(const CurvedLInftyAlgebra& A, const SparseVec& a) {
    const auto& m = *A.module;
    detail::require_twistable(m, a, 0);
    SparseVec out;
    KeyTuple key;
    auto rec = [&](auto&& self, int k, int wt, Scalar coeff) -> void {
        if (k > m.arity_cap) return;
        SparseVec v = eval_sym(m, A.maps[(size_t)k], key);
        add_scaled(out, v, coeff / factorial(k));
        for (const auto& [g, c] : a) {
            if (wt + m.weight[g] > m.truncation_weight) continue;
            key.push_back(g);
            self(self, k + 1, wt + m.weight[g], coeff * c);
            key.pop_back();
        }
    };
    rec(rec, 0, 0, Scalar(1));
    weight_truncate(m, out);
    return out;
}

inline bool li_twist_additivity_check(const CurvedLInftyAlgebra& A, const SparseVec& a,
                                      const SparseVec& b) {
    SparseVec ab = a;
    add_scaled(ab, b, Scalar(1));
    CurvedLInftyAlgebra lhs = twist_linfty(twist_linfty(A, a), b);
    CurvedLInftyAlgebra rhs = twist_linfty(A, ab);
    detail::normalize_maps(lhs.maps);
    detail::normalize_maps(rhs.maps);
    return lhs == rhs;
}

namespace detail {

// Koszul sign of reading the entries of t in the given position order
inline int koszul_perm_sign(const GradedModuleSpec& m, const KeyTuple& t,
                            const std::vector<int>& order) {
    int parity = 0;
    for (size_t i = 0; i < order.size(); ++i)
        for (size_t j = i + 1; j < order.size(); ++j)
            if (order[i] > order[j] && (m.degree[t[(size_t)order[i]]] & 1) &&
                (m.degree[t[(size_t)order[j]]] & 1))
                parity ^= 1;
    return parity ? -1 : 1;
}

} // namespace detail

/*
 * Symmetrisation l_n = sum over all permutations of m_n, with Koszul signs.
 * Only meaningful for the shifted flavors; classical input is carried
 * through the suspension dictionary first, which turns the sgn(sigma)
 * antisymmetrisation into the plain symmetrisation below.
 */
inline CurvedLInftyAlgebra symmetrize(const CurvedAInftyAlgebra& Ain) {
    CurvedAInftyAlgebra A = ai_shifted(Ain.variant) ? Ain : suspend_ainfty(Ain);
    const auto& m = *A.module;
    CurvedLInftyAlgebra out{A.module,
                            ai_curved(A.variant) ? LiVariant::ShiftedCurved : LiVariant::Shifted,
                            std::vector<MultiMap>((size_t)m.arity_cap + 1)};
    for (int n = 0; n <= m.arity_cap; ++n) {
        for_each_sorted_tuple(m, n, [&](const KeyTuple& t) {
            SparseVec acc;
            std::vector<int> order(t.size());
            for (size_t i = 0; i < t.size(); ++i) order[i] = (int)i;
            do {
                KeyTuple perm(t.size());
                for (size_t i = 0; i < t.size(); ++i) perm[i] = t[(size_t)order[i]];
                auto it = A.maps[(size_t)n].find(perm);
                if (it == A.maps[(size_t)n].end()) continue;
                add_scaled(acc, it->second,
                           Scalar(detail::koszul_perm_sign(m, t, order)));
            } while (std::next_permutation(order.begin(), order.end()));
            weight_truncate(m, acc);
            if (!acc.empty()) out.maps[(size_t)n][t] = std::move(acc);
        });
    }
    return out;
}

inline CurvedLInftyAlgebra linfty_from_json(const nlohmann::json& j, int truncation_weight,
                                            int arity_cap) {
    CurvedLInftyAlgebra A;
    A.module = module_from_json(j, truncation_weight, arity_cap);
    A.variant = li_variant_from_string(j.at("variant").get<std::string>());
    A.maps.assign((size_t)arity_cap + 1, {});
    for (const auto& e : j.at("maps")) {
        int n = e.at("arity").get<int>();
        if (n < 0 || n > arity_cap) throw std::invalid_argument("map arity out of range");
        KeyTuple t;
        for (const auto& s : e.at("inputs")) t.push_back(A.module->index.at(s.get<std::string>()));
        auto sg = sort_sign(*A.module, t);
        SparseVec v = module_lincomb_from_json(e.at("output"), *A.module);
        if (!sg) {
            if (!v.empty())
                throw std::invalid_argument("nonzero value on a repeated odd generator");
            continue;
        }
        for (const auto& [g, c] : v) {
            Scalar& slot = A.maps[(size_t)n][t][g];
            slot += (*sg > 0) ? c : -c;
            if (slot == 0) A.maps[(size_t)n][t].erase(g);
        }
    }
    detail::normalize_maps(A.maps);
    validate_linfty(A);
    return A;
}

inline nlohmann::json linfty_to_json(const CurvedLInftyAlgebra& A) {
    nlohmann::json j = module_to_json(*A.module);
    j["variant"] = li_variant_to_string(A.variant);
    nlohmann::json maps = nlohmann::json::array();
    for (size_t n = 0; n < A.maps.size(); ++n)
        for (const auto& [t, v] : A.maps[n]) {
            nlohmann::json ins = nlohmann::json::array();
            for (int i : t) ins.push_back(A.module->names[(size_t)i]);
            maps.push_back({{"arity", (int)n},
                            {"inputs", ins},
                            {"output", module_lincomb_to_json(v, *A.module)}});
        }
    j["maps"] = maps;
    return j;
}

} // namespace mcx

#endif
