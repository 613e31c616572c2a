#ifndef MCX_AINFTY_HPP
#define MCX_AINFTY_HPP

#include <mcx/algebra.hpp>
#include <mcx/graded_module.hpp>

namespace mcx {

/*
 * The four flavors of curved A-infinity structure. "Classical" operations
 * m_n have degree n-2 and the relations carry the (-1)^{pq+r} signs;
 * "shifted" operations all have degree -1 and the relations are sign-free
 * apart from Koszul evaluation signs. Curved flavors allow an arity-0
 * component (the curvature), uncurved ones force it to vanish.
 */
enum class AiVariant { ClassicalCurved, Classical, ShiftedCurved, Shifted };

inline bool ai_shifted(AiVariant v) {
    return v == AiVariant::ShiftedCurved || v == AiVariant::Shifted;
}
inline bool ai_curved(AiVariant v) {
    return v == AiVariant::ClassicalCurved || v == AiVariant::ShiftedCurved;
}
inline int ai_map_degree(AiVariant v, int arity) { return ai_shifted(v) ? -1 : arity - 2; }
// degree of an admissible twisting element (arity-0 gauge direction)
inline int ai_twist_degree(AiVariant v) { return ai_shifted(v) ? 0 : -1; }

inline AiVariant ai_variant_from_string(const std::string& s) {
    if (s == "classical-curved") return AiVariant::ClassicalCurved;
    if (s == "classical") return AiVariant::Classical;
    if (s == "shifted-curved") return AiVariant::ShiftedCurved;
    if (s == "shifted") return AiVariant::Shifted;
    throw std::invalid_argument("unknown variant " + s);
}

inline std::string ai_variant_to_string(AiVariant v) {
    switch (v) {
        case AiVariant::ClassicalCurved: return "classical-curved";
        case AiVariant::Classical: return "classical";
        case AiVariant::ShiftedCurved: return "shifted-curved";
        default: return "shifted";
    }
}

struct CurvedAInftyAlgebra {
    ModulePtr module;
    AiVariant variant = AiVariant::Shifted;
    std::vector<MultiMap> maps; // arity 0 .. module->arity_cap; higher arities are zero

    const SparseVec curvature() const {
        if (maps.empty()) return {};
        auto it = maps[0].find(KeyTuple{});
        return it == maps[0].end() ? SparseVec{} : it->second;
    }

    friend bool operator==(const CurvedAInftyAlgebra& a, const CurvedAInftyAlgebra& b) {
        return a.variant == b.variant && a.module->names == b.module->names &&
               a.module->degree == b.module->degree && a.module->weight == b.module->weight &&
               a.maps == b.maps;
    }
};

namespace detail {

inline void normalize_maps(std::vector<MultiMap>& maps) {
    for (auto& f : maps)
        for (auto it = f.begin(); it != f.end();)
            it = it->second.empty() ? f.erase(it) : std::next(it);
}

} // namespace detail

inline void validate_ainfty(const CurvedAInftyAlgebra& A) {
    validate_module(A.module);
    const auto& m = *A.module;
    if ((int)A.maps.size() != m.arity_cap + 1)
        throw std::invalid_argument("map table must cover arities 0..arity_cap");
    if (!ai_curved(A.variant) && !A.maps[0].empty())
        throw std::invalid_argument("uncurved variant with a nonzero arity-0 component");
    for (int n = 0; n <= m.arity_cap; ++n)
        for (const auto& [t, v] : A.maps[n]) {
            if ((int)t.size() != n) throw std::invalid_argument("tuple arity mismatch");
            int din = tuple_degree(m, t), win = tuple_weight(m, t);
            for (const auto& [g, c] : v) {
                if (m.degree[g] != din + ai_map_degree(A.variant, n))
                    throw std::invalid_argument("structure map entry is not degree-homogeneous");
                if (m.weight[g] < win)
                    throw std::invalid_argument("structure map entry decreases weight");
                if (m.weight[g] > m.truncation_weight)
                    throw std::invalid_argument("structure map entry above the weight cap");
            }
        }
}

/*
 * Residual of the structure relation of arity n on one basis tuple:
 *   sum over p+q+r=n of  s(p,q,r) . m_{p+1+r} o_{p+1} m_q
 * with s = (-1)^{pq+r} for the classical flavors and s = +1 for the shifted
 * ones; the insertion itself contributes the Koszul sign of moving the inner
 * map past the first p inputs.
 */
inline SparseVec ai_relation_residual(const CurvedAInftyAlgebra& A, const KeyTuple& t) {
    const auto& m = *A.module;
    int n = (int)t.size();
    SparseVec out;
    for (int p = 0; p <= n; ++p) {
        int dpre = tuple_degree(m, KeyTuple(t.begin(), t.begin() + p));
        for (int q = 0; p + q <= n; ++q) {
            int r = n - p - q;
            if (q > m.arity_cap || p + 1 + r > m.arity_cap) continue;
            KeyTuple inner(t.begin() + p, t.begin() + p + q);
            auto it = A.maps[q].find(inner);
            if (it == A.maps[q].end()) continue;
            int parity = (ai_map_degree(A.variant, q) & 1) ? (dpre & 1) : 0;
            if (!ai_shifted(A.variant)) parity ^= (p * q + r) & 1;
            KeyTuple key(t.begin(), t.begin() + p);
            key.push_back(0);
            key.insert(key.end(), t.begin() + p + q, t.end());
            for (const auto& [g, c] : it->second) {
                key[p] = g;
                auto jt = A.maps[p + 1 + r].find(key);
                if (jt == A.maps[p + 1 + r].end()) continue;
                add_scaled(out, jt->second, parity ? -c : c);
            }
        }
    }
    weight_truncate(m, out);
    return out;
}

inline RelationReport check_curved_ainfty(const CurvedAInftyAlgebra& A) {
    RelationReport rep;
    for (int n = 0; n <= A.module->arity_cap; ++n) {
        long cnt = 0;
        for_each_tuple(*A.module, n,
                       [&](const KeyTuple& t) { cnt += (long)ai_relation_residual(A, t).size(); });
        rep.record(n, cnt);
    }
    return rep;
}

namespace detail {

inline void require_twistable(const GradedModuleSpec& m, const SparseVec& a, int deg) {
    for (const auto& [i, c] : a) {
        if (m.degree[i] != deg)
            throw std::invalid_argument("twisting element has a wrong-degree component");
        if (m.weight[i] < 1) throw WeightZeroTwist();
    }
}

} // namespace detail

/*
 * Twist by an arity-0 gauge direction a:
 *   m_n^a = sum over insertions of copies of a between the inputs, with the
 *   sign (-1)^{sum k.r_k} in the classical flavors (r_k copies of a after
 *   the k-th input) times the Koszul signs of sliding each copy of a into
 *   place; the shifted flavors are sign-free since a has degree 0.
 */
inline CurvedAInftyAlgebra twist_ainfty(const CurvedAInftyAlgebra& A, const SparseVec& a) {
    const auto& m = *A.module;
    detail::require_twistable(m, a, ai_twist_degree(A.variant));
    bool odd_a = !ai_shifted(A.variant); // a has odd degree exactly in the classical flavors
    // a non-MC direction creates curvature, so the result lives in the
    // curved flavor even when the input did not
    AiVariant out_variant =
        ai_shifted(A.variant) ? AiVariant::ShiftedCurved : AiVariant::ClassicalCurved;
    CurvedAInftyAlgebra out{A.module, out_variant,
                            std::vector<MultiMap>((size_t)m.arity_cap + 1)};
    for (int n = 0; n <= m.arity_cap; ++n) {
        for_each_tuple(m, n, [&](const KeyTuple& t) {
            std::vector<int> dpre(n + 1, 0); // degree of t[0..k-1], mod 2
            for (int k = 0; k < n; ++k) dpre[k + 1] = (dpre[k] + m.degree[t[k]]) & 1;
            SparseVec acc;
            KeyTuple key;
            auto rec = [&](auto&& self, int k, int wt, Scalar coeff, int parity) -> void {
                if ((int)key.size() > m.arity_cap) return;
                if (k == n) {
                    auto it = A.maps[key.size()].find(key);
                    if (it != A.maps[key.size()].end())
                        add_scaled(acc, it->second, parity ? -coeff : coeff);
                }
                // insert one more copy of a into the current gap
                for (const auto& [g, c] : a) {
                    if (wt + m.weight[g] > m.truncation_weight) continue;
                    key.push_back(g);
                    int extra = odd_a ? (k + dpre[k]) & 1 : 0;
                    self(self, k, wt + m.weight[g], coeff * c, parity ^ extra);
                    key.pop_back();
                }
                if (k < n) {
                    key.push_back(t[k]);
                    self(self, k + 1, wt, coeff, parity);
                    key.pop_back();
                }
            };
            // gaps are filled right-to-left within the recursion ordering
            // above; order within a gap is irrelevant (copies of a commute
            // past each other without extra signs)
            rec(rec, 0, tuple_weight(m, t), Scalar(1), 0);
            weight_truncate(m, acc);
            if (!acc.empty()) out.maps[(size_t)n][t] = std::move(acc);
        });
    }
    return out;
}

// Curvature of the twisted structure: theta + d(a) + m_2(a,a) + ...
inline SparseVec mc_residual_ainfty(const CurvedAInftyAlgebra& A, const SparseVec& a) {
    const auto& m = *A.module;
    detail::require_twistable(m, a, ai_twist_degree(A.variant));
    SparseVec out;
    KeyTuple key;
    auto rec = [&](auto&& self, int wt, Scalar coeff) -> void {
        auto it = A.maps[key.size()].find(key);
        if (it != A.maps[key.size()].end()) add_scaled(out, it->second, coeff);
        if ((int)key.size() == m.arity_cap) return;
        for (const auto& [g, c] : a) {
            if (wt + m.weight[g] > m.truncation_weight) continue;
            key.push_back(g);
            self(self, wt + m.weight[g], coeff * c);
            key.pop_back();
        }
    };
    rec(rec, 0, Scalar(1));
    weight_truncate(m, out);
    return out;
}

inline bool twist_additivity_check(const CurvedAInftyAlgebra& A, const SparseVec& a,
                                   const SparseVec& b) {
    SparseVec ab = a;
    add_scaled(ab, b, Scalar(1));
    CurvedAInftyAlgebra lhs = twist_ainfty(twist_ainfty(A, a), b);
    CurvedAInftyAlgebra rhs = twist_ainfty(A, ab);
    detail::normalize_maps(lhs.maps);
    detail::normalize_maps(rhs.maps);
    return lhs == rhs;
}

namespace detail {

// parity of the suspension sign sum_i (n-i).|x_i| + n(n-1)/2, computed with
// the degrees of the classical-side (lower) module
inline int suspension_parity(const GradedModuleSpec& lower, const KeyTuple& t) {
    int n = (int)t.size();
    int parity = (n * (n - 1) / 2) & 1;
    for (int i = 0; i < n; ++i)
        if ((n - 1 - i) & 1 && lower.degree[t[i]] & 1) parity ^= 1;
    return parity;
}

inline CurvedAInftyAlgebra transport_ainfty(const CurvedAInftyAlgebra& A, int shift,
                                            AiVariant new_variant) {
    auto mod = std::make_shared<GradedModuleSpec>(*A.module);
    for (auto& d : mod->degree) d += shift;
    const GradedModuleSpec& lower = (shift > 0) ? *A.module : *mod;
    CurvedAInftyAlgebra out{mod, new_variant, std::vector<MultiMap>(A.maps.size())};
    for (size_t n = 0; n < A.maps.size(); ++n)
        for (const auto& [t, v] : A.maps[n]) {
            SparseVec w;
            add_scaled(w, v, suspension_parity(lower, t) ? Scalar(-1) : Scalar(1));
            out.maps[n][t] = std::move(w);
        }
    return out;
}

} // namespace detail

// Dictionary between the classical and shifted flavors: the shifted
// structure lives on the suspension (all degrees raised by one) with
// m'_n(sx_1,...,sx_n) = (-1)^{sum (n-i)|x_i| + n(n-1)/2} s.m_n(x_1,...,x_n).
inline CurvedAInftyAlgebra suspend_ainfty(const CurvedAInftyAlgebra& A) {
    if (ai_shifted(A.variant)) throw std::invalid_argument("already in the shifted flavor");
    return detail::transport_ainfty(
        A, +1,
        A.variant == AiVariant::ClassicalCurved ? AiVariant::ShiftedCurved : AiVariant::Shifted);
}

inline CurvedAInftyAlgebra desuspend_ainfty(const CurvedAInftyAlgebra& A) {
    if (!ai_shifted(A.variant)) throw std::invalid_argument("already in the classical flavor");
    return detail::transport_ainfty(
        A, -1,
        A.variant == AiVariant::ShiftedCurved ? AiVariant::ClassicalCurved : AiVariant::Classical);
}

/*
 * Arity-indexed family of maps of one homogeneous degree, viewed as an
 * element of the convolution algebra hom(C, end_A). The star product below
 * is insertion at every slot, with the cooperad signs in the classical
 * flavors; it is the product under which structures are square-zero
 * elements and the trivialization recursion runs.
 */
struct ConvolutionElement {
    ModulePtr module;
    AiVariant variant = AiVariant::Shifted;
    int cdeg = 0; // degree as a convolution-algebra element
    std::vector<MultiMap> comp;

    // actual degree of the arity-n component as a multilinear map
    int map_degree(int n) const { return ai_shifted(variant) ? cdeg : cdeg + n - 1; }

    bool is_zero() const {
        for (const auto& f : comp)
            if (!f.empty()) return false;
        return true;
    }
};

inline ConvolutionElement conv_star(const ConvolutionElement& f, const ConvolutionElement& g,
                                    int max_arity) {
    const auto& m = *f.module;
    ConvolutionElement out{f.module, f.variant, f.cdeg + g.cdeg,
                           std::vector<MultiMap>((size_t)max_arity + 1)};
    bool shifted = ai_shifted(f.variant);
    for (int af = 0; af < (int)f.comp.size(); ++af)
        for (const auto& [tf, vf] : f.comp[af])
            for (int p = 0; p < af; ++p) {
                int r = af - 1 - p;
                int dpre = tuple_degree(m, KeyTuple(tf.begin(), tf.begin() + p));
                for (int q = 0; q < (int)g.comp.size(); ++q) {
                    int n = af - 1 + q;
                    if (n > max_arity) continue;
                    int mdg = g.map_degree(q);
                    int parity = (mdg & 1) ? (dpre & 1) : 0;
                    if (!shifted) parity ^= (p * (q + 1) + g.cdeg * (p + r)) & 1;
                    for (const auto& [tg, vg] : g.comp[q]) {
                        auto it = vg.find(tf[p]);
                        if (it == vg.end()) continue;
                        KeyTuple key(tf.begin(), tf.begin() + p);
                        key.insert(key.end(), tg.begin(), tg.end());
                        key.insert(key.end(), tf.begin() + p + 1, tf.end());
                        if (tuple_weight(m, key) > m.truncation_weight) continue;
                        add_scaled(out.comp[(size_t)n][key], vf,
                                   parity ? -it->second : it->second);
                    }
                }
            }
    detail::normalize_maps(out.comp);
    return out;
}

inline ConvolutionElement conv_encode(const CurvedAInftyAlgebra& A) {
    return ConvolutionElement{A.module, A.variant, -1, A.maps};
}

// weight rule of the deformation gauge group: the arity-0 and arity-1
// components of a gauge direction must sit in the first filtration layer
inline void require_gauge_weights(const ConvolutionElement& x) {
    const auto& m = *x.module;
    for (int n = 0; n <= 1 && n < (int)x.comp.size(); ++n)
        for (const auto& [t, v] : x.comp[n])
            for (const auto& [g, c] : v)
                if (m.weight[g] - tuple_weight(m, t) < 1) throw WeightZeroGaugeInput();
}

namespace detail {

// sign of the contracting homotopy theta^* (x) f; frozen by requiring
// h.delta + delta.h = id exactly (checked in the test suite)
inline int kp_h_parity(AiVariant v, int n, int cdeg, int u) {
    if (ai_shifted(v)) return (cdeg & 1) ? (u + 1) & 1 : 0;
    (void)u;
    return n & 1;
}

} // namespace detail

// boundary of the trivialization complex: f -> f * alpha_0
inline ConvolutionElement kp_delta(const ConvolutionElement& f, const ConvolutionElement& alpha0,
                                   int max_arity) {
    return conv_star(f, alpha0, max_arity);
}

// contracting homotopy: prepend an input killed against the curvature
inline ConvolutionElement kp_h(const ConvolutionElement& f, const SparseVec& theta_dual,
                               int max_arity) {
    const auto& m = *f.module;
    ConvolutionElement out{f.module, f.variant, f.cdeg + 1,
                           std::vector<MultiMap>((size_t)max_arity + 1)};
    for (int n = 0; n + 1 <= max_arity && n < (int)f.comp.size(); ++n)
        for (const auto& [t, v] : f.comp[n])
            for (const auto& [x0, c] : theta_dual) {
                if (tuple_weight(m, t) + m.weight[x0] > m.truncation_weight) continue;
                KeyTuple key{x0};
                key.insert(key.end(), t.begin(), t.end());
                int parity = detail::kp_h_parity(f.variant, n, f.cdeg, m.degree[x0] & 1);
                add_scaled(out.comp[(size_t)n + 1][key], v, parity ? -c : c);
            }
    detail::normalize_maps(out.comp);
    return out;
}

struct InftyIsotopy {
    ModulePtr module;
    AiVariant variant = AiVariant::Shifted;
    std::vector<MultiMap> lambda; // arities 0..arity_cap+1, with [0] and [1] zero
};

/*
 * Gauge-trivialize everything but the curvature: produce lambda supported
 * in arities >= 2 with (1+lambda) * alpha = alpha_0, built arity by arity
 * through the contracting homotopy above. Needs a functional sending the
 * curvature to 1.
 */
inline InftyIsotopy kp_trivialize(const CurvedAInftyAlgebra& A, const SparseVec& theta_dual) {
    const auto& m = *A.module;
    Scalar pairing = 0;
    for (const auto& [g, c] : theta_dual) {
        auto th = A.curvature();
        auto it = th.find(g);
        if (it != th.end()) pairing += c * it->second;
    }
    if (!(pairing == Scalar(1))) throw CurvatureNotUnital();

    int cap = m.arity_cap;
    ConvolutionElement alpha = conv_encode(A);
    ConvolutionElement alpha0{A.module, A.variant, -1, {A.maps[0]}};
    ConvolutionElement lam{A.module, A.variant, 0,
                           std::vector<MultiMap>((size_t)cap + 2)};
    for (int n = 1; n <= cap; ++n) {
        // delta_n = alpha_n + sum_k (lambda_k * alpha_{n-k+1})_n
        ConvolutionElement delta{A.module, A.variant, -1,
                                 std::vector<MultiMap>((size_t)n + 1)};
        if (n < (int)alpha.comp.size()) delta.comp[(size_t)n] = alpha.comp[(size_t)n];
        ConvolutionElement cross = conv_star(lam, alpha, n);
        if (n < (int)cross.comp.size())
            for (const auto& [t, v] : cross.comp[(size_t)n])
                add_scaled(delta.comp[(size_t)n][t], v, Scalar(1));
        detail::normalize_maps(delta.comp);
        ConvolutionElement step = kp_h(delta, theta_dual, cap + 1);
        for (const auto& [t, v] : step.comp[(size_t)n + 1])
            add_scaled(lam.comp[(size_t)n + 1][t], v, Scalar(-1));
        detail::normalize_maps(lam.comp);
    }

    // the defining equation, re-verified exactly on the whole window
    ConvolutionElement acted = conv_star(lam, alpha, cap);
    for (int n = 0; n <= cap; ++n) {
        MultiMap total = (n < (int)alpha.comp.size()) ? alpha.comp[(size_t)n] : MultiMap{};
        if (n < (int)acted.comp.size())
            for (const auto& [t, v] : acted.comp[(size_t)n])
                add_scaled(total[t], v, Scalar(1));
        for (auto it = total.begin(); it != total.end();)
            it = it->second.empty() ? total.erase(it) : std::next(it);
        const MultiMap want = (n == 0) ? alpha0.comp[0] : MultiMap{};
        if (total != want)
            throw std::logic_error("trivialization recursion failed to close");
    }
    return InftyIsotopy{A.module, A.variant, lam.comp};
}

inline CurvedAInftyAlgebra ainfty_from_json(const nlohmann::json& j, int truncation_weight,
                                            int arity_cap) {
    CurvedAInftyAlgebra A;
    A.module = module_from_json(j, truncation_weight, arity_cap);
    A.variant = ai_variant_from_string(j.at("variant").get<std::string>());
    A.maps.assign((size_t)arity_cap + 1, {});
    for (const auto& e : j.at("maps")) {
        int n = e.at("arity").get<int>();
        if (n < 0 || n > arity_cap) throw std::invalid_argument("map arity out of range");
        KeyTuple t;
        for (const auto& s : e.at("inputs")) t.push_back(A.module->index.at(s.get<std::string>()));
        SparseVec v = module_lincomb_from_json(e.at("output"), *A.module);
        for (const auto& [g, c] : v) {
            Scalar& slot = A.maps[(size_t)n][t][g];
            slot += c;
            if (slot == 0) A.maps[(size_t)n][t].erase(g);
        }
    }
    detail::normalize_maps(A.maps);
    validate_ainfty(A);
    return A;
}

inline nlohmann::json ainfty_to_json(const CurvedAInftyAlgebra& A) {
    nlohmann::json j = module_to_json(*A.module);
    j["variant"] = ai_variant_to_string(A.variant);
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
