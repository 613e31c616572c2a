#ifndef MCX_CONVOLUTION_HPP
#define MCX_CONVOLUTION_HPP

#include <mcx/infty_morphism.hpp>
#include <mcx/prelie.hpp>

namespace mcx {

/*
 * The convolution algebra hom(C, end_A) realised as an honest unitless
 * pre-Lie FilteredAlgebraSpec: one basis vector per filtered single-entry
 * map (input tuple -> output generator), with the insertion product as the
 * pre-Lie star. Structures are then square-zero elements of degree -1,
 * twisting is the gauge action of the arity-0 direction, and all the sign
 * conventions of this module can be cross-checked against the generic
 * gauge machinery.
 *
 * Requires every module generator to carry weight >= 1, so that arities
 * above the truncation weight vanish and the algebra is finite; weight
 * truncation is then a genuine algebra quotient and every identity holds
 * exactly.
 */
struct ConvBridge {
    ModulePtr module;
    AiVariant variant = AiVariant::Shifted; // ignored in the symmetric flavor
    bool symmetric = false;
    AlgebraPtr alg;
    std::vector<std::tuple<int, KeyTuple, int>> info; // basis -> (arity, tuple, out)
    std::map<std::pair<KeyTuple, int>, int> slot;     // (tuple, out) -> basis
    int max_arity = 0;

    int basis_of(const KeyTuple& t, int g) const {
        auto it = slot.find({t, g});
        return it == slot.end() ? -1 : it->second;
    }
};

namespace detail {

inline std::string conv_basis_name(const GradedModuleSpec& m, const KeyTuple& t, int g) {
    std::string s = "(";
    for (size_t i = 0; i < t.size(); ++i) {
        if (i) s += ",";
        s += m.names[(size_t)t[i]];
    }
    s += ">" + m.names[(size_t)g] + ")";
    return s;
}

/*
 * Symmetric insertion product on single-entry maps, with front-unshuffle
 * Koszul signs only. The product can only be supported on the merge of tg
 * with (tf minus one copy of gg); its value there is read off directly from
 *   (f*g)(u) = sum over subsets S of u with u_S = tg of
 *              front_sign(S) . f(g(u_S), u_rest).
 */
inline void sym_star_singletons(const ConvBridge& br, int i, int j, SparseVec& out) {
    const auto& m = *br.module;
    const auto& [nf, tf, gf] = br.info[(size_t)i];
    const auto& [ng, tg, gg] = br.info[(size_t)j];
    if (nf == 0) return; // nothing to insert into
    int n = nf + ng - 1;
    if (n > br.max_arity) return;
    auto p = std::find(tf.begin(), tf.end(), gg);
    if (p == tf.end()) return;
    KeyTuple u = tg;
    for (auto it = tf.begin(); it != tf.end(); ++it)
        if (it != p) u.push_back(*it);
    if (!sort_sign(m, u)) return; // repeated odd entry: value forced to zero
    if (tuple_weight(m, u) > m.truncation_weight) return;
    int b = br.basis_of(u, gf);
    if (b < 0) return;
    Scalar coeff(0);
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
        if (__builtin_popcount(mask) != ng) continue;
        KeyTuple inner, rest;
        std::vector<char> sel((size_t)n, 0);
        for (int k = 0; k < n; ++k)
            ((mask >> k) & 1 ? (sel[(size_t)k] = 1, inner) : rest).push_back(u[(size_t)k]);
        if (inner != tg) continue;
        KeyTuple arg{gg};
        arg.insert(arg.end(), rest.begin(), rest.end());
        auto asg = sort_sign(m, arg);
        if (!asg || arg != tf) continue;
        coeff += Scalar(front_sign(m, u, sel) * *asg);
    }
    if (coeff == 0) return;
    Scalar& slot = out[b];
    slot += coeff;
    if (slot == 0) out.erase(b);
}

} // namespace detail

inline ConvBridge make_conv_bridge(const ModulePtr& module, AiVariant variant, bool symmetric) {
    const auto& m = *module;
    for (size_t i = 0; i < m.dim(); ++i)
        if (m.weight[i] < 1)
            throw std::invalid_argument("convolution bridge needs all generator weights >= 1");

    ConvBridge br;
    br.module = module;
    br.variant = symmetric ? AiVariant::Shifted : variant;
    br.symmetric = symmetric;
    // a filtered map needs w(out) >= w(in), and compositions of filtered
    // maps keep their input weight below the output weight, so nothing of
    // arity beyond maxw/minw ever appears
    int minw = m.weight.empty() ? 1 : *std::min_element(m.weight.begin(), m.weight.end());
    int maxw = m.weight.empty() ? 0 : *std::max_element(m.weight.begin(), m.weight.end());
    br.max_arity = std::min(m.truncation_weight, maxw) / minw;

    auto spec = std::make_shared<FilteredAlgebraSpec>();
    spec->kind = AlgKind::PreLie;
    spec->truncation_weight = m.truncation_weight; // conv weight = w(out) - w(in)
    for (int n = 0; n <= br.max_arity; ++n) {
        auto add = [&](const KeyTuple& t) {
            int din = tuple_degree(m, t), win = tuple_weight(m, t);
            for (int g = 0; g < (int)m.dim(); ++g) {
                if (m.weight[g] < win || m.weight[g] > m.truncation_weight) continue;
                int md = m.degree[g] - din;
                int cdeg = (br.symmetric || ai_shifted(br.variant)) ? md : md - n + 1;
                int idx = spec->add_basis(detail::conv_basis_name(m, t, g), cdeg,
                                          m.weight[g] - win);
                br.info.emplace_back(n, t, g);
                br.slot[{t, g}] = idx;
            }
        };
        if (symmetric)
            for_each_sorted_tuple(m, n, [&](const KeyTuple& t) {
                for (size_t i = 1; i < t.size(); ++i)
                    if (t[i] == t[i - 1] && (m.degree[t[i]] & 1)) return;
                add(t);
            });
        else
            for_each_tuple(m, n, add);
    }

    for (int i = 0; i < (int)br.info.size(); ++i)
        for (int j = 0; j < (int)br.info.size(); ++j) {
            SparseVec v;
            if (symmetric) {
                detail::sym_star_singletons(br, i, j, v);
            } else {
                const auto& [ni, ti, gi] = br.info[(size_t)i];
                const auto& [nj, tj, gj] = br.info[(size_t)j];
                ConvolutionElement f{module, br.variant, spec->degree[(size_t)i],
                                     std::vector<MultiMap>((size_t)ni + 1)};
                f.comp[(size_t)ni][ti] = SparseVec{{gi, Scalar(1)}};
                ConvolutionElement g{module, br.variant, spec->degree[(size_t)j],
                                     std::vector<MultiMap>((size_t)nj + 1)};
                g.comp[(size_t)nj][tj] = SparseVec{{gj, Scalar(1)}};
                ConvolutionElement h = conv_star(f, g, br.max_arity);
                for (size_t n = 0; n < h.comp.size(); ++n)
                    for (const auto& [t, w] : h.comp[n])
                        for (const auto& [out, c] : w) {
                            int b = br.basis_of(t, out);
                            if (b < 0) continue;
                            Scalar& slot = v[b];
                            slot += c;
                            if (slot == 0) v.erase(b);
                        }
            }
            spec->set_product(i, j, std::move(v));
        }
    br.alg = spec;
    return br;
}

inline AlgebraElement bridge_encode(const ConvBridge& br, const std::vector<MultiMap>& comp) {
    SparseVec v;
    for (size_t n = 0; n < comp.size(); ++n)
        for (const auto& [t, w] : comp[n])
            for (const auto& [g, c] : w) {
                int b = br.basis_of(t, g);
                if (b < 0)
                    throw std::invalid_argument("map entry outside the convolution basis");
                v[b] = c;
            }
    return AlgebraElement(br.alg, std::move(v));
}

// drops arities above the requested cap (the container convention)
inline std::vector<MultiMap> bridge_decode(const ConvBridge& br, const AlgebraElement& x,
                                           int arity_cap) {
    std::vector<MultiMap> comp((size_t)arity_cap + 1);
    for (const auto& [b, c] : x.coeffs()) {
        const auto& [n, t, g] = br.info[(size_t)b];
        if (n > arity_cap) continue;
        comp[(size_t)n][t][g] = c;
    }
    return comp;
}

} // namespace mcx

#endif
