#ifndef MCX_PRELIE_HPP
#define MCX_PRELIE_HPP

#include <mcx/algebra.hpp>
#include <mcx/free_lie.hpp>

#include <optional>
#include <vector>

namespace mcx {

/*
 * Gauge calculus in complete filtered dg Lie / left-unital pre-Lie algebras.
 * "Complete" here means weight-truncated: every series below terminates
 * because gauge parameters sit in weight >= 1 and products add weights.
 */

namespace detail {

// adjoin a formal element D with D*x := d(x), x*D := 0, acting like the
// differential shifted into the algebra; only ever multiplied from the left
struct DeltaExt {
    AlgebraElement body;
    Scalar delta = 0;

    DeltaExt& operator+=(const DeltaExt& o) {
        body += o.body;
        delta += o.delta;
        return *this;
    }
    friend DeltaExt operator*(const DeltaExt& a, const Scalar& s) {
        return {a.body * s, a.delta * s};
    }
};

/*
 * Symmetric brace {a; b_1,...,b_n} by the defining recursion
 *   {a; b_1..b_n} = {{a; b_1..b_{n-1}}; b_n}
 *                   - sum_i (-1)^{|b_n|(|b_{i+1}|+..+|b_{n-1}|)}
 *                           {a; b_1,..,{b_i;b_n},..,b_{n-1}}
 * with {x;y} = x*y. Arguments must be homogeneous here.
 */
inline AlgebraElement brace_core(const AlgebraElement& a,
                                 std::vector<std::pair<AlgebraElement, int>> bs) {
    if (bs.empty()) return a;
    auto [bn, dn] = bs.back();
    bs.pop_back();
    AlgebraElement r = mul(brace_core(a, bs), bn);
    for (size_t i = 0; i < bs.size(); ++i) {
        int exp = 0;
        for (size_t j = i + 1; j < bs.size(); ++j) exp += bs[j].second;
        Scalar sg = (dn * exp) % 2 ? Scalar(-1) : Scalar(1);
        auto sub = bs;
        sub[i] = {mul(bs[i].first, bn), bs[i].second + dn};
        r += brace_core(a, std::move(sub)) * (-sg);
    }
    return r;
}

// multilinear expansion over homogeneous components of the arguments
inline AlgebraElement brace_multilinear(const AlgebraElement& a,
                                        const std::vector<AlgebraElement>& bs, size_t k,
                                        std::vector<std::pair<AlgebraElement, int>>& acc) {
    if (k == bs.size()) return brace_core(a, acc);
    AlgebraElement r(a.alg());
    for (const auto& [dg, part] : bs[k].by_degree()) {
        acc.push_back({part, dg});
        r += brace_multilinear(a, bs, k + 1, acc);
        acc.pop_back();
    }
    return r;
}

} // namespace detail

inline AlgebraElement symmetric_brace(const AlgebraElement& a,
                                      const std::vector<AlgebraElement>& bs) {
    std::vector<std::pair<AlgebraElement, int>> acc;
    return detail::brace_multilinear(a, bs, 0, acc);
}

inline void require_gauge_weight(const AlgebraElement& x) {
    if (!x.is_zero() && x.min_weight() < 1) throw WeightZeroGaugeInput();
}

// exp(x) = 1 + sum x^{*n}/n! with the left-iterated powers (..((x*x)*x)..)*x
inline AlgebraElement prelie_exp(const AlgebraElement& x) {
    AlgebraElement one = unit_element(x.alg());
    require_gauge_weight(x);
    AlgebraElement r = one, pw = x;
    Scalar fact = 1;
    for (int n = 1; !pw.is_zero(); ++n) {
        fact *= n;
        r += pw * (Scalar(1) / fact);
        pw = mul(pw, x);
    }
    return r;
}

inline AlgebraElement prelie_exp_m1(const AlgebraElement& x) {
    return prelie_exp(x) - unit_element(x.alg());
}

// inverse of prelie_exp on 1 + (weight >= 1), by fixed-point iteration
inline AlgebraElement prelie_log(const AlgebraElement& g) {
    AlgebraElement one = unit_element(g.alg());
    AlgebraElement a = g - one;
    if (g.coeff(g.alg()->unit) != 1 || (!a.is_zero() && a.min_weight() < 1))
        throw NotGroupLike();
    AlgebraElement L = a;
    int W = g.alg()->truncation_weight;
    for (int it = 0; it < W; ++it) L = a - (prelie_exp_m1(L) - L);
    if (!(prelie_exp_m1(L) == a)) throw std::logic_error("prelie_log failed to converge");
    return L;
}

// a (*) (1 + b) = sum_n 1/n! {a; b,..,b}
inline AlgebraElement circle_product(const AlgebraElement& a, const AlgebraElement& g) {
    AlgebraElement b = g - unit_element(g.alg());
    if (g.coeff(g.alg()->unit) != 1 || (!b.is_zero() && b.min_weight() < 1))
        throw NotGroupLike();
    AlgebraElement r = a;
    std::vector<AlgebraElement> args;
    Scalar fact = 1;
    int W = g.alg()->truncation_weight;
    for (int n = 1; n <= W; ++n) {
        fact *= n;
        args.push_back(b);
        AlgebraElement term = symmetric_brace(a, args);
        if (term.is_zero()) break;
        r += term * (Scalar(1) / fact);
    }
    return r;
}

// BCH product of two weight >= 1, degree 0 elements, evaluated through the
// free Lie expansion on the Lyndon basis
inline AlgebraElement bch_eval(const AlgebraElement& x, const AlgebraElement& y) {
    if (!x.is_homogeneous(0) || !y.is_homogeneous(0))
        throw std::invalid_argument("bch_eval: arguments must have degree 0");
    require_gauge_weight(x);
    require_gauge_weight(y);
    FreeLieElement B = bch(x.alg()->truncation_weight);
    AlgebraElement r(x.alg());
    std::vector<AlgebraElement> args = {x, y};
    for (const auto& [w, c] : B.coeffs) {
        AlgebraElement t = eval_lyndon_word<AlgebraElement>(
            w, args, [](const AlgebraElement& u, const AlgebraElement& v) {
                return bracket(u, v);
            });
        r += t * c;
    }
    return r;
}

// Maurer-Cartan residual: d(x) + x*x for pre-Lie, d(x) + 1/2 [x,x] for dg Lie
inline AlgebraElement mc_residual(const AlgebraElement& x) {
    if (x.alg()->kind == AlgKind::PreLie) return d(x) + mul(x, x);
    return d(x) + bracket(x, x) * frac(1, 2);
}

/*
 * Gauge flow lambda.alpha = exp(ad_lambda)(D + alpha) - D, expanded as
 *   sum_m ad^m(alpha)/m!  -  sum_{m>=1} ad^{m-1}(d lambda)/m!.
 * With use_extension the same exponential is driven literally through the
 * adjoined D; the two routes agree identically and the choice is per call.
 */
inline AlgebraElement gauge_flow(const AlgebraElement& lam, const AlgebraElement& alpha,
                                 bool use_extension = false) {
    if (!use_extension) {
        AlgebraElement r = alpha, t = alpha;
        for (int m = 1; !t.is_zero(); ++m) {
            t = bracket(lam, t) * (Scalar(1) / m);
            r += t;
        }
        AlgebraElement s = d(lam);
        Scalar fact = 1;
        for (int m = 1; !s.is_zero(); ++m) {
            fact *= m;
            r += s * (Scalar(-1) / fact);
            s = bracket(lam, s);
        }
        return r;
    }
    // ad_lambda on the extension: [lam, x + cD] = [lam, x] - c d(lam)
    detail::DeltaExt z{alpha, Scalar(1)}, t = z, r = z;
    for (int m = 1; !(t.body.is_zero() && t.delta == 0); ++m) {
        t = detail::DeltaExt{bracket(lam, t.body) - d(lam) * t.delta, Scalar(0)} *
            (Scalar(1) / m);
        r += t;
    }
    if (r.delta != 1) throw std::logic_error("gauge flow lost the formal differential");
    return r.body;
}

/*
 * Gauge action in the pre-Lie picture, computed two independent ways:
 * the flow above, and the circle-product formula
 *   lambda.alpha = (e^lam * alpha - d(e^lam)) (*) e^{-lam} ,
 * the differential term being the trace of the formal element D multiplied
 * from the right of e^lam. Disagreement raises FormulaMismatch; MC is
 * checked on input and output.
 */
inline AlgebraElement gauge_act_prelie(const AlgebraElement& lam, const AlgebraElement& alpha,
                                       bool use_extension_for_flow = false) {
    if (!lam.is_homogeneous(0)) throw std::invalid_argument("gauge parameter must have degree 0");
    require_gauge_weight(lam);
    if (!mc_residual(alpha).is_zero()) throw NotMaurerCartan();

    AlgebraElement flow = gauge_flow(lam, alpha, use_extension_for_flow);

    if (lam.alg()->kind == AlgKind::PreLie && lam.alg()->unit >= 0) {
        AlgebraElement u = prelie_exp_m1(lam);
        AlgebraElement w = alpha + mul(u, alpha) - d(u);
        AlgebraElement circ = circle_product(w, prelie_exp(lam * Scalar(-1)));
        if (!(circ == flow)) throw FormulaMismatch();
    }

    if (!mc_residual(flow).is_zero())
        throw std::logic_error("gauge action failed to preserve the Maurer-Cartan equation");
    return flow;
}

// replace the differential by d + [omega, -] for a Maurer-Cartan omega
inline AlgebraPtr twist_dglie(const AlgebraPtr& alg, const AlgebraElement& omega) {
    if (!mc_residual(omega).is_zero()) throw NotMaurerCartan();
    auto spec = std::make_shared<FilteredAlgebraSpec>(*alg);
    spec->differential.clear();
    for (size_t i = 0; i < alg->dim(); ++i) {
        AlgebraElement di = d(basis_element(alg, (int)i)) + bracket(omega, basis_element(alg, (int)i));
        if (!di.is_zero()) spec->differential[(int)i] = di.coeffs();
    }
    AlgebraPtr out = spec;
    validate_algebra(out);
    return out;
}

// matrix of d + [phi, -] on the basis
inline SparseMatrix twisted_differential_matrix(const AlgebraPtr& alg, const AlgebraElement& phi) {
    std::vector<std::tuple<int, int, Scalar>> trip;
    for (size_t j = 0; j < alg->dim(); ++j) {
        AlgebraElement col = d(basis_element(alg, (int)j)) + bracket(phi, basis_element(alg, (int)j));
        for (const auto& [i, c] : col.coeffs()) trip.emplace_back(i, (int)j, c);
    }
    return SparseMatrix((int)alg->dim(), (int)alg->dim(), trip);
}

inline AlgebraElement project_degree(const AlgebraElement& x, int deg) {
    AlgebraElement r(x.alg());
    for (const auto& [i, c] : x.coeffs())
        if (x.alg()->degree[i] == deg) r.add(i, c);
    return r;
}

struct DeformationResult {
    bool ok = true;
    std::vector<AlgebraElement> terms; // terms[n] is the t^n coefficient, n >= 1
    AlgebraElement obstruction;
    int obstruction_order = 0;
};

/*
 * Order-by-order extension of phi + t Phi_1 to a formal deformation:
 * solve d^phi(Phi_n) = -1/2 sum_{k=1}^{n-1} [Phi_k, Phi_{n-k}] for each n.
 * An unsolvable right-hand side is returned as the obstruction class.
 */
inline DeformationResult extend_formal_deformation(const AlgebraElement& phi,
                                                   const AlgebraElement& phi1, int order) {
    const AlgebraPtr& alg = phi.alg();
    if (!mc_residual(phi).is_zero()) throw NotMaurerCartan();
    const int deg = -1; // the equation is degree-consistent only there
    if (!phi.is_homogeneous(deg) || !phi1.is_homogeneous(deg))
        throw std::invalid_argument("deformation terms must be homogeneous of degree -1");
    AlgebraElement cyc = d(phi1) + bracket(phi, phi1);
    if (!cyc.is_zero()) throw NotACycle();

    SparseMatrix D = twisted_differential_matrix(alg, phi);
    DeformationResult res;
    res.terms.assign((size_t)order + 1, AlgebraElement(alg));
    res.obstruction = AlgebraElement(alg);
    res.terms[1] = phi1;
    for (int n = 2; n <= order; ++n) {
        AlgebraElement rhs(alg);
        for (int k = 1; k < n; ++k) rhs += bracket(res.terms[(size_t)k], res.terms[(size_t)(n - k)]);
        rhs = rhs * frac(-1, 2);
        SparseVec b = rhs.coeffs();
        auto x = solve(D, b);
        if (!x) {
            res.ok = false;
            res.obstruction = rhs;
            res.obstruction_order = n;
            return res;
        }
        res.terms[(size_t)n] = project_degree(AlgebraElement(alg, *x), deg);
    }
    return res;
}

// ---- polynomial coefficients in a formal variable t, truncated at t^order ----

struct TSeries {
    std::vector<AlgebraElement> c; // c[n] = t^n coefficient

    explicit TSeries(const AlgebraPtr& alg, int order)
        : c((size_t)order + 1, AlgebraElement(alg)) {}

    int order() const { return (int)c.size() - 1; }
    bool is_zero() const {
        for (const auto& x : c)
            if (!x.is_zero()) return false;
        return true;
    }
    TSeries& operator+=(const TSeries& o) {
        for (size_t n = 0; n < c.size(); ++n) c[n] += o.c[n];
        return *this;
    }
    friend TSeries operator*(TSeries a, const Scalar& s) {
        for (auto& x : a.c) x = x * s;
        return a;
    }
};

inline TSeries ts_bracket(const TSeries& a, const TSeries& b) {
    TSeries r(a.c[0].alg(), a.order());
    for (int i = 0; i <= a.order(); ++i)
        for (int j = 0; i + j <= a.order(); ++j) r.c[(size_t)(i + j)] += bracket(a.c[(size_t)i], b.c[(size_t)j]);
    return r;
}

inline TSeries ts_mul(const TSeries& a, const TSeries& b) {
    TSeries r(a.c[0].alg(), a.order());
    for (int i = 0; i <= a.order(); ++i)
        for (int j = 0; i + j <= a.order(); ++j) r.c[(size_t)(i + j)] += mul(a.c[(size_t)i], b.c[(size_t)j]);
    return r;
}

inline TSeries ts_d(const TSeries& a) {
    TSeries r(a.c[0].alg(), a.order());
    for (size_t n = 0; n < a.c.size(); ++n) r.c[n] = d(a.c[n]);
    return r;
}

inline TSeries ts_mc_residual(const TSeries& a) {
    TSeries r = ts_d(a);
    if (a.c[0].alg()->kind == AlgKind::PreLie)
        r += ts_mul(a, a);
    else
        r += ts_bracket(a, a) * frac(1, 2);
    return r;
}

// the gauge flow with polynomial coefficients; lam must have zero constant term
inline TSeries ts_gauge_flow(const TSeries& lam, const TSeries& alpha) {
    TSeries r = alpha, t = alpha;
    for (int m = 1; !t.is_zero(); ++m) {
        t = ts_bracket(lam, t) * (Scalar(1) / m);
        r += t;
    }
    TSeries s = ts_d(lam);
    Scalar fact = 1;
    for (int m = 1; !s.is_zero(); ++m) {
        fact *= m;
        r += s * (Scalar(-1) / fact);
        s = ts_bracket(lam, s);
    }
    return r;
}

struct TrivializationResult {
    bool ok = true;
    std::vector<AlgebraElement> lambda; // lambda[n], n >= 1
    AlgebraElement obstruction;
    int obstruction_order = 0;
};

/*
 * Solve exp(ad_lambda)(D + phi) = D + phi + sum_n Phi_n t^n for a polynomial
 * gauge lambda = sum_{n>=1} lambda_n t^n, order by order: the t^n mismatch is
 * corrected by lambda_n through -d^phi(lambda_n).
 */
inline TrivializationResult gauge_trivialize_formal(const AlgebraElement& phi,
                                                    const std::vector<AlgebraElement>& Phi,
                                                    int order) {
    const AlgebraPtr& alg = phi.alg();
    if (!phi.is_homogeneous(-1))
        throw std::invalid_argument("deformation terms must be homogeneous of degree -1");
    TSeries target(alg, order);
    target.c[0] = phi;
    for (int n = 1; n <= order; ++n)
        if (n - 1 < (int)Phi.size()) {
            if (!Phi[(size_t)(n - 1)].is_homogeneous(-1))
                throw std::invalid_argument("deformation terms must be homogeneous of degree -1");
            target.c[(size_t)n] = Phi[(size_t)(n - 1)];
        }
    if (!ts_mc_residual(target).is_zero()) throw InvalidDeformation();

    SparseMatrix D = twisted_differential_matrix(alg, phi);
    TSeries lam(alg, order);
    TrivializationResult res;
    res.lambda.assign((size_t)order + 1, AlgebraElement(alg));
    res.obstruction = AlgebraElement(alg);
    TSeries base(alg, order);
    base.c[0] = phi;
    for (int n = 1; n <= order; ++n) {
        TSeries cur = ts_gauge_flow(lam, base);
        AlgebraElement r = cur.c[(size_t)n] - target.c[(size_t)n];
        if (r.is_zero()) continue;
        SparseVec b = r.coeffs();
        auto x = solve(D, b);
        if (!x) {
            res.ok = false;
            res.obstruction = r;
            res.obstruction_order = n;
            return res;
        }
        AlgebraElement ln = project_degree(AlgebraElement(alg, *x), 0);
        lam.c[(size_t)n] = ln;
        res.lambda[(size_t)n] = ln;
    }
    if (!(ts_gauge_flow(lam, base).c == target.c))
        throw std::logic_error("gauge trivialization failed to verify");
    return res;
}

} // namespace mcx

#endif
