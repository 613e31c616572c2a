#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <mcx/prelie.hpp>

#include "support/fixtures.hpp"

#include <random>

using namespace mcx;

TEST_CASE("word algebra fixtures validate and survive a json round trip") {
    auto alg = fx::word_algebra(fx::standard_letters(2), 4, AlgKind::PreLie);
    auto j = algebra_to_json(alg);
    auto back = algebra_from_json(j, 4);
    CHECK(back->names == alg->names);
    CHECK(back->product == alg->product);
    CHECK(back->differential == alg->differential);
    CHECK(back->unit == alg->unit);

    // breaking the Leibniz rule must be rejected on ingest
    auto bad = j;
    bad["differential"] = nlohmann::json::array();
    bad["differential"].push_back(
        {{"gen", "uu"}, {"result", nlohmann::json::array({{{"gen", "v"}, {"coeff", "1"}}})}});
    CHECK_THROWS_AS(algebra_from_json(bad, 4), std::invalid_argument);

    // dg Lie commutator variant validates too
    auto lie = fx::word_algebra(fx::standard_letters(3), 4, AlgKind::DgLie);
    CHECK(lie->kind == AlgKind::DgLie);
}

TEST_CASE("symmetric braces: base cases, associator formula, graded symmetry") {
    std::mt19937_64 rng(71);
    auto alg = fx::scramble_basis(fx::word_algebra(fx::standard_letters(2), 5, AlgKind::PreLie), rng);
    for (int trial = 0; trial < 10; ++trial) {
        AlgebraElement a = fx::random_element(alg, (int)(rng() % 2) == 0 ? 0 : -1, 1, rng);
        AlgebraElement y = fx::random_element(alg, (int)(rng() % 2) == 0 ? 0 : -1, 1, rng);
        AlgebraElement z = fx::random_element(alg, (int)(rng() % 2) == 0 ? 0 : -1, 1, rng);
        CHECK(symmetric_brace(a, {}) == a);
        CHECK(symmetric_brace(a, {y}) == mul(a, y));
        // {a; y, z} = (a*y)*z - a*(y*z), the associator
        AlgebraElement lhs = symmetric_brace(a, {y, z});
        AlgebraElement rhs = mul(mul(a, y), z) - mul(a, mul(y, z));
        CHECK(lhs == rhs);
        // graded symmetry in the arguments
        int dy = y.is_zero() ? 0 : alg->degree[(size_t)y.coeffs().begin()->first];
        int dz = z.is_zero() ? 0 : alg->degree[(size_t)z.coeffs().begin()->first];
        Scalar sg = (dy * dz) % 2 ? Scalar(-1) : Scalar(1);
        CHECK(symmetric_brace(a, {y, z}) == symmetric_brace(a, {z, y}) * sg);
    }
}

TEST_CASE("pre-Lie exponential and Magnus logarithm on the one-generator instance") {
    auto alg = fx::one_gen_prelie();
    int ia = alg->index.at("a"), ib = alg->index.at("aa");
    int ip = alg->index.at("aa.a"), iq = alg->index.at("a.aa");
    AlgebraElement a = basis_element(alg, ia);
    AlgebraElement one = unit_element(alg);

    AlgebraElement e = prelie_exp(a);
    CHECK(e.coeff(alg->unit) == 1);
    CHECK(e.coeff(ia) == 1);
    CHECK(e.coeff(ib) == frac(1, 2));
    CHECK(e.coeff(ip) == frac(1, 6)); // left-iterated cube (a*a)*a
    CHECK(e.coeff(iq) == 0);

    // log(1+a) = a - 1/2 a*a + 1/4 a*(a*a) + 1/12 (a*a)*a
    AlgebraElement L = prelie_log(one + a);
    CHECK(L.coeff(ia) == 1);
    CHECK(L.coeff(ib) == frac(-1, 2));
    CHECK(L.coeff(iq) == frac(1, 4));
    CHECK(L.coeff(ip) == frac(1, 12));

    CHECK(prelie_log(one) .is_zero());
    CHECK(prelie_exp(L) == one + a);
    CHECK(prelie_log(prelie_exp(a)) == a);

    CHECK_THROWS_AS(prelie_log(a), NotGroupLike);       // unit coefficient 0
    CHECK_THROWS_AS(prelie_log(one + one), NotGroupLike); // unit coefficient 2
}

TEST_CASE("exp/log round trip to weight 8 on random pre-Lie instances") {
    std::mt19937_64 rng(1234);
    auto base = fx::word_algebra(fx::standard_letters(2), 8, AlgKind::PreLie);
    for (int inst = 0; inst < 20; ++inst) {
        auto alg = inst == 0 ? base : fx::scramble_basis(base, rng);
        AlgebraElement lam = fx::random_element(alg, 0, 1, rng);
        CHECK(prelie_log(prelie_exp(lam)) == lam);
        AlgebraElement g = unit_element(alg) + fx::random_element(alg, 0, 1, rng);
        CHECK(prelie_exp(prelie_log(g)) == g);
    }
}

TEST_CASE("circle product: group law matches the BCH exponential law") {
    std::mt19937_64 rng(99);
    auto base = fx::word_algebra(fx::standard_letters(2), 6, AlgKind::PreLie);
    for (int inst = 0; inst < 6; ++inst) {
        auto alg = inst == 0 ? base : fx::scramble_basis(base, rng);
        AlgebraElement one = unit_element(alg);
        AlgebraElement b1 = fx::random_element(alg, 0, 1, rng);
        AlgebraElement b2 = fx::random_element(alg, 0, 1, rng);
        AlgebraElement a = fx::random_element(alg, -1, 1, rng);
        CHECK(circle_product(a, one) == a);
        AlgebraElement lhs = circle_product(one + b1, one + b2);
        AlgebraElement rhs =
            one + prelie_exp_m1(bch_eval(prelie_log(one + b1), prelie_log(one + b2)));
        CHECK(lhs == rhs);
        // exp intertwines BCH with the circle group law
        AlgebraElement x = prelie_log(one + b1), y = prelie_log(one + b2);
        CHECK(prelie_exp(bch_eval(x, y)) == circle_product(prelie_exp(x), prelie_exp(y)));
    }
    AlgebraElement bad = unit_element(base) + basis_element(base, base->index.at("u"));
    CHECK_THROWS_AS(bch_eval(bad, bad), WeightZeroGaugeInput);
    CHECK_THROWS_AS(bch_eval(basis_element(base, base->index.at("v")),
                             basis_element(base, base->index.at("u"))),
                    std::invalid_argument);
}

TEST_CASE("gauge action: dual formulas, group law, delta extension, abelian case") {
    std::mt19937_64 rng(2024);
    auto pre_base = fx::word_algebra(fx::standard_letters(2), 6, AlgKind::PreLie);
    auto lie_base = fx::word_algebra(fx::standard_letters(3), 4, AlgKind::DgLie);

    int checked = 0;
    for (int inst = 0; inst < 25; ++inst) {
        // pre-Lie instance: gauge_act_prelie internally compares the
        // circle-product form against the flow form (FormulaMismatch guard)
        auto alg = inst == 0 ? pre_base : fx::scramble_basis(pre_base, rng);
        AlgebraElement mu = fx::random_element(alg, 0, 1, rng);
        AlgebraElement lam = fx::random_element(alg, 0, 1, rng);
        AlgebraElement alpha = gauge_act_prelie(mu, AlgebraElement(alg)); // gauge orbit of 0
        CHECK(mc_residual(alpha).is_zero());
        AlgebraElement beta = gauge_act_prelie(lam, alpha);
        CHECK(mc_residual(beta).is_zero());
        // with and without the adjoined formal differential
        CHECK(gauge_act_prelie(lam, alpha, true) == beta);
        // left action law
        CHECK(beta == gauge_act_prelie(bch_eval(lam, mu), AlgebraElement(alg)));
        ++checked;

        // dg Lie instance (flow form, both extension routes)
        auto lie = inst == 0 ? lie_base : fx::scramble_basis(lie_base, rng);
        AlgebraElement lm = fx::random_element(lie, 0, 1, rng);
        AlgebraElement lmu = fx::random_element(lie, 0, 1, rng);
        AlgebraElement la = gauge_act_prelie(lmu, AlgebraElement(lie));
        AlgebraElement lb = gauge_act_prelie(lm, la);
        CHECK(mc_residual(lb).is_zero());
        CHECK(gauge_act_prelie(lm, la, true) == lb);
        CHECK(lb == gauge_act_prelie(bch_eval(lm, lmu), AlgebraElement(lie)));
        ++checked;
    }
    CHECK(checked == 50);

    // action of 0 is trivial
    AlgebraElement alpha0 =
        gauge_act_prelie(fx::random_element(pre_base, 0, 1, rng), AlgebraElement(pre_base));
    CHECK(gauge_act_prelie(AlgebraElement(pre_base), alpha0) == alpha0);

    // abelian instance: all products between positive-weight elements vanish
    auto ab = fx::word_algebra(fx::standard_letters(2), 1, AlgKind::PreLie);
    AlgebraElement u = basis_element(ab, ab->index.at("u"));
    AlgebraElement v = basis_element(ab, ab->index.at("v"));
    AlgebraElement lam = u * frac(3, 2);
    AlgebraElement alpha = v * frac(5, 7); // d(v) = 0, products vanish: MC
    CHECK(gauge_act_prelie(lam, alpha) == alpha - d(lam));

    // errors
    CHECK_THROWS_AS(gauge_act_prelie(v, alpha), std::invalid_argument); // degree != 0
    CHECK_THROWS_AS(gauge_act_prelie(unit_element(ab) + u, alpha), WeightZeroGaugeInput);
    AlgebraElement not_mc = basis_element(pre_base, pre_base->index.at("u"));
    CHECK_THROWS_AS(gauge_act_prelie(AlgebraElement(pre_base), not_mc), NotMaurerCartan);
}

TEST_CASE("twisted differential: d^2 = 0 and additivity of twists") {
    std::mt19937_64 rng(5);
    auto lie = fx::scramble_basis(fx::word_algebra(fx::standard_letters(3), 4, AlgKind::DgLie), rng);
    AlgebraElement alpha = gauge_act_prelie(fx::random_element(lie, 0, 1, rng), AlgebraElement(lie));
    auto tw = twist_dglie(lie, alpha); // validate_algebra inside checks d^2 = 0
    for (size_t i = 0; i < lie->dim(); ++i) {
        AlgebraElement e = basis_element(lie, (int)i);
        AlgebraElement expect = d(e) + bracket(alpha, e);
        CHECK(AlgebraElement(tw, d(basis_element(tw, (int)i)).coeffs()).coeffs() == expect.coeffs());
    }
    // beta MC for the twisted structure iff alpha + beta MC for the original
    AlgebraElement beta = gauge_act_prelie(fx::random_element(tw, 0, 1, rng), AlgebraElement(tw));
    CHECK(mc_residual(AlgebraElement(lie, (AlgebraElement(lie, beta.coeffs()) + alpha).coeffs()))
              .is_zero());
    auto tw2 = twist_dglie(tw, beta);
    auto tw12 = twist_dglie(lie, alpha + AlgebraElement(lie, beta.coeffs()));
    CHECK(tw2->differential == tw12->differential);
    CHECK(tw2->product == tw12->product);

    CHECK_THROWS_AS(twist_dglie(lie, basis_element(lie, lie->index.at("u"))), NotMaurerCartan);
}

TEST_CASE("formal deformation: order-by-order extension") {
    std::mt19937_64 rng(31);
    auto lie = fx::scramble_basis(fx::word_algebra(fx::standard_letters(2), 6, AlgKind::DgLie), rng);
    AlgebraElement phi(lie); // deform around 0
    AlgebraElement x = fx::random_element(lie, 0, 1, rng);
    AlgebraElement phi1 = d(x); // exact, hence a cycle: extension must succeed
    auto res = extend_formal_deformation(phi, phi1, 5);
    REQUIRE(res.ok);
    // each order satisfies d(Phi_n) + [phi, Phi_n] + 1/2 sum [Phi_k, Phi_{n-k}] = 0
    for (int n = 2; n <= 5; ++n) {
        AlgebraElement lhs = d(res.terms[(size_t)n]) + bracket(phi, res.terms[(size_t)n]);
        for (int k = 1; k < n; ++k)
            lhs += bracket(res.terms[(size_t)k], res.terms[(size_t)(n - k)]) * frac(1, 2);
        CHECK(lhs.is_zero());
    }
    CHECK_THROWS_AS(extend_formal_deformation(phi, x, 3), std::invalid_argument); // wrong degree
    AlgebraElement notcycle = fx::random_element(lie, -1, 1, rng);
    if (!(d(notcycle) + bracket(phi, notcycle)).is_zero())
        CHECK_THROWS_AS(extend_formal_deformation(phi, notcycle, 3), NotACycle);
}

TEST_CASE("formal deformation: genuine obstruction is reported with its class") {
    // [x,x] = z, no differential: the order-2 equation 0 = -1/2 [x,x] is unsolvable
    auto spec = std::make_shared<FilteredAlgebraSpec>();
    spec->kind = AlgKind::DgLie;
    spec->truncation_weight = 2;
    int ix = spec->add_basis("x", -1, 1);
    int iz = spec->add_basis("z", -2, 2);
    spec->set_product(ix, ix, {{iz, Scalar(1)}});
    AlgebraPtr alg = spec;
    validate_algebra(alg);
    auto res = extend_formal_deformation(AlgebraElement(alg), basis_element(alg, ix), 3);
    REQUIRE_FALSE(res.ok);
    CHECK(res.obstruction_order == 2);
    CHECK(res.obstruction == basis_element(alg, iz) * frac(-1, 2));
}

TEST_CASE("gauge trivialization of formal deformations") {
    std::mt19937_64 rng(47);
    auto lie = fx::scramble_basis(fx::word_algebra(fx::standard_letters(2), 5, AlgKind::DgLie), rng);
    const int order = 4;
    AlgebraElement phi = gauge_act_prelie(fx::random_element(lie, 0, 1, rng), AlgebraElement(lie));

    // trivial deformation: all corrections zero
    auto triv = gauge_trivialize_formal(phi, {}, order);
    REQUIRE(triv.ok);
    for (const auto& l : triv.lambda) CHECK(l.is_zero());

    // round trip: gauge phi by a known polynomial lambda, then recover one
    TSeries lam(lie, order);
    lam.c[1] = fx::random_element(lie, 0, 1, rng);
    lam.c[2] = fx::random_element(lie, 0, 1, rng);
    TSeries base(lie, order);
    base.c[0] = phi;
    TSeries flowed = ts_gauge_flow(lam, base);
    CHECK(ts_mc_residual(flowed).is_zero());
    std::vector<AlgebraElement> Phi(flowed.c.begin() + 1, flowed.c.end());
    auto rec = gauge_trivialize_formal(phi, Phi, order);
    REQUIRE(rec.ok); // internal verification re-applies the recovered gauge

    // inconsistent input series is rejected
    std::vector<AlgebraElement> junk = Phi;
    junk[0] += fx::random_element(lie, -1, 1, rng);
    if (!ts_mc_residual([&] {
             TSeries t(lie, order);
             t.c[0] = phi;
             for (int n = 1; n <= order; ++n) t.c[(size_t)n] = junk[(size_t)(n - 1)];
             return t;
         }()).is_zero())
        CHECK_THROWS_AS(gauge_trivialize_formal(phi, junk, order), InvalidDeformation);
}
