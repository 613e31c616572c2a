#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <mcx/free_lie.hpp>

using namespace mcx;

TEST_CASE("lyndon word recognition and factorization") {
    CHECK(is_lyndon("a"));
    CHECK(is_lyndon("ab"));
    CHECK(is_lyndon("aab"));
    CHECK(is_lyndon("abb"));
    CHECK_FALSE(is_lyndon("ba"));
    CHECK_FALSE(is_lyndon("aa"));
    CHECK_FALSE(is_lyndon("abab"));
    auto [u, v] = lyndon_factorize("aabab");
    CHECK(u == "aab");
    CHECK(v == "ab");
}

TEST_CASE("bch low orders match the classical expansion") {
    auto b1 = bch(1);
    CHECK(b1.coeffs == std::map<std::string, Scalar>{{"a", Scalar(1)}, {"b", Scalar(1)}});

    auto b2 = bch(2);
    CHECK(b2.coeffs.at("ab") == frac(1, 2));
    CHECK(b2.coeffs.size() == 3);

    auto b3 = bch(3);
    // 1/12[x,[x,y]] + 1/12[y,[y,x]]; the second equals +1/12*[[x,y],y] = b("abb")
    CHECK(b3.coeffs.at("aab") == frac(1, 12));
    CHECK(b3.coeffs.at("abb") == frac(1, 12));
    CHECK(b3.coeffs.size() == 5);

    // order 4 is a single commutator in multidegree x^2 y^2
    auto b4 = bch(4);
    CHECK(b4.coeffs.count("aaab") == 0);
    CHECK(b4.coeffs.count("abbb") == 0);
    CHECK(b4.coeffs.size() == 6);
}

TEST_CASE("bch lies in the Lie subspace up to order 8 (Dynkin)") {
    auto b = bch(8);
    AssocPoly p = b.expand();
    CHECK(dynkin_projects_correctly(p, 8));
    // round trip through the basis conversion
    auto back = lie_from_assoc(p, 8);
    CHECK(back.coeffs == b.coeffs);
}

TEST_CASE("bch associativity on three letters up to order 6") {
    const int N = 6;
    auto B = bch(N);
    AssocPoly x = {{"a", Scalar(1)}}, y = {{"b", Scalar(1)}}, z = {{"c", Scalar(1)}};
    auto bch_of = [&](const AssocPoly& p, const AssocPoly& q) {
        AssocPoly r;
        for (const auto& [w, c] : B.coeffs) {
            AssocPoly term = eval_lyndon_word<AssocPoly>(
                w, {p, q}, [&](const AssocPoly& s, const AssocPoly& t) {
                    return assoc_add(assoc_mul(s, t, N),
                                     assoc_scale(assoc_mul(t, s, N), Scalar(-1)));
                });
            r = assoc_add(r, assoc_scale(term, c));
        }
        return r;
    };
    AssocPoly lhs = bch_of(bch_of(x, y), z);
    AssocPoly rhs = bch_of(x, bch_of(y, z));
    CHECK(lhs == rhs);
    // and both equal log(e^x e^y e^z)
    AssocPoly exy = assoc_add(assoc_add(assoc_exp_m1(x, N), assoc_exp_m1(y, N)),
                              assoc_mul(assoc_exp_m1(x, N), assoc_exp_m1(y, N), N));
    AssocPoly all = assoc_add(assoc_add(exy, assoc_exp_m1(z, N)),
                              assoc_mul(exy, assoc_exp_m1(z, N), N));
    CHECK(lhs == assoc_log1p(all, N));
}

TEST_CASE("printer") {
    auto b3 = bch(3);
    CHECK(free_lie_to_string(b3, {"x", "y"}) ==
          "x + y + 1/2*[x,y] + 1/12*[x,[x,y]] + 1/12*[[x,y],y]");
}
