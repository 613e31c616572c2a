#ifndef FIXTURES_HPP
#define FIXTURES_HPP

#include <mcx/algebra.hpp>

#include <random>
#include <string>
#include <vector>

/*
 * Random-but-exact algebra fixtures.
 *
 * The base construction is a truncated free associative word algebra on a
 * few letters with a derivation differential: associativity makes the
 * pre-Lie axiom hold on the nose, the commutator gives a genuine dg Lie
 * algebra, and a filtration-compatible change of basis scrambles the
 * structure constants so the instances don't look special. Everything stays
 * exact by construction, so the axioms hold with zero tolerance.
 */

namespace fx {

struct Letter {
    char sym;
    int degree;
    int dtarget; // index of the letter this one maps to under d, or -1
};

// words over the letters, weight = length, concatenation product,
// derivation differential; kind PreLie gets the empty word as unit
inline mcx::AlgebraPtr word_algebra(const std::vector<Letter>& letters, int W,
                                    mcx::AlgKind kind) {
    auto spec = std::make_shared<mcx::FilteredAlgebraSpec>();
    spec->kind = kind;
    spec->truncation_weight = W;

    std::vector<std::string> words;
    if (kind == mcx::AlgKind::PreLie) {
        spec->unit = spec->add_basis("1", 0, 0);
        words.push_back("");
    }
    std::vector<std::string> prev = {""};
    for (int len = 1; len <= W; ++len) {
        std::vector<std::string> cur;
        for (const auto& w : prev)
            for (const auto& l : letters) {
                std::string nw = w + l.sym;
                cur.push_back(nw);
                int deg = 0;
                for (char c : nw)
                    for (const auto& m : letters)
                        if (m.sym == c) deg += m.degree;
                spec->add_basis(nw, deg, len);
                words.push_back(nw);
            }
        prev = std::move(cur);
    }

    auto idx = [&](const std::string& w) {
        return spec->index.at(w.empty() ? std::string("1") : w);
    };
    auto letter_of = [&](char c) -> const Letter& {
        for (const auto& l : letters)
            if (l.sym == c) return l;
        throw std::logic_error("unknown letter");
    };

    for (const auto& wa : words)
        for (const auto& wb : words) {
            if ((int)(wa.size() + wb.size()) > W) continue;
            if (kind == mcx::AlgKind::DgLie) {
                if (wa.empty() || wb.empty()) continue;
                // graded commutator of the concatenation product
                mcx::SparseVec v;
                int da = spec->degree[(size_t)idx(wa)], db = spec->degree[(size_t)idx(wb)];
                v[idx(wa + wb)] += mcx::Scalar(1);
                mcx::Scalar sg = (da * db) % 2 ? mcx::Scalar(1) : mcx::Scalar(-1);
                v[idx(wb + wa)] += sg;
                for (auto it = v.begin(); it != v.end();)
                    it = it->second == 0 ? v.erase(it) : std::next(it);
                spec->set_product(idx(wa), idx(wb), v);
            } else {
                spec->set_product(idx(wa), idx(wb), {{idx(wa + wb), mcx::Scalar(1)}});
            }
        }

    for (const auto& w : words) {
        if (w.empty()) continue;
        mcx::SparseVec v;
        int sign_exp = 0;
        for (size_t i = 0; i < w.size(); ++i) {
            const Letter& l = letter_of(w[i]);
            if (l.dtarget >= 0) {
                std::string dw = w;
                dw[i] = letters[(size_t)l.dtarget].sym;
                mcx::Scalar c = sign_exp % 2 ? mcx::Scalar(-1) : mcx::Scalar(1);
                mcx::Scalar& slot = v[idx(dw)];
                slot += c;
                if (slot == 0) v.erase(idx(dw));
            }
            sign_exp += l.degree;
        }
        spec->set_differential(idx(w), v);
    }

    mcx::AlgebraPtr out = spec;
    mcx::validate_algebra(out);
    return out;
}

// the standard letter set: u (degree 0) with d(u) = v, a closed letter w
inline std::vector<Letter> standard_letters(int count) {
    std::vector<Letter> ls = {{'u', 0, 1}, {'v', -1, -1}};
    if (count >= 3) ls.push_back({'w', 0, -1});
    return ls;
}

inline mcx::Scalar rand_scalar(std::mt19937_64& rng) {
    long num = (long)(rng() % 7) - 3;
    long den = 1 + (long)(rng() % 3);
    return mcx::frac(num, den);
}

/*
 * Filtration-compatible change of basis: e'_i = e_i + (same-degree,
 * strictly higher weight terms). The transported structure constants give a
 * fresh-looking instance that satisfies all axioms exactly.
 */
inline mcx::AlgebraPtr scramble_basis(const mcx::AlgebraPtr& alg, std::mt19937_64& rng) {
    const auto& A = *alg;
    int n = (int)A.dim();
    std::vector<mcx::SparseVec> T((size_t)n); // new basis in old coordinates
    for (int i = 0; i < n; ++i) {
        T[(size_t)i][i] = mcx::Scalar(1);
        if (i == A.unit) continue;
        for (int j = 0; j < n; ++j) {
            if (A.degree[(size_t)j] != A.degree[(size_t)i] ||
                A.weight[(size_t)j] <= A.weight[(size_t)i])
                continue;
            if (rng() % 4 == 0) {
                mcx::Scalar c = rand_scalar(rng);
                if (c != 0) T[(size_t)i][j] = c;
            }
        }
    }
    // old basis in new coordinates, by decreasing weight
    std::vector<mcx::SparseVec> U((size_t)n);
    std::vector<int> order((size_t)n);
    for (int i = 0; i < n; ++i) order[(size_t)i] = i;
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        return A.weight[(size_t)a] > A.weight[(size_t)b];
    });
    for (int i : order) {
        mcx::SparseVec u = {{i, mcx::Scalar(1)}};
        for (const auto& [j, c] : T[(size_t)i]) {
            if (j == i) continue;
            for (const auto& [k, ck] : U[(size_t)j]) {
                mcx::Scalar& slot = u[k];
                slot -= c * ck;
                if (slot == 0) u.erase(k);
            }
        }
        U[(size_t)i] = std::move(u);
    }

    auto to_new = [&](const mcx::AlgebraElement& x) {
        mcx::SparseVec r;
        for (const auto& [k, ck] : x.coeffs())
            for (const auto& [m, cm] : U[(size_t)k]) {
                mcx::Scalar& slot = r[m];
                slot += ck * cm;
                if (slot == 0) r.erase(m);
            }
        return r;
    };

    auto spec = std::make_shared<mcx::FilteredAlgebraSpec>();
    spec->kind = A.kind;
    spec->unit = A.unit;
    spec->truncation_weight = A.truncation_weight;
    for (int i = 0; i < n; ++i) spec->add_basis(A.names[(size_t)i], A.degree[(size_t)i], A.weight[(size_t)i]);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (A.weight[(size_t)i] + A.weight[(size_t)j] > A.truncation_weight) continue;
            mcx::AlgebraElement p = mul(mcx::AlgebraElement(alg, T[(size_t)i]),
                                        mcx::AlgebraElement(alg, T[(size_t)j]));
            spec->set_product(i, j, to_new(p));
        }
    for (int i = 0; i < n; ++i) {
        mcx::AlgebraElement di = d(mcx::AlgebraElement(alg, T[(size_t)i]));
        spec->set_differential(i, to_new(di));
    }
    mcx::AlgebraPtr out = spec;
    mcx::validate_algebra(out);
    return out;
}

// random element, homogeneous of the given degree, weight >= min_weight
inline mcx::AlgebraElement random_element(const mcx::AlgebraPtr& alg, int degree, int min_weight,
                                          std::mt19937_64& rng, int density_inv = 3) {
    mcx::SparseVec v;
    for (size_t i = 0; i < alg->dim(); ++i) {
        if (alg->degree[i] != degree || alg->weight[i] < min_weight) continue;
        if (rng() % (unsigned)density_inv == 0) {
            mcx::Scalar c = rand_scalar(rng);
            if (c != 0) v[(int)i] = c;
        }
    }
    return mcx::AlgebraElement(alg, v);
}

/*
 * Minimal pre-Lie instance on one generator where the two weight-3
 * right-combs stay distinct: basis 1, a, b = a*a, p = (a*a)*a, q = a*(a*a),
 * truncated above weight 3. Distinguishes the two order-3 terms of the
 * pre-Lie Magnus expansion.
 */
inline mcx::AlgebraPtr one_gen_prelie() {
    auto spec = std::make_shared<mcx::FilteredAlgebraSpec>();
    spec->kind = mcx::AlgKind::PreLie;
    spec->truncation_weight = 3;
    int one = spec->add_basis("1", 0, 0);
    int a = spec->add_basis("a", 0, 1);
    int b = spec->add_basis("aa", 0, 2);
    int p = spec->add_basis("aa.a", 0, 3);
    int q = spec->add_basis("a.aa", 0, 3);
    spec->unit = one;
    for (int x : {one, a, b, p, q}) {
        spec->set_product(one, x, {{x, mcx::Scalar(1)}});
        if (x != one) spec->set_product(x, one, {{x, mcx::Scalar(1)}});
    }
    spec->set_product(a, a, {{b, mcx::Scalar(1)}});
    spec->set_product(b, a, {{p, mcx::Scalar(1)}});
    spec->set_product(a, b, {{q, mcx::Scalar(1)}});
    mcx::AlgebraPtr out = spec;
    mcx::validate_algebra(out);
    return out;
}

} // namespace fx

#endif
