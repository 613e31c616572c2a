#ifndef MCX_FREE_LIE_HPP
#define MCX_FREE_LIE_HPP

#include <mcx/scalar.hpp>

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace mcx {

/*
 * Free associative / free Lie machinery over a small alphabet.
 *
 * Words are strings over letters 'a'+i (alphabet order = char order).
 * Lie elements are stored on the Lyndon basis, with the bracketing of a
 * Lyndon word given by its standard factorization. Conversion from the
 * associative picture uses the triangularity of that basis: the expansion
 * of b(w) is w plus lexicographically larger words of the same length.
 */

using AssocPoly = std::map<std::string, Scalar>; // word -> coefficient, no zeros

inline void add_to(AssocPoly& p, const std::string& w, const Scalar& c) {
    if (c == 0) return;
    Scalar& slot = p[w];
    slot += c;
    if (slot == 0) p.erase(w);
}

inline AssocPoly assoc_mul(const AssocPoly& a, const AssocPoly& b, int max_len) {
    AssocPoly r;
    for (const auto& [wa, ca] : a)
        for (const auto& [wb, cb] : b) {
            if ((int)(wa.size() + wb.size()) > max_len) continue;
            add_to(r, wa + wb, ca * cb);
        }
    return r;
}

inline AssocPoly assoc_add(AssocPoly a, const AssocPoly& b) {
    for (const auto& [w, c] : b) add_to(a, w, c);
    return a;
}

inline AssocPoly assoc_scale(AssocPoly a, const Scalar& s) {
    if (s == 0) return {};
    for (auto& [w, c] : a) c *= s;
    return a;
}

// exp(a) - 1 for a with no constant term
inline AssocPoly assoc_exp_m1(const AssocPoly& a, int max_len) {
    AssocPoly r, pw = a;
    Scalar fact = 1;
    for (int n = 1; n <= max_len && !pw.empty(); ++n) {
        fact *= n;
        r = assoc_add(r, assoc_scale(pw, Scalar(1) / fact));
        pw = assoc_mul(pw, a, max_len);
    }
    return r;
}

// log(1 + a) for a with no constant term
inline AssocPoly assoc_log1p(const AssocPoly& a, int max_len) {
    AssocPoly r, pw = a;
    for (int n = 1; n <= max_len && !pw.empty(); ++n) {
        Scalar c = frac(n % 2 ? 1 : -1, n);
        r = assoc_add(r, assoc_scale(pw, c));
        pw = assoc_mul(pw, a, max_len);
    }
    return r;
}

inline bool is_lyndon(const std::string& w) {
    if (w.empty()) return false;
    for (size_t i = 1; i < w.size(); ++i)
        if (w.substr(i) <= w) return false;
    return true;
}

// standard factorization w = uv with v the longest proper Lyndon suffix
inline std::pair<std::string, std::string> lyndon_factorize(const std::string& w) {
    for (size_t i = 1; i < w.size(); ++i) {
        std::string v = w.substr(i);
        if (is_lyndon(v)) return {w.substr(0, i), v};
    }
    throw std::logic_error("not a Lyndon word of length >= 2: " + w);
}

// associative expansion of the bracketing of a Lyndon word
inline AssocPoly lyndon_bracket_expand(const std::string& w, int max_len) {
    if ((int)w.size() > max_len) return {};
    if (w.size() == 1) return {{w, Scalar(1)}};
    auto [u, v] = lyndon_factorize(w);
    AssocPoly eu = lyndon_bracket_expand(u, max_len);
    AssocPoly ev = lyndon_bracket_expand(v, max_len);
    return assoc_add(assoc_mul(eu, ev, max_len), assoc_scale(assoc_mul(ev, eu, max_len), Scalar(-1)));
}

struct FreeLieElement {
    std::map<std::string, Scalar> coeffs; // Lyndon word -> coefficient
    int truncation_order = 0;

    AssocPoly expand() const {
        AssocPoly r;
        for (const auto& [w, c] : coeffs)
            r = assoc_add(r, assoc_scale(lyndon_bracket_expand(w, truncation_order), c));
        return r;
    }
};

/*
 * Rewrite an associative polynomial, assumed to be a Lie element, in the
 * Lyndon basis. The lex-smallest word of each homogeneous component must be
 * Lyndon and the residual must cancel completely; anything else means the
 * input was not a Lie element.
 */
inline FreeLieElement lie_from_assoc(AssocPoly p, int max_len) {
    FreeLieElement out;
    out.truncation_order = max_len;
    // peel per length so lengths don't interfere
    for (int len = 1; len <= max_len; ++len) {
        for (;;) {
            const std::string* smallest = nullptr;
            Scalar c;
            for (const auto& [w, cw] : p)
                if ((int)w.size() == len) { smallest = &w; c = cw; break; }
            if (!smallest) break;
            std::string w = *smallest;
            if (!is_lyndon(w))
                throw std::invalid_argument("not a Lie element: leading word " + w);
            out.coeffs[w] = c;
            AssocPoly sub = assoc_scale(lyndon_bracket_expand(w, max_len), -c);
            p = assoc_add(p, sub);
        }
    }
    for (const auto& [w, c] : p)
        if ((int)w.size() <= max_len)
            throw std::invalid_argument("not a Lie element: residual at " + w);
    return out;
}

// left-normed bracketing map [[..[a1,a2],a3],..,an], extended linearly
inline AssocPoly dynkin_map(const AssocPoly& p, int max_len) {
    AssocPoly r;
    for (const auto& [w, c] : p) {
        AssocPoly acc = {{w.substr(0, 1), Scalar(1)}};
        for (size_t i = 1; i < w.size(); ++i) {
            AssocPoly letter = {{w.substr(i, 1), Scalar(1)}};
            acc = assoc_add(assoc_mul(acc, letter, max_len),
                            assoc_scale(assoc_mul(letter, acc, max_len), Scalar(-1)));
        }
        r = assoc_add(r, assoc_scale(acc, c));
    }
    return r;
}

// Dynkin-Specht-Wever: p homogeneous Lie of degree n satisfies D(p) = n p.
inline bool dynkin_projects_correctly(const AssocPoly& p, int max_len) {
    AssocPoly d = dynkin_map(p, max_len);
    AssocPoly diff = d;
    for (const auto& [w, c] : p) add_to(diff, w, -Scalar((long)w.size()) * c);
    return diff.empty();
}

// BCH(x, y) = log(e^x e^y) on the two-letter alphabet {a, b}, as a Lie element
inline FreeLieElement bch(int order) {
    if (order < 1) throw std::invalid_argument("bch order must be >= 1");
    AssocPoly x = {{"a", Scalar(1)}}, y = {{"b", Scalar(1)}};
    AssocPoly ex = assoc_exp_m1(x, order), ey = assoc_exp_m1(y, order);
    // e^x e^y - 1 = ex + ey + ex*ey
    AssocPoly prod = assoc_add(assoc_add(ex, ey), assoc_mul(ex, ey, order));
    AssocPoly z = assoc_log1p(prod, order);
    if (!dynkin_projects_correctly(z, order))
        throw std::logic_error("BCH series failed the Dynkin projection check");
    return lie_from_assoc(z, order);
}

/*
 * Evaluate a Lie element with arbitrary arguments substituted for letters.
 * Brackets are evaluated through the standard factorization; the bracket
 * callback receives evaluated subtrees. Used both for free associative
 * substitution and for evaluation inside finite algebras.
 */
template <typename T, typename Bracket>
T eval_lyndon_word(const std::string& w, const std::vector<T>& args, Bracket&& bracket) {
    if (w.size() == 1) return args.at((size_t)(w[0] - 'a'));
    auto [u, v] = lyndon_factorize(w);
    T eu = eval_lyndon_word(u, args, bracket);
    T ev = eval_lyndon_word(v, args, bracket);
    return bracket(eu, ev);
}

// bracket-notation printer: "x + y + 1/2*[x,y] + ..."
inline std::string lyndon_word_brackets(const std::string& w,
                                        const std::vector<std::string>& names) {
    if (w.size() == 1) return names.at((size_t)(w[0] - 'a'));
    auto [u, v] = lyndon_factorize(w);
    return "[" + lyndon_word_brackets(u, names) + "," + lyndon_word_brackets(v, names) + "]";
}

inline std::string free_lie_to_string(const FreeLieElement& e,
                                      const std::vector<std::string>& names) {
    std::string s;
    // shortest words first, then lexicographic
    std::map<std::pair<size_t, std::string>, Scalar> ordered;
    for (const auto& [w, c] : e.coeffs) ordered[{w.size(), w}] = c;
    for (const auto& [key, c] : ordered) {
        if (!s.empty()) s += " + ";
        if (c != 1 || key.first == 0) s += scalar_to_string(c) + "*";
        s += lyndon_word_brackets(key.second, names);
    }
    return s.empty() ? "0" : s;
}

} // namespace mcx

#endif
