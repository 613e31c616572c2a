#ifndef MCX_OPERAD_UTIL_HPP
#define MCX_OPERAD_UTIL_HPP

#include <mcx/scalar.hpp>

#include <map>
#include <stdexcept>
#include <vector>

namespace mcx {

struct IndexOutOfRange : std::out_of_range {
    explicit IndexOutOfRange(const std::string& what) : std::out_of_range(what) {}
};

// Formal linear combination of canonical generators; zero coefficients are
// dropped eagerly so equality is structural.
template <class G>
using LinComb = std::map<G, Scalar>;

template <class G>
void add_term(LinComb<G>& lc, const G& g, const Scalar& c) {
    if (c == 0) return;
    auto [it, fresh] = lc.emplace(g, c);
    if (!fresh) {
        it->second += c;
        if (it->second == 0) lc.erase(it);
    }
}

template <class G>
void add_scaled(LinComb<G>& lc, const LinComb<G>& other, const Scalar& c) {
    for (const auto& [g, v] : other) add_term(lc, g, c * v);
}

// Sign of the permutation written in one-line notation (entries distinct).
inline int perm_parity(const std::vector<int>& p) {
    int s = 1;
    for (size_t i = 0; i < p.size(); ++i)
        for (size_t j = i + 1; j < p.size(); ++j)
            if (p[i] > p[j]) s = -s;
    return s;
}

} // namespace mcx

#endif
