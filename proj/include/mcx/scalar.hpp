#ifndef MCX_SCALAR_HPP
#define MCX_SCALAR_HPP

#include <gmpxx.h>
#include <string>
#include <stdexcept>

namespace mcx {

/*
 * Exact rational scalar. mpq_class keeps values canonical (lowest terms,
 * positive denominator), which is exactly the invariant we need; everything
 * downstream assumes value equality is structural equality.
 */
using Scalar = mpq_class;

inline Scalar scalar_from_string(const std::string& s) {
    mpq_class q;
    if (q.set_str(s, 10) != 0)
        throw std::invalid_argument("bad rational literal: " + s);
    q.canonicalize();
    return q;
}

// "p" for integers, "p/q" otherwise; matches the JSON coefficient format.
inline std::string scalar_to_string(const Scalar& q) {
    return q.get_str();
}

inline Scalar frac(long p, long q) {
    Scalar r(p, q);
    r.canonicalize();
    return r;
}

} // namespace mcx

#endif
