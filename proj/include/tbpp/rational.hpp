#ifndef TBPP_RATIONAL_HPP
#define TBPP_RATIONAL_HPP

// Exact rational arithmetic. All timed semantics in this library are computed
// over exact rationals; floating point is never used for clock values,
// durations, or formula constants.

#include <gmpxx.h>

#include <optional>
#include <stdexcept>
#include <string>

namespace tbpp {

using Rat = mpq_class;
using Int = mpz_class;

inline Rat rat(long num, long den = 1) {
    Rat q(num, den);
    q.canonicalize();
    return q;
}

inline Int floor_int(const Rat& q) {
    Int f;
    mpz_fdiv_q(f.get_mpz_t(), q.get_num().get_mpz_t(), q.get_den().get_mpz_t());
    return f;
}

inline Rat floor_rat(const Rat& q) { return Rat(floor_int(q)); }

inline Rat frac_rat(const Rat& q) { return q - floor_rat(q); }

inline bool is_integer(const Rat& q) { return q.get_den() == 1; }

// Parses "p", "-p", or "p/q". Throws std::invalid_argument on malformed input.
inline Rat parse_rat(const std::string& text) {
    if (text.empty()) throw std::invalid_argument("empty rational literal");
    Rat q;
    if (q.set_str(text, 10) != 0)
        throw std::invalid_argument("malformed rational literal: " + text);
    if (q.get_den() == 0) throw std::invalid_argument("zero denominator: " + text);
    q.canonicalize();
    return q;
}

inline std::string rat_str(const Rat& q) { return q.get_str(); }

inline Int lcm_int(const Int& a, const Int& b) {
    Int r;
    mpz_lcm(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return r;
}

// Least common multiple of denominators, used when rescaling a model and
// query to integer constants.
template <typename It>
Int denominator_lcm(It begin, It end) {
    Int l = 1;
    for (It it = begin; it != end; ++it) l = lcm_int(l, it->get_den());
    return l;
}

// Some rational strictly between lo and hi (lo < hi required).
inline Rat rat_between(const Rat& lo, const Rat& hi) {
    if (!(lo < hi)) throw std::logic_error("rat_between: empty interval");
    return (lo + hi) / 2;
}

}  // namespace tbpp

#endif
