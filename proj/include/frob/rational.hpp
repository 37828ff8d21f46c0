#pragma once

#include <gmpxx.h>

#include <string>

#include "frob/error.hpp"

namespace frob {

// Exact arithmetic throughout: arbitrary-precision integers and rationals.
// mpq_class keeps the invariants we need (denominator > 0, fully reduced).
using Int = mpz_class;
using Rat = mpq_class;

inline Rat rat(long num, long den = 1) {
    Rat q(num, den);
    q.canonicalize();
    return q;
}

inline bool is_zero(const Rat& q) { return sgn(q) == 0; }

// Serializes as "p" or "p/q"; the CLI never emits floats.
std::string rat_to_string(const Rat& q);

// Accepts "p" or "p/q" with optional leading '-'.
Rat rat_from_string(const std::string& text);

} // namespace frob
