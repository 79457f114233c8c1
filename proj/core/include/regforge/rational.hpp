#pragma once

#include <gmpxx.h>

#include <stdexcept>
#include <string>

namespace regforge {

// Exact rational; every density, weight and threshold in the library is one.
using Rat = mpq_class;
using Int = mpz_class;

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Parses "p/q", "p", or a finite decimal like "0.25" into an exact rational.
Rat parse_rational(const std::string& s);

// Canonical "p/q" (or "p" when integral) form, matching parse_rational.
std::string rat_str(const Rat& r);

// num/den in canonical form (two-argument mpq_class does not canonicalize).
inline Rat frac(long num, long den) {
  Rat r(num, den);
  r.canonicalize();
  return r;
}

// 2^e for e possibly negative.
Rat pow2_rat(long e);

// 4^{-g}; the trap-weight schedule uses these.
inline Rat four_pow_neg(long g) { return pow2_rat(-2 * g); }

// r^e for small nonnegative e.
Rat rat_pow(const Rat& r, unsigned e);

// Smallest integer >= r.
Int ceil_rat(const Rat& r);

inline long bit_length(const Int& v) {
  return v == 0 ? 0 : static_cast<long>(mpz_sizeinbase(v.get_mpz_t(), 2));
}

// floor(log2 v) for v >= 1.
inline long floor_log2(const Int& v) {
  if (v < 1) throw Error("floor_log2: argument must be >= 1");
  return bit_length(v) - 1;
}

}  // namespace regforge
