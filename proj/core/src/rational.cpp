#include "regforge/rational.hpp"

namespace regforge {

Rat parse_rational(const std::string& s) {
  if (s.empty()) throw Error("empty rational literal");
  auto slash = s.find('/');
  if (slash != std::string::npos) {
    Int num, den;
    if (num.set_str(s.substr(0, slash), 10) != 0 ||
        den.set_str(s.substr(slash + 1), 10) != 0)
      throw Error("cannot parse rational '" + s + "'");
    if (den == 0) throw Error("zero denominator in '" + s + "'");
    Rat r(num, den);
    r.canonicalize();
    return r;
  }
  auto dot = s.find('.');
  if (dot != std::string::npos) {
    std::string digits = s.substr(0, dot) + s.substr(dot + 1);
    size_t frac_len = s.size() - dot - 1;
    if (digits.empty() || digits == "-" || digits == "+")
      throw Error("cannot parse rational '" + s + "'");
    Int num;
    if (num.set_str(digits, 10) != 0)
      throw Error("cannot parse rational '" + s + "'");
    Int den = 1;
    for (size_t i = 0; i < frac_len; ++i) den *= 10;
    Rat r(num, den);
    r.canonicalize();
    return r;
  }
  Int num;
  if (num.set_str(s, 10) != 0) throw Error("cannot parse rational '" + s + "'");
  return Rat(num);
}

std::string rat_str(const Rat& r) { return r.get_str(); }

Rat pow2_rat(long e) {
  Int one = 1;
  if (e >= 0) {
    Int v = one << static_cast<unsigned long>(e);
    return Rat(v);
  }
  Int v = one << static_cast<unsigned long>(-e);
  Rat r(1, v);
  r.canonicalize();
  return r;
}

Rat rat_pow(const Rat& r, unsigned e) {
  Rat acc = 1;
  Rat base = r;
  while (e > 0) {
    if (e & 1u) acc *= base;
    base *= base;
    e >>= 1u;
  }
  return acc;
}

Int ceil_rat(const Rat& r) {
  Int q, rem;
  mpz_fdiv_qr(q.get_mpz_t(), rem.get_mpz_t(), r.get_num().get_mpz_t(),
              r.get_den().get_mpz_t());
  if (rem != 0) q += 1;
  return q;
}

}  // namespace regforge
