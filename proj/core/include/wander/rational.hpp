#pragma once

#include <gmpxx.h>
#include <stdexcept>
#include <string>

namespace wander {

// Exact rational, the currency of all log-scale radius computations.
// A LogRadius q stands for the radius p^q. mpq_class keeps values
// reduced with positive denominator, so no extra normalization is needed.
using Rat = mpq_class;
using LogRadius = Rat;

inline Rat rat(long num, long den = 1) { return Rat(num, den); }

inline std::string rat_str(const Rat& q) { return q.get_str(); }

inline Rat rat_parse(const std::string& s) {
  Rat q;
  if (q.set_str(s, 10) != 0)
    throw std::invalid_argument("bad rational: " + s);
  q.canonicalize();
  return q;
}

// Largest integer <= q.
inline mpz_class rat_floor(const Rat& q) {
  mpz_class f;
  mpz_fdiv_q(f.get_mpz_t(), q.get_num().get_mpz_t(), q.get_den().get_mpz_t());
  return f;
}

inline mpz_class rat_ceil(const Rat& q) {
  mpz_class c;
  mpz_cdiv_q(c.get_mpz_t(), q.get_num().get_mpz_t(), q.get_den().get_mpz_t());
  return c;
}

inline bool is_integer(const Rat& q) { return q.get_den() == 1; }

}  // namespace wander
