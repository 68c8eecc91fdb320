#pragma once

#include <string>
#include <string_view>

#include <gmpxx.h>

namespace collapse {

using Rational = mpq_class;

// Parses "12", "-0.25", "2.5e3" or "3/4" exactly. Throws InputError.
Rational parse_rational(std::string_view text);

std::string to_string(const Rational& q);

// Correctly rounded when numerator and denominator are exact doubles.
inline double to_double(const Rational& q) {
  const mpz_class& n = q.get_num();
  const mpz_class& d = q.get_den();
  if (mpz_sizeinbase(n.get_mpz_t(), 2) <= 53 && mpz_sizeinbase(d.get_mpz_t(), 2) <= 53) return n.get_d() / d.get_d();
  return q.get_d();
}

inline Rational abs(const Rational& q) { return q < 0 ? Rational(-q) : q; }

}  // namespace collapse
