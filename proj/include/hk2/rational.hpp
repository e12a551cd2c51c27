#pragma once

#include <gmpxx.h>

#include <string>

#include "hk2/error.hpp"

namespace hk2 {

using Int = mpz_class;
using Rat = mpq_class;

inline Int int_pow(const Int& base, unsigned long exp) {
  Int r;
  mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), exp);
  return r;
}

inline Int int_pow2(unsigned long exp) {
  Int r;
  mpz_ui_pow_ui(r.get_mpz_t(), 2, exp);
  return r;
}

inline Rat make_rat(const Int& num, const Int& den) {
  if (den == 0) throw precondition_error("rational with zero denominator");
  Rat r(num, den);
  r.canonicalize();
  return r;
}

// 2^exp, exp may be negative.
inline Rat rat_pow2(long exp) {
  return exp >= 0 ? Rat(int_pow2(static_cast<unsigned long>(exp)))
                  : make_rat(1, int_pow2(static_cast<unsigned long>(-exp)));
}

inline Rat rat_pow(const Rat& base, unsigned long exp) {
  Rat r = 1;
  Rat b = base;
  while (exp) {
    if (exp & 1) r *= b;
    exp >>= 1;
    if (exp) b *= b;
  }
  return r;
}

inline Rat rat_abs(const Rat& x) { return x < 0 ? Rat(-x) : x; }

// Accepts "p", "-p" or "p/q" in base 10.
inline Rat parse_rat(const std::string& text) {
  Rat r;
  try {
    r = Rat(text);
  } catch (const std::invalid_argument&) {
    throw parse_error("malformed rational: '" + text + "'");
  }
  if (r.get_den() == 0) throw parse_error("rational with zero denominator: '" + text + "'");
  r.canonicalize();
  return r;
}

inline std::string rat_string(const Rat& x) { return x.get_str(); }

// First `digits` decimal places, truncated toward zero.
inline std::string decimal_string(const Rat& x, unsigned digits) {
  Int num = x.get_num();
  const Int& den = x.get_den();
  const bool neg = num < 0;
  if (neg) num = -num;
  Int scaled;
  const Int shifted = num * int_pow(Int(10), digits);
  mpz_tdiv_q(scaled.get_mpz_t(), shifted.get_mpz_t(), den.get_mpz_t());
  std::string s = scaled.get_str();
  if (digits > 0) {
    if (s.size() <= digits) s.insert(0, digits + 1 - s.size(), '0');
    s.insert(s.size() - digits, ".");
  }
  return neg ? "-" + s : s;
}

}  // namespace hk2
