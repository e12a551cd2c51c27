#pragma once

#include <cstdint>
#include <vector>

#include "hk2/bitmatrix.hpp"
#include "hk2/error.hpp"
#include "hk2/poly2.hpp"

namespace hk2 {

inline constexpr std::uint64_t kDefaultSizeLimit = std::uint64_t{1} << 21;

// The quotient R_q = F[x_1..x_r]/(x_1^q,...,x_r^q) at level n, q = 2^n.
struct QuotientSpec {
  std::size_t r = 1;
  unsigned level = 0;
  std::uint64_t q = 1;  // always 2^level

  static QuotientSpec at_level(std::size_t r, unsigned level) {
    if (level >= 63) throw size_limit_error("level too large: instance too large");
    return {r, level, std::uint64_t{1} << level};
  }

  // dim R_q = q^r, guarded.
  std::uint64_t dimension(std::uint64_t limit) const {
    std::uint64_t d = 1;
    for (std::size_t k = 0; k < r; ++k) {
      if (d > limit / q) throw size_limit_error("q^r exceeds the size limit: instance too large");
      d *= q;
    }
    return d;
  }
};

// dim_F F[x_1..x_r]/(f, x_1^q,...,x_r^q) = q^r - rank(mult-by-f on R_q).
//
// Basis monomials of R_q are ordered lexicographically: the index of x^a is
// sum a_k q^{r-1-k} (first variable most significant).  The row for output
// monomial x^a has a bit at every input index x^{a-t}, t a term of f; terms
// with any exponent >= q vanish in R_q.  No Groebner machinery is needed
// because the modulus is a monomial complete intersection.
inline std::uint64_t colength(const Poly2& f, const QuotientSpec& spec,
                              std::uint64_t size_limit = kDefaultSizeLimit) {
  if (f.var_count() != spec.r)
    throw precondition_error("variable count does not match quotient spec");
  const std::uint64_t dim = spec.dimension(size_limit);
  if (f.is_zero()) return dim;

  std::vector<Monomial> terms;
  for (const auto& t : f.terms()) {
    bool alive = true;
    for (std::uint32_t e : t)
      if (e >= spec.q) {
        alive = false;
        break;
      }
    if (alive) terms.push_back(t);
  }
  if (terms.empty()) return dim;  // f lies in the Frobenius power

  std::vector<std::uint64_t> stride(spec.r, 1);
  for (std::size_t k = spec.r; k-- > 1;) stride[k - 1] = stride[k] * spec.q;

  const std::size_t words = Gf2Eliminator::words_for(dim);
  Gf2Eliminator elim(dim);
  std::vector<std::uint32_t> expo(spec.r, 0);
  for (std::uint64_t i = 0; i < dim; ++i) {
    std::vector<std::uint64_t> row(words, 0);
    bool nonzero = false;
    for (const auto& t : terms) {
      std::uint64_t j = 0;
      bool fits = true;
      for (std::size_t k = 0; k < spec.r; ++k) {
        if (expo[k] < t[k]) {
          fits = false;
          break;
        }
        j += (expo[k] - t[k]) * stride[k];
      }
      if (!fits) continue;
      row[j / 64] ^= std::uint64_t{1} << (j % 64);
      nonzero = true;
    }
    if (nonzero) elim.insert(std::move(row));
    // odometer step through the exponent box [0,q)^r
    for (std::size_t k = spec.r; k-- > 0;) {
      if (++expo[k] < spec.q) break;
      expo[k] = 0;
    }
  }
  return dim - elim.rank();
}

}  // namespace hk2
