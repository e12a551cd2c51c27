#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "hk2/error.hpp"
#include "hk2/rational.hpp"

namespace hk2 {

enum class ConvMethod { automatic, naive, wht };

namespace detail {

inline bool is_pow2(std::size_t n) { return n && (n & (n - 1)) == 0; }

// In-place Walsh-Hadamard butterflies, unnormalized.
inline void wht_in_place(std::vector<Rat>& a) {
  const std::size_t n = a.size();
  for (std::size_t len = 1; len < n; len <<= 1)
    for (std::size_t block = 0; block < n; block += 2 * len)
      for (std::size_t k = block; k < block + len; ++k) {
        Rat x = a[k];
        Rat y = a[k + len];
        a[k] = x + y;
        a[k + len] = x - y;
      }
}

}  // namespace detail

// w_k = sum over i xor j = k of u_i v_j, exact over Q.  The WHT route
// transforms both inputs, multiplies pointwise, transforms back and divides
// by the length; naive is the O(n^2) reference.  `automatic` switches to the
// transform at length 32.
inline std::vector<Rat> xor_convolve(const std::vector<Rat>& u, const std::vector<Rat>& v,
                                     ConvMethod method = ConvMethod::automatic) {
  if (u.size() != v.size()) throw precondition_error("xor_convolve: length mismatch");
  if (!detail::is_pow2(u.size()))
    throw precondition_error("xor_convolve: length must be a power of two");
  const std::size_t n = u.size();
  if (method == ConvMethod::automatic)
    method = n >= 32 ? ConvMethod::wht : ConvMethod::naive;
  if (method == ConvMethod::naive) {
    std::vector<Rat> w(n, Rat(0));
    for (std::size_t i = 0; i < n; ++i) {
      if (u[i] == 0) continue;
      for (std::size_t j = 0; j < n; ++j) {
        if (v[j] == 0) continue;
        w[i ^ j] += u[i] * v[j];
      }
    }
    return w;
  }
  std::vector<Rat> a = u;
  std::vector<Rat> b = v;
  detail::wht_in_place(a);
  detail::wht_in_place(b);
  for (std::size_t i = 0; i < n; ++i) a[i] *= b[i];
  detail::wht_in_place(a);
  const Rat scale = make_rat(1, Int(static_cast<unsigned long>(n)));
  for (std::size_t i = 0; i < n; ++i) a[i] *= scale;
  return a;
}

// A function [0,1] -> Q sampled on the dyadic grid {i/2^n : 0 <= i <= 2^n},
// vanishing at 0.
struct XElement {
  unsigned level = 0;
  std::vector<Rat> values;  // size 2^level + 1, values[0] == 0

  std::uint64_t q() const { return std::uint64_t{1} << level; }
};

using PhiSample = XElement;

inline XElement make_x_element(unsigned level, std::vector<Rat> values) {
  if (level >= 63) throw precondition_error("level too large");
  if (values.size() != (std::uint64_t{1} << level) + 1)
    throw precondition_error("x element needs 2^level + 1 values");
  if (values.front() != 0) throw precondition_error("x element must vanish at 0");
  return XElement{level, std::move(values)};
}

inline std::vector<Rat> increments(const XElement& a) {
  std::vector<Rat> d(a.values.size() - 1);
  for (std::size_t i = 0; i + 1 < a.values.size(); ++i) d[i] = a.values[i + 1] - a.values[i];
  return d;
}

inline XElement from_increments(unsigned level, const std::vector<Rat>& d) {
  if (d.size() != (std::uint64_t{1} << level))
    throw precondition_error("increment vector needs 2^level entries");
  std::vector<Rat> v(d.size() + 1);
  v[0] = 0;
  for (std::size_t i = 0; i < d.size(); ++i) v[i + 1] = v[i] + d[i];
  return XElement{level, std::move(v)};
}

// The # product at a fixed level: increments XOR-convolve.  The alternating
// signs of the gamma transform cancel because i + j and i xor j have the
// same parity.
inline XElement sharp(const XElement& a, const XElement& b,
                      ConvMethod method = ConvMethod::automatic) {
  if (a.level != b.level) throw precondition_error("sharp: level mismatch");
  return from_increments(a.level, xor_convolve(increments(a), increments(b), method));
}

// Restriction to the next coarser grid: keep even-index samples.
inline XElement coarsen(const XElement& a) {
  if (a.level == 0) throw precondition_error("coarsen: already at level 0");
  std::vector<Rat> v((a.values.size() - 1) / 2 + 1);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = a.values[2 * i];
  return XElement{a.level - 1, std::move(v)};
}

// phi of uv in two variables, sampled from e_n((uv)^i) = q^2 - (q-i)^2.
inline XElement phi_uv_closed_form(unsigned level) {
  if (level >= 63) throw precondition_error("level too large");
  const std::uint64_t q = std::uint64_t{1} << level;
  const Int qz(static_cast<unsigned long>(q));
  const Int q2 = qz * qz;
  std::vector<Rat> v(q + 1);
  for (std::uint64_t i = 0; i <= q; ++i) {
    const Int gap = qz - Int(static_cast<unsigned long>(i));
    v[i] = make_rat(q2 - gap * gap, q2);
  }
  return XElement{level, std::move(v)};
}

// Rational vector on the basis lambda_0..lambda_{q-1}; the basis multiplies
// by lambda_i * lambda_j = lambda_{i xor j} (Nim-sum of indices).
struct GammaElement {
  unsigned level = 0;
  std::vector<Rat> coeffs;  // size 2^level
};

// Signed-increment transform: lambda_i carries (-1)^i (a((i+1)/q) - a(i/q)).
inline GammaElement to_gamma(const XElement& a) {
  std::vector<Rat> c = increments(a);
  for (std::size_t i = 1; i < c.size(); i += 2) c[i] = -c[i];
  return GammaElement{a.level, std::move(c)};
}

inline GammaElement gamma_mul(const GammaElement& x, const GammaElement& y,
                              ConvMethod method = ConvMethod::automatic) {
  if (x.level != y.level) throw precondition_error("gamma_mul: level mismatch");
  return GammaElement{x.level, xor_convolve(x.coeffs, y.coeffs, method)};
}

// The functional sending every basis element to 1: sum of coefficients.
inline Rat eta(const GammaElement& x) {
  Rat s = 0;
  for (const auto& c : x.coeffs) s += c;
  return s;
}

// Checks, exactly, that for a at level n >= 1
//   eta(to_gamma(a)) = 2^{2n} (phi_uv # a)(1/2^n) - 2^{2n-1} (phi_uv # a)(1/2^{n-1}).
inline bool eta_uv_identity_holds(const XElement& a) {
  if (a.level == 0) throw precondition_error("identity needs level >= 1");
  const XElement s = sharp(phi_uv_closed_form(a.level), a);
  const Rat lhs = eta(to_gamma(a));
  const long n = static_cast<long>(a.level);
  const Rat rhs = rat_pow2(2 * n) * s.values[1] - rat_pow2(2 * n - 1) * s.values[2];
  return lhs == rhs;
}

}  // namespace hk2
