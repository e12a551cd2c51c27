#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "hk2/binomial.hpp"
#include "hk2/error.hpp"
#include "hk2/rational.hpp"
#include "hk2/theta.hpp"

namespace hk2 {

// sum_n A_n^2 lambda^{2n} for rational lambda in (0, 1/4), with a geometric
// tail bound from the term ratio (A_{n+1}/A_n)^2 lambda^2 <= 16 lambda^2 < 1.
// The enclosure width stays below 10^{-digits}.
inline RationalEnclosure schneider_sum(const Rat& lambda, unsigned digits) {
  if (!(lambda > 0 && lambda < make_rat(1, 4)))
    throw precondition_error("lambda must lie in (0, 1/4)");
  const Rat ratio_cap = 16 * lambda * lambda;
  const Rat target = make_rat(1, int_pow(Int(10), digits));
  const Rat l2 = lambda * lambda;
  Rat sum = 0;
  Rat term = 1;  // A_n^2 lambda^{2n}
  for (unsigned long n = 0; n <= 1000000; ++n) {
    sum += term;
    const Rat ratio = make_rat(Int(4 * n + 2), Int(n + 1));
    term *= ratio * ratio * l2;
    const Rat tail = term / (Rat(1) - ratio_cap);
    if (tail < target) return {sum + tail / 2, tail / 2};
  }
  throw convergence_error("schneider_sum did not reach the requested width");
}

struct DecompositionReport {
  std::size_t order = 0;  // identities checked for n <= order
  unsigned digits = 0;
  std::vector<CheckLine> identity_checks;
  std::map<std::string, Int> sum_weights;  // weight on each labeled bilinear sum
  Int constant_term;                       // additive constant from the index shift
  std::array<LabeledEnclosure, 5> sums;
  RationalEnclosure lhs;  // 64 * sum A_n^2 / 2^{16n}
  RationalEnclosure rhs;  // weighted bilinear sums + constant
  bool identities_ok = false;
  bool sides_agree = false;

  bool ok() const { return identities_ok && sides_agree; }
};

// Decomposition of the central-binomial constant at lambda = 1/2^8 into the
// five bilinear multiplicity sums of the conjectural nodal series:
//
//   64 sum A_n^2 / 2^{16n} = sum (a_{2n+2} - 6 a_{2n+1} + 8 a_{2n})^2 / 2^{16n}
//
// The quadratic form (X - 6Y + 8Z)^2 is expanded symbolically here (X, Y, Z
// standing for a_{2n+2}, a_{2n+1}, a_{2n}); each quadratic monomial routes to
// the bilinear sum carrying it, the X^2 one with a 2^16 reindexing factor and
// an additive constant.  Both sides are then evaluated as enclosures and must
// agree within their combined widths.
inline DecompositionReport schneider_decomposition(std::size_t N, unsigned digits) {
  DecompositionReport rep;
  rep.order = N;
  rep.digits = digits;

  const ThetaSeries tf = theta_nodal_conjectural(2 * N + 2);
  const BinomialTable A(N);
  rep.identities_ok = true;
  for (std::size_t n = 0; n <= N; ++n) {
    const Int lhs = tf.coeffs[2 * n + 2] - 6 * tf.coeffs[2 * n + 1] + 8 * tf.coeffs[2 * n];
    const Int rhs = -8 * A.at(n);
    CheckLine line;
    line.name = "a_" + std::to_string(2 * n + 2) + " - 6 a_" + std::to_string(2 * n + 1) +
                " + 8 a_" + std::to_string(2 * n) + " == -8 A_" + std::to_string(n);
    line.ok = lhs == rhs;
    line.detail = lhs.get_str() + " vs " + rhs.get_str();
    if (!line.ok) rep.identities_ok = false;
    rep.identity_checks.push_back(std::move(line));
  }
  if (!rep.identities_ok)
    throw identity_error("coefficient identity a_{2n+2} - 6a_{2n+1} + 8a_{2n} = -8 A_n failed");

  // symbolic expansion of (X - 6Y + 8Z)^2
  const std::array<Int, 3> form = {Int(1), Int(-6), Int(8)};  // X, Y, Z
  const char* pair_label[3][3] = {
      {"sum_a2n_sq", "sum_a2n1_a2n2", "sum_a2n_a2n2"},
      {nullptr, "sum_a2n1_sq", "sum_a2n_a2n1"},
      {nullptr, nullptr, "sum_a2n_sq"},
  };
  const Int shift = int_pow2(16);
  const Int a0 = tf.coeffs[0];
  rep.constant_term = 0;
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = i; j < 3; ++j) {
      const Int weight = i == j ? Int(form[i] * form[j]) : Int(2 * form[i] * form[j]);
      const bool is_xx = (i == 0 && j == 0);  // sum_n a_{2n+2}^2/2^{16n} = 2^16 (S - a_0^2)
      rep.sum_weights[pair_label[i][j]] += is_xx ? Int(weight * shift) : weight;
      if (is_xx) rep.constant_term -= weight * shift * a0 * a0;
    }

  rep.sums = bilinear_multiplicity_sums(tf);
  Rat rhs_value(rep.constant_term);
  Rat rhs_error = 0;
  for (const auto& s : rep.sums) {
    const auto it = rep.sum_weights.find(s.label);
    if (it == rep.sum_weights.end()) continue;
    rhs_value += Rat(it->second) * s.enclosure.value;
    rhs_error += Rat(abs(it->second)) * s.enclosure.error_bound;
  }
  rep.rhs = {rhs_value, rhs_error};

  const RationalEnclosure sch = schneider_sum(make_rat(1, 256), digits);
  rep.lhs = {64 * sch.value, 64 * sch.error_bound};

  rep.sides_agree =
      rat_abs(rep.lhs.value - rep.rhs.value) <= rep.lhs.error_bound + rep.rhs.error_bound;
  return rep;
}

// pi from Machin's formula with exact rational partial sums; the result is
// within 10^{-digits} of pi.
inline Rat pi_rational(unsigned digits) {
  const Rat eps = make_rat(1, int_pow(Int(10), digits + 2));
  const auto atan_inv = [](unsigned long x, const Rat& tol) {
    Rat sum = 0;
    Rat p = make_rat(1, Int(x));  // x^{-(2k+1)}
    const Rat inv_x2 = make_rat(1, Int(x) * Int(x));
    bool plus = true;
    for (unsigned long k = 0;; ++k) {
      const Rat term = p / Int(2 * k + 1);
      if (term < tol) break;  // alternating series: remainder below first omitted term
      sum += plus ? term : Rat(-term);
      plus = !plus;
      p *= inv_x2;
    }
    return sum;
  };
  return 16 * atan_inv(5, eps) - 4 * atan_inv(239, eps);
}

struct QuadratureReport {
  Rat lambda;
  double integral = 0;          // the elliptic integral itself
  double integral_over_pi = 0;  // divided by high-precision pi
  double series_value = 0;      // exact series, rounded once at the end
  double difference = 0;
  double tol = 0;
  unsigned refinements = 0;
  bool ok = false;
};

// Numeric cross-check of
//   integral_{-1}^{1} dw / sqrt((1 - 16 l^2 w^2)(1 - w^2)) = pi sum A_n^2 l^{2n}.
// Substituting w = sin t removes the endpoint singularity and leaves the
// smooth pi-periodic integrand 1/sqrt(1 - 16 l^2 sin^2 t) on [-pi/2, pi/2],
// where the trapezoid rule with interval doubling plus Richardson
// extrapolation converges fast.  This is the library's only floating-point
// computation.
inline QuadratureReport euler_integral_check(const Rat& lambda, double tol) {
  if (!(lambda > 0 && lambda < make_rat(1, 4)))
    throw precondition_error("lambda must lie in (0, 1/4)");
  if (!(tol > 0)) throw precondition_error("tolerance must be positive");

  const double pi = Rat(pi_rational(30)).get_d();
  const double m = Rat(16 * lambda * lambda).get_d();
  const auto integrand = [m](double t) { return 1.0 / std::sqrt(1.0 - m * std::sin(t) * std::sin(t)); };

  const double a = -pi / 2, b = pi / 2;
  constexpr unsigned kMaxLevels = 22;
  std::vector<std::vector<double>> romberg;
  double prev_best = 0;
  unsigned level = 0;
  for (;; ++level) {
    if (level >= kMaxLevels)
      throw convergence_error("quadrature failed to reach the tolerance within its budget");
    if (level == 0) {
      romberg.push_back({(b - a) / 2 * (integrand(a) + integrand(b))});
    } else {
      const std::uint64_t panels = std::uint64_t{1} << level;
      const double h = (b - a) / static_cast<double>(panels);
      double mids = 0;
      for (std::uint64_t k = 1; k < panels; k += 2)
        mids += integrand(a + static_cast<double>(k) * h);
      std::vector<double> row;
      row.push_back(romberg.back()[0] / 2 + h * mids);
      double pow4 = 1;
      for (std::size_t j = 0; j < romberg.back().size(); ++j) {
        pow4 *= 4;
        row.push_back((pow4 * row[j] - romberg.back()[j]) / (pow4 - 1));
      }
      romberg.push_back(std::move(row));
    }
    const double best = romberg.back().back();
    if (level >= 3 && std::abs(best - prev_best) < tol / 8) break;
    prev_best = best;
  }

  QuadratureReport rep;
  rep.lambda = lambda;
  rep.tol = tol;
  rep.refinements = level;
  rep.integral = romberg.back().back();
  rep.integral_over_pi = rep.integral / pi;
  rep.series_value = schneider_sum(lambda, 18).value.get_d();
  rep.difference = std::abs(rep.integral_over_pi - rep.series_value);
  rep.ok = rep.difference <= tol;
  return rep;
}

}  // namespace hk2
