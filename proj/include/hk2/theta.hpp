#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "hk2/binomial.hpp"
#include "hk2/dyadic.hpp"
#include "hk2/error.hpp"
#include "hk2/hilbert_kunz.hpp"
#include "hk2/poly2.hpp"
#include "hk2/rational.hpp"

namespace hk2 {

enum class ThetaSource { closed_form, empirical, conjectural };

inline const char* theta_source_name(ThetaSource s) {
  switch (s) {
    case ThetaSource::closed_form: return "closed_form";
    case ThetaSource::empirical: return "empirical";
    case ThetaSource::conjectural: return "conjectural";
  }
  return "?";
}

// Certified coefficient growth: |a_n| <= scale * ratio^n for every n,
// including the tail beyond the stored range.  For empirical series the
// pair is the observed envelope at ratio 2^r, so tail bounds are only as
// trustworthy as that envelope; all closed-form and conjectural pairs are
// certified.
struct GrowthBound {
  Rat scale{1};
  Rat ratio{1};
};

// Integer power series theta_g = (1 - 2^{r+1} w) sum_n e_n(uv+g) w^n,
// truncated at order N.  Its value at w = 1/2^{r+1} is the Hilbert-Kunz
// multiplicity of uv+g.
struct ThetaSeries {
  std::vector<Int> coeffs;  // a_0 .. a_N
  std::size_t r = 1;        // variable count of g
  ThetaSource source = ThetaSource::closed_form;
  GrowthBound growth;
  bool finite_tail = false;  // coefficients beyond a_N are provably zero

  std::size_t order() const { return coeffs.empty() ? 0 : coeffs.size() - 1; }
};

// Exact rational midpoint plus a rigorous symmetric error bound: the
// represented real lies in [value - error_bound, value + error_bound].
struct RationalEnclosure {
  Rat value;
  Rat error_bound;

  Rat lower() const { return value - error_bound; }
  Rat upper() const { return value + error_bound; }
  Rat width() const { return 2 * error_bound; }
  bool contains(const Rat& x) const { return lower() <= x && x <= upper(); }
};

namespace detail {

inline ThetaSource weakest_source(ThetaSource a, ThetaSource b) {
  return static_cast<int>(a) >= static_cast<int>(b) ? a : b;
}

}  // namespace detail

// a_n = 2^{rn} eta(L_n(phi_f)), which unwinds to the alternating sum
// sum_i (-1)^i (e_n(f^{i+1}) - e_n(f^i)).  Integrality of every coefficient
// is asserted, not assumed.
inline ThetaSeries theta_empirical(const Poly2& f, std::size_t N, const HKOptions& opt = {}) {
  if (f.is_zero() || f.has_constant_term())
    throw precondition_error("theta_empirical needs a nonzero polynomial without constant term");
  ThetaSeries t;
  t.r = f.var_count();
  t.source = ThetaSource::empirical;
  t.coeffs.reserve(N + 1);
  for (unsigned n = 0; n <= N; ++n) {
    const PhiSample phi = phi_sample(f, n, opt);
    const Rat a = rat_pow2(static_cast<long>(n) * static_cast<long>(t.r)) * eta(to_gamma(phi));
    if (a.get_den() != 1)
      throw identity_error("empirical theta coefficient is not an integer at order " +
                           std::to_string(n));
    t.coeffs.push_back(a.get_num());
  }
  t.growth.ratio = rat_pow2(static_cast<long>(t.r));
  Rat scale = 1;
  Rat power = 1;  // ratio^n
  for (const Int& a : t.coeffs) {
    const Rat needed = Rat(abs(a)) / power;
    if (needed > scale) scale = needed;
    power *= t.growth.ratio;
  }
  t.growth.scale = scale;
  return t;
}

// Closed-form one-variable series from e_n(x^m) = min(m, q):
//   a_n = k * [floor(q/k) odd] + (-1)^{floor(q/k)} (q mod k),   q = 2^n.
// No matrix work.  |a_n| <= 2k always; for k = 2^s the series is exactly
// 1 + 2w + ... + 2^s w^s and the tail is known to vanish.
inline ThetaSeries theta_monomial(std::uint64_t k, std::size_t N) {
  if (k == 0) throw precondition_error("monomial exponent must be >= 1");
  ThetaSeries t;
  t.r = 1;
  t.source = ThetaSource::closed_form;
  const Int kz(static_cast<unsigned long>(k));
  for (std::size_t n = 0; n <= N; ++n) {
    const Int q = int_pow2(n);
    const Int m = q / kz;
    const Int rem = q % kz;
    Int a = mpz_odd_p(m.get_mpz_t()) ? kz : Int(0);
    a += mpz_odd_p(m.get_mpz_t()) ? -rem : rem;
    t.coeffs.push_back(a);
  }
  t.growth = {Rat(2 * kz), Rat(1)};
  if ((k & (k - 1)) == 0) {
    std::size_t s = 0;
    while ((std::uint64_t{1} << s) < k) ++s;
    t.finite_tail = N >= s;
  }
  return t;
}

// theta of g^2 from theta of g: the series 1 + 2^r w t.
inline ThetaSeries theta_square(const ThetaSeries& t) {
  ThetaSeries s;
  s.r = t.r;
  s.source = t.source;
  s.finite_tail = t.finite_tail;
  s.coeffs.resize(t.coeffs.size() + 1);
  s.coeffs[0] = 1;
  const Int f = int_pow2(t.r);
  for (std::size_t i = 0; i < t.coeffs.size(); ++i) s.coeffs[i + 1] = f * t.coeffs[i];
  s.growth.ratio = t.growth.ratio;
  const Rat lifted = Rat(f) * t.growth.scale / t.growth.ratio;
  s.growth.scale = std::max(Rat(1), lifted);
  return s;
}

// Conjectural series of the nodal cubic x^3 + y^3 + xyz, from the recurrence
//   a_n = 6 a_{n-1} - 8 a_{n-2} + c_n,
//   c_0 = 1, c_1 = 0, c_{2m} = -8 A_{m-1}, c_{2m+1} = 2 A_m - 24 A_{m-1},
// with A_m the central binomials.  Growth certificate (2, 4): asserted here
// for every n <= max(N, 64).
inline ThetaSeries theta_nodal_conjectural(std::size_t N) {
  const std::size_t checked = std::max<std::size_t>(N, 64);
  const BinomialTable A(checked / 2 + 1);
  std::vector<Int> a(checked + 1);
  Int bound = 2;  // 2 * 4^n
  for (std::size_t n = 0; n <= checked; ++n) {
    Int c;
    if (n == 0)
      c = 1;
    else if (n == 1)
      c = 0;
    else if (n % 2 == 0)
      c = -8 * A.at(n / 2 - 1);
    else
      c = 2 * A.at((n - 1) / 2) - 24 * A.at((n - 1) / 2 - 1);
    a[n] = c;
    if (n >= 1) a[n] += 6 * a[n - 1];
    if (n >= 2) a[n] -= 8 * a[n - 2];
    if (abs(a[n]) > bound)
      throw identity_error("nodal series violates its growth certificate at order " +
                           std::to_string(n));
    bound *= 4;
  }
  ThetaSeries t;
  t.coeffs.assign(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(N) + 1);
  t.r = 3;
  t.source = ThetaSource::conjectural;
  t.growth = {Rat(2), Rat(4)};
  return t;
}

// The parity selectors, first-class constants reused by every even/odd
// extraction:
//   theta_{x^5} - theta_{x^3}   = 2 sum_{n>=1} w^{2n}
//   2 theta_{x^3} - theta_{x^5} = 1 + 2 sum_{n>=0} w^{2n+1}
inline ThetaSeries selector_even_powers(std::size_t N) {
  ThetaSeries t;
  t.r = 1;
  t.source = ThetaSource::closed_form;
  t.coeffs.assign(N + 1, Int(0));
  for (std::size_t n = 2; n <= N; n += 2) t.coeffs[n] = 2;
  t.growth = {Rat(2), Rat(1)};
  return t;
}

inline ThetaSeries selector_odd_powers(std::size_t N) {
  ThetaSeries t;
  t.r = 1;
  t.source = ThetaSource::closed_form;
  t.coeffs.assign(N + 1, Int(0));
  t.coeffs[0] = 1;
  for (std::size_t n = 1; n <= N; n += 2) t.coeffs[n] = 2;
  t.growth = {Rat(2), Rat(1)};
  return t;
}

namespace detail {

inline ThetaSeries theta_combine(const ThetaSeries& x, const ThetaSeries& y, int sign_y) {
  if (x.r != y.r) throw precondition_error("series combination needs equal variable counts");
  const std::size_t M = std::min(x.order(), y.order());
  ThetaSeries t;
  t.r = x.r;
  t.source = weakest_source(x.source, y.source);
  t.coeffs.resize(M + 1);
  for (std::size_t n = 0; n <= M; ++n)
    t.coeffs[n] = sign_y > 0 ? Int(x.coeffs[n] + y.coeffs[n]) : Int(x.coeffs[n] - y.coeffs[n]);
  t.growth.scale = x.growth.scale + y.growth.scale;
  t.growth.ratio = std::max(x.growth.ratio, y.growth.ratio);
  t.finite_tail = x.finite_tail && y.finite_tail && x.order() == M && y.order() == M;
  return t;
}

}  // namespace detail

inline ThetaSeries theta_add(const ThetaSeries& x, const ThetaSeries& y) {
  return detail::theta_combine(x, y, +1);
}

inline ThetaSeries theta_sub(const ThetaSeries& x, const ThetaSeries& y) {
  return detail::theta_combine(x, y, -1);
}

inline ThetaSeries theta_scale(const ThetaSeries& x, const Int& c) {
  ThetaSeries t = x;
  for (auto& a : t.coeffs) a *= c;
  t.growth.scale *= Rat(abs(c));
  if (t.growth.scale == 0) t.growth.scale = 1;
  return t;
}

// Coefficientwise product: realizes theta of a disjoint-variable sum of the
// underlying g_i.  Truncates to the shortest factor; variable counts add;
// growth pairs multiply; the weakest source wins.
inline ThetaSeries hadamard(const std::vector<ThetaSeries>& factors) {
  if (factors.empty()) throw precondition_error("hadamard of an empty list");
  std::size_t M = factors.front().order();
  for (const auto& f : factors) M = std::min(M, f.order());
  ThetaSeries t;
  t.r = 0;
  t.source = ThetaSource::closed_form;
  t.growth = {Rat(1), Rat(1)};
  t.coeffs.assign(M + 1, Int(1));
  t.finite_tail = false;
  for (const auto& f : factors) {
    t.r += f.r;
    t.source = detail::weakest_source(t.source, f.source);
    t.growth.scale *= f.growth.scale;
    t.growth.ratio *= f.growth.ratio;
    if (f.finite_tail && f.order() == M) t.finite_tail = true;
    for (std::size_t n = 0; n <= M; ++n) t.coeffs[n] *= f.coeffs[n];
  }
  return t;
}

// Exact partial sum plus a geometric tail bound from the growth certificate.
// Requires |w| < 1/2^r (the convergence region) and ratio*|w| < 1 (so the
// certificate yields a geometric tail).  The certificate is re-checked
// against every stored coefficient; a violation is a hard error.
inline RationalEnclosure evaluate(const ThetaSeries& t, const Rat& w) {
  if (t.coeffs.empty()) throw precondition_error("evaluate: empty series");
  const Rat aw = rat_abs(w);
  if (!(aw < rat_pow2(-static_cast<long>(t.r))))
    throw precondition_error("evaluation point outside |w| < 1/2^r");
  Rat envelope = t.growth.scale;
  for (const Int& a : t.coeffs) {
    if (Rat(abs(a)) > envelope)
      throw identity_error("stored coefficient violates the growth certificate");
    envelope *= t.growth.ratio;
  }
  Rat sum = 0;
  for (std::size_t n = t.coeffs.size(); n-- > 0;) {
    sum *= w;
    sum += t.coeffs[n];
  }
  Rat tail = 0;
  if (!t.finite_tail) {
    const Rat x = t.growth.ratio * aw;
    if (!(x < 1))
      throw precondition_error("growth certificate gives no geometric tail at this point");
    tail = t.growth.scale * rat_pow(x, t.coeffs.size()) / (Rat(1) - x);
  }
  return {sum, tail};
}

struct LabeledEnclosure {
  std::string label;
  RationalEnclosure enclosure;
};

// The five bilinear coefficient sums attached to a three-variable series
// theta_f = sum a_n w^n:
//
//   sum a_{2n}^2 / 2^{16n}        sum a_{2n+1}^2 / 2^{16n}
//   sum a_{2n} a_{2n+1} / 2^{16n} sum a_{2n+1} a_{2n+2} / 2^{16n}
//   sum a_{2n} a_{2n+2} / 2^{16n}
//
// Each is assembled twice: directly from the coefficients, and as the value
// at w = 1/2^8 of a Hadamard product of theta_f, theta_{f^2} or theta_{f^4}
// and a parity selector (combined variable count 7, so 1/2^8 is the
// multiplicity point).  The two partial sums must agree exactly; the
// returned enclosures carry the Hadamard route's tail bound.
inline std::array<LabeledEnclosure, 5> bilinear_multiplicity_sums(const ThetaSeries& tf) {
  if (tf.r != 3) throw precondition_error("bilinear sums need a three-variable theta series");
  if (tf.coeffs.empty()) throw precondition_error("bilinear sums need coefficients");
  const std::size_t N = tf.order();
  const ThetaSeries t2 = theta_square(tf);
  const ThetaSeries t4 = theta_square(t2);
  const ThetaSeries sel_e = selector_even_powers(N + 2);
  const ThetaSeries sel_o = selector_odd_powers(N + 2);
  const Rat w = make_rat(1, 256);
  const Rat step = make_rat(1, 65536);  // 1/2^16

  const auto& a = tf.coeffs;
  Rat d1 = 0, d2 = 0, d3 = 0, d4 = 0, d5 = 0;
  Rat p = 1;
  for (std::size_t n = 0; 2 * n <= N; ++n) {
    d1 += p * Rat(a[2 * n] * a[2 * n]);
    if (2 * n + 1 <= N) {
      d2 += p * Rat(a[2 * n + 1] * a[2 * n + 1]);
      d3 += p * Rat(a[2 * n] * a[2 * n + 1]);
    }
    if (2 * n + 2 <= N) {
      d4 += p * Rat(a[2 * n + 1] * a[2 * n + 2]);
      d5 += p * Rat(a[2 * n] * a[2 * n + 2]);
    }
    p *= step;
  }

  const RationalEnclosure e1 = evaluate(hadamard({tf, tf, sel_e}), w);
  const RationalEnclosure e2 = evaluate(hadamard({tf, tf, sel_o}), w);
  const RationalEnclosure e3 = evaluate(hadamard({tf, t2, sel_o}), w);
  const RationalEnclosure e4 = evaluate(hadamard({tf, t2, sel_e}), w);
  const RationalEnclosure e5 = evaluate(hadamard({tf, t4, sel_e}), w);

  const Rat a00 = Rat(a[0] * a[0]);
  const Rat r1 = a00 + e1.value / 2;
  const Rat r2 = (e2.value - a00) * 128;
  const Rat r3 = (e3.value - Rat(a[0])) * 16;
  const Rat r4 = e4.value * 4096;
  const Rat r5 = e5.value * 512;
  if (r1 != d1 || r2 != d2 || r3 != d3 || r4 != d4 || r5 != d5)
    throw identity_error("bilinear sum assemblies disagree");

  return {{{"sum_a2n_sq", {d1, e1.error_bound / 2}},
           {"sum_a2n1_sq", {d2, e2.error_bound * 128}},
           {"sum_a2n_a2n1", {d3, e3.error_bound * 16}},
           {"sum_a2n1_a2n2", {d4, e4.error_bound * 4096}},
           {"sum_a2n_a2n2", {d5, e5.error_bound * 512}}}};
}

enum class VerifySuite { lemma19, thm16, thm18, cor14 };

inline const char* verify_suite_name(VerifySuite s) {
  switch (s) {
    case VerifySuite::lemma19: return "lemma19";
    case VerifySuite::thm16: return "thm16";
    case VerifySuite::thm18: return "thm18";
    case VerifySuite::cor14: return "cor14";
  }
  return "?";
}

struct CheckLine {
  std::string name;
  bool ok = false;
  std::string detail;
};

struct VerifyReport {
  std::string suite;
  std::vector<CheckLine> checks;

  bool ok() const {
    return std::all_of(checks.begin(), checks.end(), [](const CheckLine& c) { return c.ok; });
  }
};

inline std::size_t default_verify_order(VerifySuite which) {
  switch (which) {
    case VerifySuite::lemma19: return 12;
    default: return 3;
  }
}

namespace detail {

inline void compare_coefficients(VerifyReport& rep, const std::string& what,
                                 const ThetaSeries& lhs, const ThetaSeries& rhs) {
  const std::size_t M = std::min(lhs.order(), rhs.order());
  for (std::size_t n = 0; n <= M; ++n) {
    CheckLine line;
    line.name = what + " @ w^" + std::to_string(n);
    line.ok = lhs.coeffs[n] == rhs.coeffs[n];
    line.detail = lhs.coeffs[n].get_str() + " vs " + rhs.coeffs[n].get_str();
    rep.checks.push_back(std::move(line));
  }
}

}  // namespace detail

// Exact identity suites, each comparing an empirical or closed-form
// construction against an independent route.
inline VerifyReport run_verify_suite(VerifySuite which, std::size_t N, const HKOptions& opt = {}) {
  VerifyReport rep;
  rep.suite = verify_suite_name(which);
  switch (which) {
    case VerifySuite::lemma19: {
      detail::compare_coefficients(rep, "theta_x5 - theta_x3 == 2*sum w^{2n+2}",
                                   theta_sub(theta_monomial(5, N), theta_monomial(3, N)),
                                   selector_even_powers(N));
      detail::compare_coefficients(rep, "2*theta_x3 - theta_x5 == 1 + 2*sum w^{2n+1}",
                                   theta_sub(theta_scale(theta_monomial(3, N), 2),
                                             theta_monomial(5, N)),
                                   selector_odd_powers(N));
      break;
    }
    case VerifySuite::thm16: {
      const Poly2 f = parse_poly("x^3+y^3", {"x", "y"});
      detail::compare_coefficients(rep, "empirical theta_{x^3+y^3} == hadamard(theta_x3, theta_y3)",
                                   theta_empirical(f, N, opt),
                                   hadamard({theta_monomial(3, N), theta_monomial(3, N)}));
      break;
    }
    case VerifySuite::thm18: {
      if (N == 0) throw precondition_error("thm18 needs order >= 1");
      const Poly2 f = parse_poly("x^3+y^3+x*y*z", {"x", "y", "z"});
      detail::compare_coefficients(rep, "theta_square(empirical theta_f) == empirical theta_{f^2}",
                                   theta_square(theta_empirical(f, N - 1, opt)),
                                   theta_empirical(f.squared(), N, opt));
      break;
    }
    case VerifySuite::cor14: {
      const Poly2 g = parse_poly("x^3", {"x"});
      const Poly2 G = parse_poly("u*v+x^3", {"u", "v", "x"});
      std::uint64_t prev = 0;
      for (unsigned n = 0; n <= N; ++n) {
        const std::uint64_t direct = hk_value(G, 1, n, opt);
        const PhiSample phi_g = phi_sample(g, n, opt);
        Int expected;
        if (n == 0) {
          expected = 1;  // G has no constant term, so e_0 = 1 seeds the recursion
        } else {
          const Rat an = rat_pow2(n) * eta(to_gamma(phi_g));
          if (an.get_den() != 1) throw identity_error("non-integer eta multiple");
          expected = 4 * Int(static_cast<unsigned long>(prev)) + an.get_num();
        }
        CheckLine line;
        line.name = "e_" + std::to_string(n) + "(uv+x^3): direct == recursion";
        line.ok = Int(static_cast<unsigned long>(direct)) == expected;
        line.detail = std::to_string(direct) + " vs " + expected.get_str();
        rep.checks.push_back(std::move(line));

        // same value through the # product: phi_{uv+g} = phi_uv # phi_g
        const Rat via_sharp =
            rat_pow2(3 * static_cast<long>(n)) * sharp(phi_uv_closed_form(n), phi_g).values[1];
        CheckLine sline;
        sline.name = "e_" + std::to_string(n) + "(uv+x^3): direct == uv-sharp route";
        sline.ok = via_sharp == Rat(Int(static_cast<unsigned long>(direct)));
        sline.detail = std::to_string(direct) + " vs " + rat_string(via_sharp);
        rep.checks.push_back(std::move(sline));
        prev = direct;
      }
      break;
    }
  }
  return rep;
}

}  // namespace hk2
