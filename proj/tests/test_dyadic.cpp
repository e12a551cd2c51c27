#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "hk2/dyadic.hpp"
#include "hk2/hilbert_kunz.hpp"
#include "oracles.hpp"

using namespace hk2;

namespace {

XElement random_x_element(std::mt19937& rng, unsigned level) {
  const std::uint64_t q = std::uint64_t{1} << level;
  std::vector<Rat> v(q + 1);
  v[0] = 0;
  for (std::uint64_t i = 1; i <= q; ++i) v[i] = v[i - 1] + oracle::random_rat(rng);
  return make_x_element(level, std::move(v));
}

XElement jump_element(unsigned level) {
  const std::uint64_t q = std::uint64_t{1} << level;
  std::vector<Rat> v(q + 1, Rat(1));
  v[0] = 0;
  return make_x_element(level, std::move(v));
}

}  // namespace

TEST_CASE("increments") {
  // linear ramp: all increments 1/q
  const XElement ramp = phi_sample(parse_poly("x", {"x"}), 3);
  for (const Rat& d : increments(ramp)) CHECK(d == make_rat(1, 8));

  // phi_uv: d_i = (2q - 1 - 2i)/q^2
  const XElement uv = phi_uv_closed_form(3);
  const auto d = increments(uv);
  for (std::size_t i = 0; i < d.size(); ++i)
    CHECK(d[i] == make_rat(Int(16 - 1 - 2 * static_cast<long>(i)), Int(64)));

  // constant after a jump
  const auto dj = increments(jump_element(2));
  CHECK(dj[0] == 1);
  for (std::size_t i = 1; i < dj.size(); ++i) CHECK(dj[i] == 0);
}

TEST_CASE("xor_convolve basics") {
  const std::vector<Rat> e0{Rat(1), Rat(0)};
  const std::vector<Rat> e1{Rat(0), Rat(1)};
  CHECK(xor_convolve(e0, e1) == std::vector<Rat>{Rat(0), Rat(1)});

  const std::vector<Rat> ones(4, Rat(1));
  CHECK(xor_convolve(ones, ones) == std::vector<Rat>(4, Rat(4)));

  CHECK_THROWS_AS(xor_convolve(e0, ones), precondition_error);
  CHECK_THROWS_AS(xor_convolve(std::vector<Rat>(3, Rat(1)), std::vector<Rat>(3, Rat(1))),
                  precondition_error);
}

TEST_CASE("naive and WHT convolution agree exactly") {
  std::mt19937 rng(12345);
  for (std::size_t len = 1; len <= 64; len *= 2)
    for (int trial = 0; trial < 12; ++trial) {
      const auto u = oracle::random_rat_vector(rng, len);
      const auto v = oracle::random_rat_vector(rng, len);
      CHECK(xor_convolve(u, v, ConvMethod::naive) == xor_convolve(u, v, ConvMethod::wht));
    }
}

TEST_CASE("xor convolution is commutative/associative with the point mass as identity") {
  std::mt19937 rng(777);
  const std::size_t len = 16;
  std::vector<Rat> delta(len, Rat(0));
  delta[0] = 1;
  for (int trial = 0; trial < 10; ++trial) {
    const auto u = oracle::random_rat_vector(rng, len);
    const auto v = oracle::random_rat_vector(rng, len);
    const auto w = oracle::random_rat_vector(rng, len);
    CHECK(xor_convolve(u, delta) == u);
    CHECK(xor_convolve(u, v) == xor_convolve(v, u));
    CHECK(xor_convolve(xor_convolve(u, v), w) == xor_convolve(u, xor_convolve(v, w)));
  }
}

TEST_CASE("sharp with the jump element changes nothing") {
  std::mt19937 rng(31);
  for (unsigned level = 1; level <= 4; ++level) {
    const XElement a = random_x_element(rng, level);
    CHECK(sharp(a, jump_element(level)).values == a.values);
  }
}

TEST_CASE("sharp of phi_x with itself is the ramp, equal to the two-variable sample") {
  const Poly2 x = parse_poly("x", {"x"});
  for (unsigned n = 1; n <= 3; ++n) {
    const XElement s = sharp(phi_sample(x, n), phi_sample(x, n));
    const XElement two = phi_sample(parse_poly("x+y", {"x", "y"}), n);
    CHECK(s.values == two.values);
    const std::uint64_t q = std::uint64_t{1} << n;
    for (std::uint64_t i = 0; i <= q; ++i)
      CHECK(s.values[i] == make_rat(Int(static_cast<unsigned long>(i)),
                                    Int(static_cast<unsigned long>(q))));
  }
}

TEST_CASE("sharp realizes disjoint-variable sums: uv + x^3") {
  const Poly2 g = parse_poly("x^3", {"x"});
  const Poly2 G = parse_poly("u*v+x^3", {"u", "v", "x"});
  for (unsigned n = 1; n <= 3; ++n) {
    const XElement s = sharp(phi_uv_closed_form(n), phi_sample(g, n));
    const XElement direct = phi_sample(G, n);
    CHECK(s.values == direct.values);
  }
}

TEST_CASE("sharp realizes disjoint-variable sums: random pairs, brute force") {
  std::mt19937 rng(515);
  for (int trial = 0; trial < 6; ++trial) {
    const Poly2 f = oracle::random_poly(rng, {"x", "y"});
    const Poly2 g = oracle::random_poly(rng, {"z"});
    // the same polynomials over the union of the variables
    std::vector<Monomial> lifted;
    for (const auto& m : f.terms()) lifted.push_back({m[0], m[1], 0});
    for (const auto& m : g.terms()) lifted.push_back({0, 0, m[0]});
    const Poly2 sum({"x", "y", "z"}, std::move(lifted));
    for (unsigned n = 1; n <= 2; ++n)
      CHECK(sharp(phi_sample(f, n), phi_sample(g, n)).values == phi_sample(sum, n).values);
  }
}

TEST_CASE("gamma transform") {
  const XElement uv = phi_uv_closed_form(2);  // q = 4
  const GammaElement g = to_gamma(uv);
  for (std::size_t i = 0; i < 4; ++i) {
    const Rat expect = make_rat(Int(7 - 2 * static_cast<long>(i)), Int(16));
    CHECK(g.coeffs[i] == (i % 2 ? Rat(-expect) : expect));
  }

  // level 0: the single coefficient a(1) - a(0)
  const XElement tiny = make_x_element(0, {Rat(0), make_rat(3, 7)});
  CHECK(to_gamma(tiny).coeffs == std::vector<Rat>{make_rat(3, 7)});

  CHECK(to_gamma(jump_element(3)).coeffs[0] == 1);
  for (std::size_t i = 1; i < 8; ++i) CHECK(to_gamma(jump_element(3)).coeffs[i] == 0);
}

TEST_CASE("gamma multiplication: lambda_0 is the identity, lambda_1^2 = lambda_0") {
  GammaElement l0{2, {Rat(1), Rat(0), Rat(0), Rat(0)}};
  GammaElement l1{2, {Rat(0), Rat(1), Rat(0), Rat(0)}};
  std::mt19937 rng(5);
  const GammaElement x{2, oracle::random_rat_vector(rng, 4)};
  CHECK(gamma_mul(x, l0).coeffs == x.coeffs);
  CHECK(gamma_mul(l1, l1).coeffs == l0.coeffs);
  CHECK_THROWS_AS(gamma_mul(l0, GammaElement{3, std::vector<Rat>(8, Rat(0))}),
                  precondition_error);
}

TEST_CASE("the gamma transform turns sharp into the basis product") {
  std::mt19937 rng(67);
  for (unsigned level = 1; level <= 6; ++level)
    for (int trial = 0; trial < 25; ++trial) {
      const XElement a = random_x_element(rng, level);
      const XElement b = random_x_element(rng, level);
      CHECK(to_gamma(sharp(a, b)).coeffs == gamma_mul(to_gamma(a), to_gamma(b)).coeffs);
    }
}

TEST_CASE("eta examples") {
  for (unsigned n = 1; n <= 4; ++n) {
    CHECK(eta(to_gamma(phi_uv_closed_form(n))) ==
          make_rat(1, Int(static_cast<unsigned long>(std::uint64_t{1} << n))));
    CHECK(eta(to_gamma(phi_sample(parse_poly("x", {"x"}), n))) == 0);
  }
  const XElement tiny = make_x_element(0, {Rat(0), make_rat(-2, 5)});
  CHECK(eta(to_gamma(tiny)) == make_rat(-2, 5));
}

TEST_CASE("eta is multiplicative through the basis product") {
  std::mt19937 rng(42);
  for (unsigned level = 1; level <= 6; ++level)
    for (int trial = 0; trial < 25; ++trial) {
      const GammaElement x{level, oracle::random_rat_vector(rng, std::size_t{1} << level)};
      const GammaElement y{level, oracle::random_rat_vector(rng, std::size_t{1} << level)};
      CHECK(eta(gamma_mul(x, y)) == eta(x) * eta(y));
    }
}

TEST_CASE("coarsen") {
  // (0, t, 1) at level 1 coarsens to (0, 1)
  const XElement mid = make_x_element(1, {Rat(0), make_rat(1, 3), Rat(1)});
  CHECK(coarsen(mid).values == std::vector<Rat>{Rat(0), Rat(1)});
  CHECK_THROWS_AS(coarsen(coarsen(mid)), precondition_error);

  std::mt19937 rng(3);
  const XElement a = random_x_element(rng, 4);
  // double coarsening = every fourth sample
  const XElement c2 = coarsen(coarsen(a));
  for (std::size_t i = 0; i < c2.values.size(); ++i) CHECK(c2.values[i] == a.values[4 * i]);

  const Poly2 f = parse_poly("x^3+y^3", {"x", "y"});
  CHECK(coarsen(phi_sample(f, 3)).values == phi_sample(f, 2).values);
}

TEST_CASE("eta-via-uv identity") {
  // worked case: at level 1 with the jump element both sides are 1
  const XElement j = jump_element(1);
  const XElement s = sharp(phi_uv_closed_form(1), j);
  CHECK(eta(to_gamma(j)) == 1);
  CHECK(rat_pow2(2) * s.values[1] - rat_pow2(1) * s.values[2] == 1);
  CHECK(eta_uv_identity_holds(j));

  for (unsigned n = 1; n <= 4; ++n)
    CHECK(eta_uv_identity_holds(phi_sample(parse_poly("x^3", {"x"}), n)));

  std::mt19937 rng(2024);
  for (unsigned level = 1; level <= 6; ++level)
    for (int trial = 0; trial < 25; ++trial)
      CHECK(eta_uv_identity_holds(random_x_element(rng, level)));

  CHECK_THROWS_AS(eta_uv_identity_holds(make_x_element(0, {Rat(0), Rat(1)})),
                  precondition_error);
}

TEST_CASE("level mismatches are rejected") {
  std::mt19937 rng(8);
  CHECK_THROWS_AS(sharp(random_x_element(rng, 2), random_x_element(rng, 3)), precondition_error);
}

TEST_CASE("x element validation") {
  CHECK_THROWS_AS(make_x_element(1, {Rat(1), Rat(0), Rat(1)}), precondition_error);
  CHECK_THROWS_AS(make_x_element(1, {Rat(0), Rat(1)}), precondition_error);
}
