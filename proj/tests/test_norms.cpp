#include "doctest.h"

#include <cmath>

#include "strichartz/field.hpp"
#include "strichartz/norms.hpp"
#include "strichartz/resonance.hpp"
#include "strichartz/rng.hpp"

using namespace strichartz;

namespace {

CoefficientVector make_1d(std::vector<std::pair<std::int64_t, cplx>> entries,
                          TorusSpec torus = TorusSpec(1, 1.0)) {
  std::vector<CoefficientVector::Entry> e;
  for (auto& [k, a] : entries) e.emplace_back(Freq(k), a);
  return CoefficientVector(torus, std::move(e));
}

CoefficientVector ones(std::int64_t lo, std::int64_t hi) {
  std::vector<CoefficientVector::Entry> e;
  for (std::int64_t k = lo; k <= hi; ++k) e.emplace_back(Freq(k), cplx{1.0, 0.0});
  return CoefficientVector(TorusSpec(1, 1.0), std::move(e));
}

CoefficientVector random_support(std::uint64_t seed, int count, std::int64_t lo, std::int64_t hi) {
  Rng rng(seed);
  std::vector<std::int64_t> ks;
  while (static_cast<int>(ks.size()) < count) {
    const std::int64_t k = lo + static_cast<std::int64_t>(rng.next_u64() % (hi - lo + 1));
    if (std::find(ks.begin(), ks.end(), k) == ks.end()) ks.push_back(k);
  }
  std::vector<CoefficientVector::Entry> e;
  for (auto k : ks) e.emplace_back(Freq(k), rng.next_complex_gaussian());
  return CoefficientVector(TorusSpec(1, 1.0), std::move(e));
}

}  // namespace

TEST_CASE("oracle: plancherel at m = 1") {
  const auto c = random_support(3, 10, -15, 15);
  const double v = exact_even_power_integral(c, Dispersion::schrodinger(), 1);
  CHECK(v == doctest::Approx(kTwoPi * kTwoPi * c.l2_norm_sq()).epsilon(1e-12));
}

TEST_CASE("oracle: quartic count for flat data is (2pi)^2 (2N^2 - N)") {
  for (std::int64_t N : {2, 4, 8, 16}) {
    const auto c = ones(1, N);
    const double v = exact_even_power_integral(c, Dispersion::schrodinger(), 2);
    const double expect = kTwoPi * kTwoPi * double(2 * N * N - N);
    CHECK(v == doctest::Approx(expect).epsilon(1e-12));
  }
}

TEST_CASE("oracle: quartic count matches brute-force quadruple enumeration") {
  // independent O(N^4) oracle over ordered quadruples
  const std::int64_t N = 9;
  std::int64_t count = 0;
  for (std::int64_t a = 1; a <= N; ++a)
    for (std::int64_t b = 1; b <= N; ++b)
      for (std::int64_t c = 1; c <= N; ++c)
        for (std::int64_t d = 1; d <= N; ++d)
          if (a + b == c + d && a * a + b * b == c * c + d * d) ++count;
  const double v = exact_even_power_integral(ones(1, N), Dispersion::schrodinger(), 2);
  CHECK(v == doctest::Approx(kTwoPi * kTwoPi * double(count)).epsilon(1e-12));
}

TEST_CASE("oracle: separated bilinear diagonal identity") {
  const auto c1 = ones(0, 3);
  const auto c2 = ones(16, 19);
  const double v =
      exact_even_power_integral(c1, &c2, Dispersion::schrodinger(), 2, 1, 1);
  CHECK(v == doctest::Approx(kTwoPi * kTwoPi * 16.0).epsilon(1e-12));

  // brute force confirms only diagonal solutions survive
  std::int64_t solutions = 0;
  for (std::int64_t a = 0; a <= 3; ++a)
    for (std::int64_t b = 16; b <= 19; ++b)
      for (std::int64_t a2 = 0; a2 <= 3; ++a2)
        for (std::int64_t b2 = 16; b2 <= 19; ++b2)
          if (a + b == a2 + b2 && a * a + b * b == a2 * a2 + b2 * b2) ++solutions;
  CHECK(solutions == 16);
}

TEST_CASE("oracle rejects invalid inputs") {
  const auto c = ones(1, 4);
  CHECK_THROWS(exact_even_power_integral(c, Dispersion::schrodinger(), 4));
  CHECK_THROWS(exact_even_power_integral(c, Dispersion::fractional(2.5), 2));
  CoefficientVector scaled(TorusSpec(1, 2.0), {{Freq(1), cplx{1, 0}}});
  CHECK_THROWS(exact_even_power_integral(scaled, Dispersion::schrodinger(), 2));
}

TEST_CASE("oracle agrees between 1d streaming and 2d hashing paths") {
  // embed a 1d problem on the 2d torus; values must agree
  const auto c = random_support(9, 8, -6, 6);
  const TorusSpec t2(2, 1.0);
  std::vector<CoefficientVector::Entry> e2;
  for (const auto& [k, a] : c.entries()) e2.emplace_back(Freq(k[0], 0), a);
  const CoefficientVector c2(t2, std::move(e2));
  const double v1 = exact_even_power_integral(c, Dispersion::schrodinger(), 3);
  const double v2 = exact_even_power_integral(c2, Dispersion::schrodinger(), 3);
  CHECK(v2 == doctest::Approx(v1 * kTwoPi).epsilon(1e-10));  // extra spatial period
}

TEST_CASE("window integral reduces to the oracle at the full period") {
  const auto c = random_support(13, 7, -8, 8);
  const double oracle = exact_even_power_integral(c, Dispersion::schrodinger(), 3);
  const double window = exact_product_window_integral({{&c, 3}}, Dispersion::schrodinger(), kTwoPi);
  CHECK(window == doctest::Approx(oracle).epsilon(1e-9));
}

TEST_CASE("quadrature matches the oracle over full periods (p = 2, 4, 6)") {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto c = random_support(seed, 12, -12, 12);
    for (int m : {1, 2, 3}) {
      const double oracle = exact_even_power_integral(c, Dispersion::schrodinger(), m);
      const auto quad =
          product_integral_quadrature({{&c, 2.0 * m}}, Dispersion::schrodinger(), kTwoPi);
      CHECK(quad.exact);
      CHECK(quad.value == doctest::Approx(oracle).epsilon(1e-9));
    }
  }
}

TEST_CASE("quadrature matches the window integral on short windows") {
  const auto c = random_support(23, 9, 16, 40);
  for (const Dispersion& disp : {Dispersion::schrodinger(), Dispersion::airy()}) {
    const double T = 1.0 / 32.0;
    const double exact = exact_product_window_integral({{&c, 2}}, disp, T);
    const auto quad = product_integral_quadrature({{&c, 4.0}}, disp, T);
    CHECK(quad.value == doctest::Approx(exact).epsilon(1e-8));
  }
}

TEST_CASE("lp_spacetime_norm: unimodular and zero cases") {
  const auto c = make_1d({{4, {1, 0}}});
  auto grid = sampling_for(6, c, kTwoPi, 60);
  const auto f = evaluate_field(c, Dispersion::schrodinger(), grid);
  const auto r = lp_spacetime_norm(f, 6.0);
  CHECK(r.value == doctest::Approx(std::pow(kTwoPi * kTwoPi, 1.0 / 6.0)).epsilon(1e-12));

  const CoefficientVector zero(TorusSpec(1, 1.0), {});
  GridSampling g;
  g.d = 1;
  g.mx[0] = 8;
  g.time = TimeRule::gauss_kronrod(1.0, 1);
  const auto fz = evaluate_field(zero, Dispersion::schrodinger(), g);
  CHECK(lp_spacetime_norm(fz, 4.0).value == 0.0);
}

TEST_CASE("lp_spacetime_norm rejects NaN fields") {
  const auto c = make_1d({{0, {1, 0}}});
  auto f = evaluate_field(c, Dispersion::schrodinger(), sampling_for(2, c, 1.0, 30));
  f.values[1] = cplx{std::nan(""), 0.0};
  CHECK_THROWS(lp_spacetime_norm(f, 2.0));
}

TEST_CASE("lp norm p=4 flat data against the closed count") {
  const auto c = ones(1, 2);
  const auto n = lp_norm(c, Dispersion::schrodinger(), kTwoPi, 4.0);
  const double expect4 = kTwoPi * kTwoPi * 6.0;  // 2N^2 - N = 6 at N = 2
  CHECK(std::pow(n.value, 4.0) == doctest::Approx(expect4).epsilon(1e-10));
}

TEST_CASE("projection never increases the L2 norm") {
  const auto c = random_support(44, 14, -20, 20);
  const auto p = project(c, FrequencyRegion::interval(-5, 5));
  CHECK(p.function_l2_norm() <= c.function_l2_norm() + 1e-15);
}

TEST_CASE("separated bilinear diagonal identity via quadrature") {
  const auto c1 = random_support(51, 6, 0, 15);
  const auto c2 = random_support(52, 6, 32, 47);
  const auto quad = product_integral_quadrature({{&c1, 2.0}, {&c2, 2.0}},
                                                Dispersion::schrodinger(), kTwoPi);
  const double expect = kTwoPi * kTwoPi * c1.l2_norm_sq() * c2.l2_norm_sq();
  CHECK(quad.value == doctest::Approx(expect).epsilon(1e-8));
}

TEST_CASE("dispatcher picks exact routes and falls back") {
  const auto c = random_support(61, 8, -10, 10);
  const auto full = even_product_integral({{&c, 2}}, Dispersion::schrodinger(), kTwoPi);
  CHECK(full.route == "resonance");
  const auto window = even_product_integral({{&c, 2}}, Dispersion::schrodinger(), 0.25);
  CHECK(window.route == "window");
  NormOptions no_exact;
  no_exact.allow_exact_routes = false;
  const auto quad = even_product_integral({{&c, 2}}, Dispersion::schrodinger(), 0.25, no_exact);
  CHECK(quad.route == "quadrature");
  CHECK(quad.value == doctest::Approx(window.value).epsilon(1e-8));
}

TEST_CASE("non-even exponents report spatial refinement error") {
  const auto c = random_support(71, 6, 8, 20);
  const auto r = product_integral_quadrature({{&c, 4.0 / 3.0}}, Dispersion::schrodinger(), 0.5);
  CHECK(r.value > 0.0);
  CHECK_FALSE(r.exact);
  CHECK(r.error_estimate >= 0.0);
}
