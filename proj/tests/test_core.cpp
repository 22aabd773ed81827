#include "doctest.h"

#include <cmath>

#include "strichartz/coeffs.hpp"
#include "strichartz/dispersion.hpp"
#include "strichartz/region.hpp"
#include "strichartz/rng.hpp"
#include "strichartz/symmetry.hpp"

using namespace strichartz;

namespace {

CoefficientVector make_1d(std::vector<std::pair<std::int64_t, cplx>> entries,
                          TorusSpec torus = TorusSpec(1, 1.0)) {
  std::vector<CoefficientVector::Entry> e;
  for (auto& [k, a] : entries) e.emplace_back(Freq(k), a);
  return CoefficientVector(torus, std::move(e));
}

}  // namespace

TEST_CASE("torus invariants") {
  CHECK_THROWS(TorusSpec(3, 1.0));
  CHECK_THROWS(TorusSpec(2, 1.0, 0.4));
  CHECK_THROWS(TorusSpec(1, 0.5));
  const TorusSpec t(2, 2.0, 0.75);
  CHECK(t.volume() == doctest::Approx(kTwoPi * 2.0 * kTwoPi * 2.0 * 0.75).epsilon(1e-14));
  CHECK(physical(Freq(3, 2), t)[0] == doctest::Approx(1.5));
  CHECK(physical(Freq(3, 2), t)[1] == doctest::Approx(2.0 / (2.0 * 0.75)));
}

TEST_CASE("coefficient vector metadata") {
  const auto c = make_1d({{1, {1, 0}}, {5, {0, 2}}, {-3, {1, 1}}});
  CHECK(c.min_k(0) == -3);
  CHECK(c.max_k(0) == 5);
  CHECK(c.spread(0) == 8);
  CHECK(c.l2_norm() == doctest::Approx(std::sqrt(1.0 + 4.0 + 2.0)).epsilon(1e-15));
  CHECK(c.function_l2_norm() == doctest::Approx(std::sqrt(kTwoPi * 7.0)).epsilon(1e-14));
  CHECK_THROWS(make_1d({{1, {1, 0}}, {1, {2, 0}}}));
}

TEST_CASE("project: interval membership") {
  const auto c = make_1d({{1, {1, 0}}, {5, {1, 0}}});
  const auto p = project(c, FrequencyRegion::interval(0, 2));
  REQUIRE(p.size() == 1);
  CHECK(p.entries()[0].first == Freq(1));
}

TEST_CASE("project: full support is identity, empty is zero vector") {
  const auto c = make_1d({{1, {1, 0}}, {5, {0.5, -2}}});
  std::vector<Freq> all;
  for (const auto& [k, a] : c.entries()) all.push_back(k);
  const auto p = project(c, FrequencyRegion::explicit_set(all));
  CHECK(p.entries() == c.entries());
  const auto z = project(c, FrequencyRegion::interval(100, 200));
  CHECK(z.empty());
  CHECK(z.l2_norm() == 0.0);
}

TEST_CASE("project: dyadic annulus keeps [N/2, 2N] inclusive") {
  std::vector<CoefficientVector::Entry> e;
  for (std::int64_t k = 1; k <= 64; ++k) e.emplace_back(Freq(k), cplx{1.0, 0.0});
  const CoefficientVector c(TorusSpec(1, 1.0), std::move(e));
  const auto p = project(c, FrequencyRegion::annulus(32));
  CHECK(p.size() == 49);  // brute force: {16..64}
  std::size_t brute = 0;
  for (std::int64_t k = 1; k <= 64; ++k)
    if (k >= 16 && k <= 64) ++brute;
  CHECK(p.size() == brute);
}

TEST_CASE("project is idempotent and l2-nonincreasing") {
  Rng rng(11);
  std::vector<CoefficientVector::Entry> e;
  for (std::int64_t k = -20; k <= 20; k += 3) e.emplace_back(Freq(k), rng.next_complex_gaussian());
  const CoefficientVector c(TorusSpec(1, 1.0), std::move(e));
  const auto r = FrequencyRegion::annulus(8);
  const auto p1 = project(c, r);
  const auto p2 = project(p1, r);
  CHECK(p1.entries() == p2.entries());
  CHECK(p1.l2_norm() <= c.l2_norm());
}

TEST_CASE("galilean shift translates and preserves l2 exactly") {
  const auto c = make_1d({{0, {1, 0}}});
  const auto s = galilean_shift(c, Freq(3));
  REQUIRE(s.size() == 1);
  CHECK(s.entries()[0].first == Freq(3));

  const auto c2 = make_1d({{1, {0.3, 0.4}}, {2, {-1, 2}}});
  const auto s0 = galilean_shift(c2, Freq(0));
  CHECK(s0.entries() == c2.entries());
  const auto sm = galilean_shift(c2, Freq(-1));
  CHECK(sm.entries()[0].first == Freq(0));
  CHECK(sm.entries()[1].first == Freq(1));
  CHECK(sm.l2_norm() == c2.l2_norm());  // exact: amplitudes only relabeled
}

TEST_CASE("kdv galilean reduce: translation and symbol") {
  const std::int64_t A = 7;
  const auto c = make_1d({{A, {1, 0}}});
  const auto [red, disp] = kdv_galilean_reduce(c, A);
  REQUIRE(red.size() == 1);
  CHECK(red.entries()[0].first == Freq(0));
  CHECK(disp.kind == Dispersion::Kind::kdv_galilean);
  // A = 0 reduces to the plain cubic symbol, coefficients unchanged
  const auto [red0, disp0] = kdv_galilean_reduce(c, 0);
  CHECK(red0.entries() == c.entries());
  CHECK(disp0.omega(Freq(2), c.torus()) == doctest::Approx(-8.0));
  CHECK_THROWS(kdv_galilean_reduce(CoefficientVector(TorusSpec(2, 1.0), {}), 1));
}

TEST_CASE("dispersion symbols") {
  const TorusSpec t1(1, 1.0);
  const TorusSpec t2(2, 1.0);
  CHECK(Dispersion::schrodinger().omega(Freq(-3), t1) == doctest::Approx(9.0));
  CHECK(Dispersion::schrodinger().omega(Freq(1, 2), t2) == doctest::Approx(5.0));
  CHECK(Dispersion::airy().omega(Freq(2), t1) == doctest::Approx(-8.0));
  CHECK(Dispersion::fractional(3.0).omega(Freq(-2), t1) == doctest::Approx(8.0));
  CHECK(Dispersion::kdv_galilean(5).omega(Freq(2), t1) == doctest::Approx(-(3.0 * 5 * 4 + 8)));
  CHECK(Dispersion::schrodinger().integer_symbol(t1));
  CHECK_FALSE(Dispersion::fractional(2.5).integer_symbol(t1));
  CHECK_FALSE(Dispersion::schrodinger().integer_symbol(TorusSpec(1, 2.0)));
  CHECK(Dispersion::airy().omega_int(Freq(3)) == -27);
}

TEST_CASE("coefficient json round trip with stable ordering") {
  Rng rng(3);
  std::vector<CoefficientVector::Entry> e;
  for (std::int64_t k : {5, -2, 9, 0}) e.emplace_back(Freq(k), rng.next_complex_gaussian());
  const CoefficientVector c(TorusSpec(1, 1.0), std::move(e));
  const auto j = coeffs_to_json(c);
  CHECK(j["entries"].size() == 4);
  CHECK(j["entries"][0][0].get<std::int64_t>() == -2);  // lexicographic order
  const auto back = coeffs_from_json(j);
  CHECK(back.entries() == c.entries());
  CHECK(back.torus() == c.torus());

  const TorusSpec t2(2, 4.0, 0.8);
  const CoefficientVector c2(t2, {{Freq(1, -2), cplx{0.5, 0.25}}});
  const auto b2 = coeffs_from_json(coeffs_to_json(c2));
  CHECK(b2.torus() == t2);
  CHECK(b2.entries() == c2.entries());
}

TEST_CASE("region membership tolerance on irrational tori") {
  const TorusSpec t(2, 1.0, 0.75);
  // physical frequency (4, 4/0.75); ball boundary hit within tolerance
  const Freq k(4, 4);
  const double r = std::sqrt(physical_norm_sq(k, t));
  CHECK(FrequencyRegion::ball({0.0, 0.0}, r).contains(k, t));  // inclusive tie
  CHECK_FALSE(FrequencyRegion::ball({0.0, 0.0}, r * (1 - 1e-6)).contains(k, t));
}

TEST_CASE("deterministic rng") {
  Rng a(7), b(7);
  for (int i = 0; i < 100; ++i) CHECK(a.next_complex_gaussian() == b.next_complex_gaussian());
}
