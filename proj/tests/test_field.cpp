#include "doctest.h"

#include <cmath>
#include <cstdio>

#include "strichartz/field.hpp"
#include "strichartz/norms.hpp"
#include "strichartz/rng.hpp"

using namespace strichartz;

namespace {

CoefficientVector make_1d(std::vector<std::pair<std::int64_t, cplx>> entries,
                          TorusSpec torus = TorusSpec(1, 1.0)) {
  std::vector<CoefficientVector::Entry> e;
  for (auto& [k, a] : entries) e.emplace_back(Freq(k), a);
  return CoefficientVector(torus, std::move(e));
}

CoefficientVector random_support(std::uint64_t seed, int count, std::int64_t lo, std::int64_t hi,
                                 TorusSpec torus = TorusSpec(1, 1.0)) {
  Rng rng(seed);
  std::vector<CoefficientVector::Entry> e;
  std::vector<std::int64_t> ks;
  while (static_cast<int>(ks.size()) < count) {
    const std::int64_t k = lo + static_cast<std::int64_t>(rng.next_u64() % (hi - lo + 1));
    if (std::find(ks.begin(), ks.end(), k) == ks.end()) ks.push_back(k);
  }
  for (auto k : ks) e.emplace_back(Freq(k), rng.next_complex_gaussian());
  return CoefficientVector(torus, std::move(e));
}

}  // namespace

TEST_CASE("fft agrees with the direct transform") {
  Rng rng(5);
  for (std::size_t n : {2u, 8u, 32u}) {
    std::vector<cplx> x(n);
    for (auto& v : x) v = rng.next_complex_gaussian();
    auto y = x;
    fft(y, -1);
    for (std::size_t k = 0; k < n; ++k) {
      cplx direct{0, 0};
      for (std::size_t m = 0; m < n; ++m)
        direct += x[m] * std::polar(1.0, -kTwoPi * double(k * m) / double(n));
      CHECK(std::abs(y[k] - direct) < 1e-10 * std::max(1.0, std::abs(direct)));
    }
    // inverse round trip
    fft(y, +1);
    for (std::size_t m = 0; m < n; ++m)
      CHECK(std::abs(y[m] / double(n) - x[m]) < 1e-12);
  }
}

TEST_CASE("gauss-kronrod constants integrate exactly") {
  // weights sum to the interval length
  double wk = 0.0, wg = 0.0;
  for (int i = 0; i < 7; ++i) wk += 2.0 * gk15::wgk[i];
  wk += gk15::wgk[7];
  for (int i = 0; i < 3; ++i) wg += 2.0 * gk15::wg[i];
  wg += gk15::wg[3];
  CHECK(wk == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(wg == doctest::Approx(2.0).epsilon(1e-14));

  // composite rule integrates sin over [0, pi] and polynomials exactly
  const TimeRule r = TimeRule::gauss_kronrod(kTwoPi / 2.0, 2);
  double s = 0.0, s_coarse = 0.0, poly = 0.0;
  for (std::size_t j = 0; j < r.size(); ++j) {
    s += r.weights[j] * std::sin(r.nodes[j]);
    s_coarse += r.coarse_weights[j] * std::sin(r.nodes[j]);
    poly += r.weights[j] * std::pow(r.nodes[j], 9);
  }
  CHECK(s == doctest::Approx(2.0).epsilon(1e-13));
  CHECK(s_coarse == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(poly == doctest::Approx(std::pow(kTwoPi / 2.0, 10) / 10.0).epsilon(1e-13));
}

TEST_CASE("uniform periodic rule: nodes, weights, coarse subset") {
  const TimeRule r = TimeRule::uniform_periodic(kTwoPi, 8);
  CHECK(r.size() == 8);
  CHECK(r.nodes[3] == doctest::Approx(3.0 * kTwoPi / 8.0));
  double total = 0.0, coarse = 0.0;
  for (std::size_t j = 0; j < 8; ++j) {
    total += r.weights[j];
    coarse += r.coarse_weights[j];
  }
  CHECK(total == doctest::Approx(kTwoPi).epsilon(1e-14));
  CHECK(coarse == doctest::Approx(kTwoPi).epsilon(1e-14));
}

TEST_CASE("sampling_for obeys the degree bound") {
  std::vector<CoefficientVector::Entry> e;
  for (std::int64_t k = 0; k <= 64; ++k) e.emplace_back(Freq(k), cplx{1.0, 0.0});
  const CoefficientVector c(TorusSpec(1, 1.0), std::move(e));
  const auto g = sampling_for(6, c, 1.0, 128);
  CHECK(g.mx[0] >= 385);  // 6 * spread + 1
  CHECK((g.mx[0] & (g.mx[0] - 1)) == 0);

  const auto single = make_1d({{5, {1, 0}}});
  const auto gs = sampling_for(6, single, 1.0, 128);
  CHECK(gs.mx[0] >= 7);  // p + 1 for the minimal grid
  CHECK_THROWS(sampling_for(5, c, 1.0, 128));
  CHECK_THROWS(sampling_for(6, c, -1.0, 128));
}

TEST_CASE("single mode fields are unimodular; constants are constant") {
  const auto c = make_1d({{3, {1, 0}}});
  auto grid = sampling_for(2, c, 0.5, 64);
  const auto f = evaluate_field(c, Dispersion::schrodinger(), grid);
  for (const cplx& v : f.values) CHECK(std::abs(std::abs(v) - 1.0) < 1e-13);

  const auto c2 = make_1d({{0, {2, 0}}});
  const auto f2 = evaluate_field(c2, Dispersion::airy(), sampling_for(2, c2, 1.0, 32));
  for (const cplx& v : f2.values) CHECK(std::abs(v - cplx{2.0, 0.0}) < 1e-13);
}

TEST_CASE("field values match direct summation") {
  const auto c = make_1d({{1, {1, 0}}, {-1, {1, 0}}});
  GridSampling grid;
  grid.d = 1;
  grid.mx[0] = 16;
  grid.time = TimeRule::uniform_periodic(kTwoPi, 4);
  const auto f = evaluate_field(c, Dispersion::schrodinger(), grid);
  // t = 0 slice: 2 cos(x_m)
  for (std::size_t m = 0; m < 8; ++m) {
    const double x = kTwoPi * double(m) / 16.0;
    CHECK(std::abs(f.values[m] - cplx{2.0 * std::cos(x), 0.0}) < 1e-12 * 2.0);
  }
  // generic slice against direct summation
  const double t = grid.time.nodes[2];
  for (std::size_t m = 0; m < 16; ++m) {
    const double x = kTwoPi * double(m) / 16.0;
    cplx direct{0, 0};
    for (const auto& [k, a] : c.entries())
      direct += a * std::polar(1.0, double(k[0]) * x - t * double(k[0] * k[0]));
    CHECK(std::abs(f.values[2 * 16 + m] - direct) < 1e-12);
  }
}

TEST_CASE("2d field values match direct summation") {
  const TorusSpec torus(2, 1.0, 0.75);
  CoefficientVector c(torus, {{Freq(1, 2), cplx{1.0, 0.5}}, {Freq(-2, 0), cplx{0.0, 1.0}}});
  GridSampling grid;
  grid.d = 2;
  grid.mx = {8, 8};
  grid.time = TimeRule::gauss_kronrod(0.3, 1);
  const auto f = evaluate_field(c, Dispersion::schrodinger(), grid);
  const double t = grid.time.nodes[7];
  for (std::size_t m0 = 0; m0 < 8; ++m0)
    for (std::size_t m1 = 0; m1 < 8; ++m1) {
      const double x0 = torus.period(0) * double(m0) / 8.0;
      const double x1 = torus.period(1) * double(m1) / 8.0;
      cplx direct{0, 0};
      for (const auto& [k, a] : c.entries()) {
        const auto xi = physical(k, torus);
        direct += a * std::polar(1.0, xi[0] * x0 + xi[1] * x1 -
                                          t * Dispersion::schrodinger().omega(k, torus));
      }
      CHECK(std::abs(f.values[7 * 64 + m0 * 8 + m1] - direct) < 1e-12);
    }
}

TEST_CASE("aliasing guard rejects undersized grids") {
  const auto c = make_1d({{0, {1, 0}}, {40, {1, 0}}});
  GridSampling grid;
  grid.d = 1;
  grid.mx[0] = 32;
  grid.time = TimeRule::uniform_periodic(1.0, 2);
  CHECK_THROWS(evaluate_field(c, Dispersion::schrodinger(), grid));
}

TEST_CASE("round trip: forward transform recovers coefficients") {
  const auto c = random_support(17, 12, -30, 30);
  const auto grid = sampling_for(4, c, 1.0, 64);
  const auto f = evaluate_field(c, Dispersion::schrodinger(), grid);
  std::vector<Freq> supp;
  for (const auto& [k, a] : c.entries()) supp.push_back(k);
  const auto back = slice_coefficients(f, 5, supp);
  const double t = grid.time.nodes[5];
  for (std::size_t i = 0; i < supp.size(); ++i) {
    const cplx expect =
        c.entries()[i].second *
        std::polar(1.0, -t * Dispersion::schrodinger().omega(supp[i], c.torus()));
    CHECK(std::abs(back[i] - expect) <= 1e-10 * std::max(1.0, std::abs(expect)));
  }
}

TEST_CASE("field evaluation is linear in the coefficients") {
  const auto c1 = random_support(21, 8, -16, 16);
  const auto c2 = random_support(22, 8, -16, 16);
  // common grid covering both supports
  std::vector<CoefficientVector::Entry> sum_entries(c1.entries());
  for (const auto& [k, a] : c2.entries()) {
    bool merged = false;
    for (auto& [k2, a2] : sum_entries)
      if (k2 == k) {
        a2 += 2.0 * a;
        merged = true;
        break;
      }
    if (!merged) sum_entries.emplace_back(k, 2.0 * a);
  }
  const CoefficientVector csum(c1.torus(), std::move(sum_entries));
  GridSampling grid = sampling_for(2, csum, 0.7, 60);
  const auto f1 = evaluate_field(c1, Dispersion::schrodinger(), grid);
  const auto f2 = evaluate_field(c2, Dispersion::schrodinger(), grid);
  const auto fs = evaluate_field(csum, Dispersion::schrodinger(), grid);
  double max_rel = 0.0;
  for (std::size_t i = 0; i < fs.values.size(); ++i) {
    const cplx lin = f1.values[i] + 2.0 * f2.values[i];
    max_rel = std::max(max_rel, std::abs(fs.values[i] - lin));
  }
  CHECK(max_rel < 1e-12 * 10.0);
}

TEST_CASE("unitarity: slice L2 norm is t-independent") {
  const auto c = random_support(31, 10, -20, 20);
  for (const Dispersion& disp :
       {Dispersion::schrodinger(), Dispersion::airy(), Dispersion::fractional(2.5)}) {
    const auto grid = sampling_for(2, c, 0.9, 45);
    const auto f = evaluate_field(c, disp, grid);
    const double expect = c.torus().volume() * c.l2_norm_sq();
    for (std::size_t j = 0; j < grid.time_points(); ++j) {
      double s = 0.0;
      for (std::size_t m = 0; m < grid.spatial_size(); ++m) s += std::norm(f.slice(j)[m]);
      s *= c.torus().volume() / double(grid.spatial_size());
      CHECK(std::abs(s - expect) <= 1e-10 * expect);
    }
  }
}

TEST_CASE("modulus translation identity under frequency shift") {
  // |e^{it Lap}(e^{i k0 x} f)|(x, t) = |e^{it Lap} f|(x - 2 k0 t, t)
  const std::int64_t k0 = 2;
  const auto c = make_1d({{-1, {0.5, 0.5}}, {0, {1, 0}}, {1, {0, -1}}});
  const auto shifted = galilean_shift(c, Freq(k0));
  const std::size_t M = 64;
  GridSampling grid;
  grid.d = 1;
  grid.mx[0] = M;
  // times where 2 k0 t is a grid step multiple: t = pi/16 -> shift 2*2*t = pi/4 = 8 steps
  grid.time = TimeRule::uniform_periodic(kTwoPi / 32.0, 2);
  const auto f = evaluate_field(c, Dispersion::schrodinger(), grid);
  const auto g = evaluate_field(shifted, Dispersion::schrodinger(), grid);
  const double t = grid.time.nodes[1];  // pi/32... check index-shift correspondence
  const double shift_x = 2.0 * double(k0) * t;
  const double step = kTwoPi / double(M);
  const double steps = shift_x / step;
  REQUIRE(std::abs(steps - std::round(steps)) < 1e-12);
  const std::int64_t off = static_cast<std::int64_t>(std::llround(steps));
  for (std::size_t m = 0; m < M; ++m) {
    const std::size_t src = static_cast<std::size_t>((static_cast<std::int64_t>(m) - off % 64 + 64) % 64);
    CHECK(std::abs(std::abs(g.values[M + m]) - std::abs(f.values[M + src])) < 1e-10);
  }
}

TEST_CASE("binary dump round trip") {
  const auto c = random_support(41, 6, -10, 10);
  const auto grid = sampling_for(2, c, 0.4, 30);
  const auto f = evaluate_field(c, Dispersion::airy(), grid);
  const std::string path = "field_dump_test.bin";
  dump_field(f, path);
  const auto back = load_field(path);
  std::remove(path.c_str());
  REQUIRE(back.values.size() == f.values.size());
  CHECK(back.grid.mx[0] == f.grid.mx[0]);
  CHECK(back.torus == f.torus);
  CHECK(back.support_spread[0] == f.support_spread[0]);
  for (std::size_t i = 0; i < f.values.size(); ++i) CHECK(back.values[i] == f.values[i]);
  for (std::size_t j = 0; j < f.grid.time_points(); ++j)
    CHECK(back.grid.time.nodes[j] == f.grid.time.nodes[j]);
}
