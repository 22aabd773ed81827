#pragma once

#include <complex>
#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

#include "strichartz/coeffs.hpp"
#include "strichartz/dispersion.hpp"
#include "strichartz/fft.hpp"
#include "strichartz/parallel.hpp"
#include "strichartz/quadrature.hpp"

namespace strichartz {

// Space-time sampling layout. Spatial nodes are uniform over each period
// (x_m = m * period / M); time nodes come from the attached quadrature rule.
struct GridSampling {
  int d = 1;
  std::array<std::size_t, 2> mx{1, 1};
  TimeRule time;

  std::size_t spatial_size() const {
    std::size_t n = mx[0];
    if (d == 2) n *= mx[1];
    return n;
  }
  std::size_t time_points() const { return time.size(); }
  double T() const { return time.T; }

  void validate() const {
    if (d != 1 && d != 2) throw std::invalid_argument("grid: d must be 1 or 2");
    for (int i = 0; i < d; ++i)
      if (mx[i] < 1) throw std::invalid_argument("grid: spatial points must be >= 1");
    if (!(time.T > 0)) throw std::invalid_argument("grid: T must be positive");
  }

  // Spatial quadrature of |f|^p is exact when M exceeds the trigonometric
  // degree (p/2) * spread on every axis.
  bool exact_for_power(const CoefficientVector& c, int p) const {
    if (p < 2 || p % 2 != 0) return false;
    for (int i = 0; i < d; ++i) {
      const std::int64_t degree = static_cast<std::int64_t>(p / 2) * c.spread(i);
      if (static_cast<std::int64_t>(mx[i]) <= degree) return false;
    }
    return true;
  }
};

// Grid for an even target power: M = p * max(spread, 1) + 1 per axis, padded
// to a power of two; M_t nodes from the time budget.
inline GridSampling sampling_for(int p, const CoefficientVector& coeffs, double T,
                                 std::size_t time_budget) {
  if (p < 2 || p > 8 || p % 2 != 0)
    throw std::invalid_argument("sampling_for: p must be one of {2,4,6,8}");
  if (!(T > 0)) throw std::invalid_argument("sampling_for: T must be positive");
  GridSampling g;
  g.d = coeffs.torus().d;
  for (int i = 0; i < g.d; ++i) {
    const std::int64_t spread = std::max<std::int64_t>(coeffs.spread(i), 1);
    g.mx[i] = next_pow2(static_cast<std::size_t>(p) * static_cast<std::size_t>(spread) + 1);
  }
  g.time = TimeRule::gauss_kronrod(T, std::max<std::size_t>(1, time_budget / 15));
  return g;
}

struct FieldSamples {
  std::vector<cplx> values;  // time-major: values[j * spatial + m]
  GridSampling grid;
  TorusSpec torus;
  // lattice extent of the generating support, for spatial exactness checks
  std::array<std::int64_t, 2> support_spread{0, 0};

  const cplx* slice(std::size_t j) const { return values.data() + j * grid.spatial_size(); }
};

// One factor of an integrand, with grid bins and symbol values precomputed.
// An optional affine modulation omega -> omega - (a.k + b) may be subtracted
// by integral drivers: it translates the field rigidly in space without
// changing exact spatial integrals, and keeps phase arguments small.
struct PreparedFactor {
  std::vector<cplx> amps;
  std::vector<std::size_t> bins;
  std::vector<double> omegas;

  static PreparedFactor make(const CoefficientVector& c, const Dispersion& disp,
                             const GridSampling& grid, const std::array<double, 3>& affine) {
    for (int i = 0; i < grid.d; ++i) {
      if (static_cast<std::int64_t>(grid.mx[i]) <= c.spread(i))
        throw std::invalid_argument(
            "grid has fewer points than the support spread; samples would alias");
    }
    PreparedFactor f;
    f.amps.reserve(c.size());
    f.bins.reserve(c.size());
    f.omegas.reserve(c.size());
    for (const auto& [k, a] : c.entries()) {
      std::size_t bin = 0;
      for (int i = 0; i < grid.d; ++i) {
        const std::int64_t m = static_cast<std::int64_t>(grid.mx[i]);
        const std::int64_t r = ((k[i] % m) + m) % m;
        bin = bin * m + static_cast<std::size_t>(r);
      }
      f.amps.push_back(a);
      f.bins.push_back(bin);
      const double l = affine[0] * static_cast<double>(k[0]) +
                       affine[1] * static_cast<double>(k[1]) + affine[2];
      f.omegas.push_back(disp.omega(k, c.torus()) - l);
    }
    return f;
  }

  // buf <- field values on the spatial grid at time t (inverse transform of
  // the phased coefficients).
  void eval_slice(double t, const GridSampling& grid, std::vector<cplx>& buf,
                  std::vector<cplx>& scratch) const {
    buf.assign(grid.spatial_size(), cplx{0.0, 0.0});
    for (std::size_t i = 0; i < amps.size(); ++i)
      buf[bins[i]] += amps[i] * std::polar(1.0, -t * omegas[i]);
    if (grid.d == 1) {
      fft(buf, +1);
    } else {
      fft2(buf, grid.mx[0], grid.mx[1], +1, scratch);
    }
  }
};

// Propagated field on the full grid: phases e^{-i t omega(k)} applied per
// time node, then an inverse transform per slice. Deterministic for fixed
// inputs; slices are computed in parallel into disjoint slots.
inline FieldSamples evaluate_field(const CoefficientVector& coeffs, const Dispersion& disp,
                                   const GridSampling& grid) {
  grid.validate();
  if (grid.d != coeffs.torus().d)
    throw std::invalid_argument("evaluate_field: grid dimension mismatch");
  const PreparedFactor f = PreparedFactor::make(coeffs, disp, grid, {0.0, 0.0, 0.0});
  FieldSamples out;
  out.grid = grid;
  out.torus = coeffs.torus();
  for (int i = 0; i < grid.d; ++i) out.support_spread[i] = coeffs.spread(i);
  const std::size_t ns = grid.spatial_size();
  out.values.resize(ns * grid.time_points());
  parallel_for(grid.time_points(), [&](std::size_t j) {
    std::vector<cplx> buf, scratch;
    f.eval_slice(grid.time.nodes[j], grid, buf, scratch);
    std::copy(buf.begin(), buf.end(), out.values.begin() + j * ns);
  });
  return out;
}

// Forward transform of one time slice back onto a coefficient support
// (round-trip check utility).
inline std::vector<cplx> slice_coefficients(const FieldSamples& field, std::size_t j,
                                            const std::vector<Freq>& support) {
  const auto& grid = field.grid;
  std::vector<cplx> buf(field.slice(j), field.slice(j) + grid.spatial_size());
  std::vector<cplx> scratch;
  if (grid.d == 1)
    fft(buf, -1);
  else
    fft2(buf, grid.mx[0], grid.mx[1], -1, scratch);
  const double scale = 1.0 / static_cast<double>(grid.spatial_size());
  std::vector<cplx> out;
  out.reserve(support.size());
  for (const auto& k : support) {
    std::size_t bin = 0;
    for (int i = 0; i < grid.d; ++i) {
      const std::int64_t m = static_cast<std::int64_t>(grid.mx[i]);
      const std::int64_t r = ((k[i] % m) + m) % m;
      bin = bin * m + static_cast<std::size_t>(r);
    }
    out.push_back(buf[bin] * scale);
  }
  return out;
}

// Binary dump: little-endian header (magic, d, Mx per axis, M_t, T, torus,
// time-rule tag) followed by float64 re/im pairs, row-major, time-major.
inline void dump_field(const FieldSamples& field, const std::string& path) {
  std::FILE* fp = std::fopen(path.c_str(), "wb");
  if (!fp) throw std::runtime_error("cannot open " + path + " for writing");
  auto w64 = [&](std::uint64_t v) { std::fwrite(&v, sizeof v, 1, fp); };
  auto wf = [&](double v) { std::fwrite(&v, sizeof v, 1, fp); };
  std::fwrite("STRFLD01", 8, 1, fp);
  w64(static_cast<std::uint64_t>(field.grid.d));
  w64(field.grid.mx[0]);
  w64(field.grid.d == 2 ? field.grid.mx[1] : 1);
  w64(field.grid.time_points());
  wf(field.grid.T());
  wf(field.torus.lambda);
  wf(field.torus.alphas[0]);
  wf(field.torus.alphas[1]);
  w64(field.grid.time.kind == TimeRule::Kind::uniform_periodic ? 0 : 1);
  w64(field.grid.time.panels);
  w64(static_cast<std::uint64_t>(field.support_spread[0]));
  w64(static_cast<std::uint64_t>(field.support_spread[1]));
  for (const cplx& v : field.values) {
    wf(v.real());
    wf(v.imag());
  }
  std::fclose(fp);
}

inline FieldSamples load_field(const std::string& path) {
  std::FILE* fp = std::fopen(path.c_str(), "rb");
  if (!fp) throw std::runtime_error("cannot open " + path);
  auto fail = [&]() -> std::runtime_error {
    std::fclose(fp);
    return std::runtime_error("malformed field dump: " + path);
  };
  char magic[8];
  if (std::fread(magic, 8, 1, fp) != 1 || std::string(magic, 8) != "STRFLD01") throw fail();
  auto r64 = [&] {
    std::uint64_t v;
    if (std::fread(&v, sizeof v, 1, fp) != 1) throw fail();
    return v;
  };
  auto rf = [&] {
    double v;
    if (std::fread(&v, sizeof v, 1, fp) != 1) throw fail();
    return v;
  };
  FieldSamples out;
  out.grid.d = static_cast<int>(r64());
  out.grid.mx[0] = r64();
  out.grid.mx[1] = r64();
  const std::uint64_t mt = r64();
  const double T = rf();
  const double lambda = rf();
  const double a0 = rf();
  const double a1 = rf();
  (void)a0;
  out.torus = TorusSpec(out.grid.d, lambda, out.grid.d == 2 ? a1 : 1.0);
  const std::uint64_t rule = r64();
  const std::uint64_t panels = r64();
  out.grid.time = rule == 0 ? TimeRule::uniform_periodic(T, panels)
                            : TimeRule::gauss_kronrod(T, panels);
  out.support_spread[0] = static_cast<std::int64_t>(r64());
  out.support_spread[1] = static_cast<std::int64_t>(r64());
  if (out.grid.time_points() != mt) throw fail();
  out.values.resize(out.grid.spatial_size() * mt);
  for (cplx& v : out.values) {
    const double re = rf();
    const double im = rf();
    v = {re, im};
  }
  std::fclose(fp);
  return out;
}

}  // namespace strichartz
