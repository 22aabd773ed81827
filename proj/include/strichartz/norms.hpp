#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "strichartz/coeffs.hpp"
#include "strichartz/dispersion.hpp"
#include "strichartz/field.hpp"
#include "strichartz/parallel.hpp"
#include "strichartz/quadrature.hpp"
#include "strichartz/resonance.hpp"

namespace strichartz {

struct NormResult {
  double value = 0.0;
  double p = 2.0;
  double quadrature_error_estimate = 0.0;
  bool exact = false;
};

struct NormOptions {
  std::size_t time_budget = std::size_t{1} << 14;  // max time nodes
  double rel_tol = 1e-7;                           // doubling termination
  bool allow_exact_routes = true;                  // estimator fast paths
  double window_pair_guard = 3e8;                  // class pair-cost cap
};

// One factor |f_j|^{e_j} of a product integrand.
struct ProductFactor {
  const CoefficientVector* coeffs;
  double exponent;
};

namespace detail {

inline bool is_even_integer(double e) {
  const double r = std::round(e);
  return std::abs(e - r) < 1e-12 && static_cast<long long>(r) % 2 == 0 && r >= 2.0;
}

// Least-squares affine fit of the symbol over the union of supports.
// Subtracting an affine function of k from every factor's symbol translates
// the product field rigidly in space, which leaves exact spatial integrals
// unchanged while keeping phase arguments and the effective time bandwidth
// small. The fit depends only on relative geometry, so frequency translates
// of the same data produce the same fitted residuals.
inline std::array<double, 3> affine_symbol_fit(const std::vector<ProductFactor>& factors,
                                               const Dispersion& disp, const TorusSpec& torus) {
  // normal equations for omega ~ a0 k0 + a1 k1 + b, centered for conditioning
  double n = 0.0;
  double mk0 = 0.0, mk1 = 0.0, mw = 0.0;
  for (const auto& f : factors)
    for (const auto& [k, c] : f.coeffs->entries()) {
      n += 1.0;
      mk0 += static_cast<double>(k[0]);
      mk1 += static_cast<double>(k[1]);
      mw += disp.omega(k, torus);
    }
  if (n == 0.0) return {0.0, 0.0, 0.0};
  mk0 /= n;
  mk1 /= n;
  mw /= n;
  double s00 = 0.0, s01 = 0.0, s11 = 0.0, b0 = 0.0, b1 = 0.0;
  for (const auto& f : factors)
    for (const auto& [k, c] : f.coeffs->entries()) {
      const double d0 = static_cast<double>(k[0]) - mk0;
      const double d1 = static_cast<double>(k[1]) - mk1;
      const double dw = disp.omega(k, torus) - mw;
      s00 += d0 * d0;
      s01 += d0 * d1;
      s11 += d1 * d1;
      b0 += d0 * dw;
      b1 += d1 * dw;
    }
  double a0 = 0.0, a1 = 0.0;
  const double det = s00 * s11 - s01 * s01;
  if (torus.d == 2 && std::abs(det) > 1e-9 * std::max(1.0, s00 * s11)) {
    a0 = (b0 * s11 - b1 * s01) / det;
    a1 = (b1 * s00 - b0 * s01) / det;
  } else if (s00 > 0.0) {
    a0 = b0 / s00;
    if (torus.d == 2 && s11 > 0.0) a1 = b1 / s11;
  }
  const double b = mw - a0 * mk0 - a1 * mk1;
  return {a0, a1, b};
}

// Upper bound on the time frequencies of the spatially integrated integrand:
// momentum-matched tuples cancel any common affine part of the symbol, so
// only the per-support residual spread contributes.
inline double time_band_bound(const std::vector<ProductFactor>& factors, const Dispersion& disp,
                              const TorusSpec& torus, const std::array<double, 3>& affine) {
  double band = 0.0;
  for (const auto& f : factors) {
    double lo = 0.0, hi = 0.0;
    bool first = true;
    for (const auto& [k, c] : f.coeffs->entries()) {
      const double l = affine[0] * static_cast<double>(k[0]) +
                       affine[1] * static_cast<double>(k[1]) + affine[2];
      const double r = disp.omega(k, torus) - l;
      if (first) {
        lo = hi = r;
        first = false;
      } else {
        lo = std::min(lo, r);
        hi = std::max(hi, r);
      }
    }
    band += std::ceil(f.exponent / 2.0) * (hi - lo);
  }
  return band;
}

struct SliceSums {
  double fine = 0.0;
  double coarse_spatial = 0.0;
};

// integral of prod_j |f_j|^{e_j} over the spatial grid at the rule's nodes
class ProductIntegrand {
 public:
  ProductIntegrand(const std::vector<ProductFactor>& factors, const Dispersion& disp,
                   const TorusSpec& torus, GridSampling grid, const std::array<double, 3>& affine,
                   bool need_spatial_coarse)
      : torus_(torus), grid_(grid), need_coarse_(need_spatial_coarse) {
    exps_.reserve(factors.size());
    for (const auto& f : factors) {
      prepared_.push_back(PreparedFactor::make(*f.coeffs, disp, grid_, affine));
      exps_.push_back(f.exponent);
    }
  }

  const GridSampling& grid() const { return grid_; }

  // evaluates with the given time rule; fine/coarse pairs are accumulated in
  // node order after the parallel slice pass
  void evaluate(const TimeRule& rule, double& fine, double& fine_coarse_time,
                double& coarse_spatial) const {
    const std::size_t nt = rule.size();
    std::vector<SliceSums> per_slice(nt);
    parallel_for(nt, [&](std::size_t j) {
      thread_local std::vector<std::vector<cplx>> bufs;
      thread_local std::vector<cplx> scratch;
      if (bufs.size() < prepared_.size()) bufs.resize(prepared_.size());
      GridSampling g = grid_;
      g.time = rule;
      for (std::size_t fi = 0; fi < prepared_.size(); ++fi)
        prepared_[fi].eval_slice(rule.nodes[j], g, bufs[fi], scratch);
      per_slice[j] = spatial_sums(bufs);
    });
    Compensated cf, cc, cs;
    for (std::size_t j = 0; j < nt; ++j) {
      cf.add(rule.weights[j] * per_slice[j].fine);
      cc.add(rule.coarse_weights[j] * per_slice[j].fine);
      cs.add(rule.weights[j] * per_slice[j].coarse_spatial);
    }
    fine = cf.value();
    fine_coarse_time = cc.value();
    coarse_spatial = cs.value();
  }

 private:
  double point_product(const std::vector<std::vector<cplx>>& bufs, std::size_t m) const {
    double prod = 1.0;
    for (std::size_t fi = 0; fi < exps_.size(); ++fi) {
      const double n2 = std::norm(bufs[fi][m]);
      const double e = exps_[fi];
      if (e == 2.0)
        prod *= n2;
      else if (e == 4.0)
        prod *= n2 * n2;
      else if (e == 6.0)
        prod *= n2 * n2 * n2;
      else
        prod *= std::pow(n2, 0.5 * e);
    }
    return prod;
  }

  SliceSums spatial_sums(const std::vector<std::vector<cplx>>& bufs) const {
    SliceSums out;
    const double vol = torus_.volume();
    const std::size_t ns = grid_.spatial_size();
    Compensated fine;
    Compensated half;
    if (grid_.d == 1) {
      for (std::size_t m = 0; m < ns; ++m) {
        const double v = point_product(bufs, m);
        fine.add(v);
        if (need_coarse_ && (m & 1) == 0) half.add(v);
      }
    } else {
      for (std::size_t m0 = 0; m0 < grid_.mx[0]; ++m0)
        for (std::size_t m1 = 0; m1 < grid_.mx[1]; ++m1) {
          const double v = point_product(bufs, m0 * grid_.mx[1] + m1);
          fine.add(v);
          if (need_coarse_ && (m0 & 1) == 0 && (m1 & 1) == 0) half.add(v);
        }
    }
    out.fine = fine.value() * vol / static_cast<double>(ns);
    const double coarse_pts = grid_.d == 1 ? static_cast<double>(ns / 2)
                                           : static_cast<double>((grid_.mx[0] / 2) * (grid_.mx[1] / 2));
    out.coarse_spatial = need_coarse_ && coarse_pts > 0 ? half.value() * vol / coarse_pts : 0.0;
    return out;
  }

  TorusSpec torus_;
  GridSampling grid_;
  bool need_coarse_;
  std::vector<PreparedFactor> prepared_;
  std::vector<double> exps_;
};

}  // namespace detail

struct IntegralResult {
  double value = 0.0;
  double error_estimate = 0.0;
  bool exact = false;
  bool converged = true;
  std::size_t time_nodes = 0;
  std::string route = "quadrature";
};

// Streaming quadrature of int_0^T int_torus prod_j |f_j|^{e_j} dx dt.
// Spatial rule: uniform grid, exact for even exponents once the padded size
// clears the trigonometric degree; 2x oversampled otherwise, with the
// refinement difference reported. Time rule: exact uniform rule over full
// 2 pi periods of integer symbols, otherwise composite Gauss-Kronrod panels
// doubled until the value settles or the node budget is hit.
inline IntegralResult product_integral_quadrature(const std::vector<ProductFactor>& factors,
                                                  const Dispersion& disp, double T,
                                                  const NormOptions& opts = {}) {
  if (factors.empty()) throw std::invalid_argument("quadrature: no factors");
  const TorusSpec torus = factors[0].coeffs->torus();
  for (const auto& f : factors) {
    if (!(f.coeffs->torus() == torus)) throw std::invalid_argument("quadrature: torus mismatch");
    if (!(f.exponent > 0)) throw std::invalid_argument("quadrature: exponents must be positive");
  }
  if (!(T > 0)) throw std::invalid_argument("quadrature: T must be positive");
  for (const auto& f : factors)
    if (f.coeffs->empty()) return {0.0, 0.0, true, true, 0, "quadrature"};

  bool all_even = true;
  for (const auto& f : factors) all_even = all_even && detail::is_even_integer(f.exponent);

  GridSampling grid;
  grid.d = torus.d;
  for (int ax = 0; ax < torus.d; ++ax) {
    double degree = 0.0;
    for (const auto& f : factors)
      degree += std::ceil(f.exponent / 2.0) * static_cast<double>(f.coeffs->spread(ax));
    std::size_t m = static_cast<std::size_t>(degree) + 1;
    if (!all_even) m *= 2;  // no exactness theorem applies; oversample
    grid.mx[ax] = next_pow2(std::max<std::size_t>(m, 2));
  }

  const auto affine = detail::affine_symbol_fit(factors, disp, torus);
  const double band = detail::time_band_bound(factors, disp, torus, affine);

  const bool full_period =
      torus.is_unit_rational() && disp.integer_symbol(torus) && T == kTwoPi && all_even;

  IntegralResult out;
  if (full_period) {
    const std::size_t needed = static_cast<std::size_t>(std::floor(band)) + 2;
    const std::size_t mt = std::min<std::size_t>(std::max<std::size_t>(needed, 2), opts.time_budget);
    const bool time_exact = mt >= needed;
    TimeRule rule = TimeRule::uniform_periodic(T, mt);
    detail::ProductIntegrand integrand(factors, disp, torus, grid, affine, !all_even);
    grid.time = rule;
    double fine = 0.0, coarse_t = 0.0, coarse_s = 0.0;
    integrand.evaluate(rule, fine, coarse_t, coarse_s);
    out.value = fine;
    out.time_nodes = mt;
    out.converged = time_exact;
    double err = time_exact ? 0.0 : std::abs(fine - coarse_t);
    if (!all_even) err += std::abs(fine - coarse_s);
    out.error_estimate = err;
    out.exact = all_even && time_exact;
    return out;
  }

  const std::size_t max_panels = std::max<std::size_t>(1, opts.time_budget / 15);
  std::size_t target = static_cast<std::size_t>(std::ceil(band * T / 8.0)) + 1;
  std::size_t panels = std::min(std::max<std::size_t>(target, 2), max_panels);

  detail::ProductIntegrand integrand(factors, disp, torus, grid, affine, !all_even);
  double fine = 0.0, coarse_t = 0.0, coarse_s = 0.0;
  integrand.evaluate(TimeRule::gauss_kronrod(T, panels), fine, coarse_t, coarse_s);
  double time_err = std::abs(fine - coarse_t);
  out.time_nodes = 15 * panels;
  out.converged = false;
  while (panels < max_panels) {
    const std::size_t next = std::min(panels * 2, max_panels);
    double f2 = 0.0, c2 = 0.0, s2 = 0.0;
    integrand.evaluate(TimeRule::gauss_kronrod(T, next), f2, c2, s2);
    out.time_nodes += 15 * next;
    const double diff = std::abs(f2 - fine);
    fine = f2;
    coarse_s = s2;
    time_err = diff;
    panels = next;
    if (diff <= opts.rel_tol * std::max(std::abs(f2), 1e-300)) {
      out.converged = true;
      break;
    }
  }
  out.value = fine;
  out.error_estimate = time_err + (!all_even ? std::abs(fine - coarse_s) : 0.0);
  out.exact = false;
  return out;
}

// L^p space-time norm from precomputed samples: exact uniform spatial
// quadrature (trig exactness when the grid clears the degree bound and p is
// even) combined with the grid's time rule.
inline NormResult lp_spacetime_norm(const FieldSamples& field, double p) {
  if (!(p >= 1.0)) throw std::invalid_argument("lp norm: p >= 1 required");
  for (const cplx& v : field.values)
    if (std::isnan(v.real()) || std::isnan(v.imag()))
      throw std::invalid_argument("lp norm: field contains NaN samples");

  const auto& grid = field.grid;
  const std::size_t ns = grid.spatial_size();
  const std::size_t nt = grid.time_points();
  const double vol = field.torus.volume();

  const bool p_even = detail::is_even_integer(p);
  bool spatial_exact = p_even;
  if (p_even) {
    for (int ax = 0; ax < grid.d; ++ax) {
      const double degree = 0.5 * p * static_cast<double>(field.support_spread[ax]);
      if (static_cast<double>(grid.mx[ax]) <= degree) spatial_exact = false;
    }
  }

  std::vector<detail::SliceSums> per_slice(nt);
  parallel_for(nt, [&](std::size_t j) {
    const cplx* v = field.slice(j);
    Compensated fine, half;
    if (grid.d == 1) {
      for (std::size_t m = 0; m < ns; ++m) {
        const double x = std::pow(std::norm(v[m]), 0.5 * p);
        fine.add(x);
        if (!spatial_exact && (m & 1) == 0) half.add(x);
      }
    } else {
      for (std::size_t m0 = 0; m0 < grid.mx[0]; ++m0)
        for (std::size_t m1 = 0; m1 < grid.mx[1]; ++m1) {
          const double x = std::pow(std::norm(v[m0 * grid.mx[1] + m1]), 0.5 * p);
          fine.add(x);
          if (!spatial_exact && (m0 & 1) == 0 && (m1 & 1) == 0) half.add(x);
        }
    }
    per_slice[j].fine = fine.value() * vol / static_cast<double>(ns);
    const double coarse_pts = grid.d == 1 ? static_cast<double>(ns / 2)
                                          : static_cast<double>((grid.mx[0] / 2) * (grid.mx[1] / 2));
    per_slice[j].coarse_spatial =
        (!spatial_exact && coarse_pts > 0) ? half.value() * vol / coarse_pts : 0.0;
  });

  Compensated cf, cc, cs;
  for (std::size_t j = 0; j < nt; ++j) {
    cf.add(grid.time.weights[j] * per_slice[j].fine);
    cc.add(grid.time.coarse_weights[j] * per_slice[j].fine);
    cs.add(grid.time.weights[j] * per_slice[j].coarse_spatial);
  }
  const double fine = cf.value();

  NormResult out;
  out.p = p;
  out.value = fine <= 0.0 ? 0.0 : std::pow(fine, 1.0 / p);
  double err = 0.0;
  if (grid.time.has_coarse()) {
    const double coarse = cc.value();
    err += std::abs(out.value - (coarse <= 0.0 ? 0.0 : std::pow(coarse, 1.0 / p)));
  }
  if (!spatial_exact) {
    const double sp = cs.value();
    err += std::abs(out.value - (sp <= 0.0 ? 0.0 : std::pow(sp, 1.0 / p)));
  }
  out.quadrature_error_estimate = err;
  out.exact = spatial_exact && err <= 1e-9 * std::max(out.value, 1e-300);
  return out;
}

// Streaming L^p norm over [0, T] (norm of the raw integral computed by the
// product engine).
inline NormResult lp_norm(const CoefficientVector& coeffs, const Dispersion& disp, double T,
                          double p, const NormOptions& opts = {}) {
  if (!(p >= 1.0)) throw std::invalid_argument("lp norm: p >= 1 required");
  const IntegralResult raw =
      product_integral_quadrature({{&coeffs, p}}, disp, T, opts);
  NormResult out;
  out.p = p;
  out.value = raw.value <= 0.0 ? 0.0 : std::pow(raw.value, 1.0 / p);
  out.quadrature_error_estimate =
      raw.value <= 0.0 ? 0.0
                       : std::abs(out.value - std::pow(std::max(raw.value - raw.error_estimate, 0.0),
                                                       1.0 / p));
  out.exact = raw.exact;
  return out;
}

// Route chooser for even-power product integrals: exact resonance counting
// over full periods, the closed-form window integral for small class sizes,
// and quadrature otherwise. The spec'd oracle and the quadrature path stay
// independent; this dispatcher only selects which one feeds an estimator.
inline IntegralResult even_product_integral(const std::vector<ExactFactor>& factors,
                                            const Dispersion& disp, double T,
                                            const NormOptions& opts = {}) {
  if (factors.empty()) throw std::invalid_argument("product integral: no factors");
  const TorusSpec& torus = factors[0].coeffs->torus();
  int total_m = 0;
  for (const auto& f : factors) total_m += f.m;

  if (opts.allow_exact_routes && total_m <= 3) {
    const bool full_period = torus.is_unit_rational() && disp.integer_symbol(torus) && T == kTwoPi;
    if (full_period && factors.size() <= 2) {
      try {
        IntegralResult r;
        r.value = factors.size() == 1
                      ? exact_even_power_integral(*factors[0].coeffs, nullptr, disp, total_m,
                                                  factors[0].m, 0)
                      : exact_even_power_integral(*factors[0].coeffs, factors[1].coeffs, disp,
                                                  total_m, factors[0].m, factors[1].m);
        r.exact = true;
        r.route = "resonance";
        return r;
      } catch (const CostGuardError&) {
      }
    }
    try {
      IntegralResult r;
      r.value = exact_product_window_integral(factors, disp, T, opts.window_pair_guard);
      r.exact = true;
      r.route = "window";
      return r;
    } catch (const CostGuardError&) {
    }
  }

  std::vector<ProductFactor> pf;
  pf.reserve(factors.size());
  for (const auto& f : factors) pf.push_back({f.coeffs, 2.0 * f.m});
  return product_integral_quadrature(pf, disp, T, opts);
}

}  // namespace strichartz
