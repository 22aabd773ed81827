#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "strichartz/coeffs.hpp"
#include "strichartz/dispersion.hpp"
#include "strichartz/estimators.hpp"
#include "strichartz/field.hpp"
#include "strichartz/norms.hpp"
#include "strichartz/parallel.hpp"
#include "strichartz/region.hpp"
#include "strichartz/rng.hpp"

namespace strichartz {

// ---------------------------------------------------------------------------
// structured data generators
// ---------------------------------------------------------------------------

enum class DataKind { knapp, constant, random, single_mode };

inline const char* data_kind_name(DataKind k) {
  switch (k) {
    case DataKind::knapp: return "knapp";
    case DataKind::constant: return "constant";
    case DataKind::random: return "random";
    case DataKind::single_mode: return "single_mode";
  }
  return "?";
}

struct StructuredData {
  CoefficientVector coeffs;
  bool capped = false;  // knapp block hit the shell boundary / degenerated
  std::string generator_id;
};

namespace gen_detail {

// positive-side lattice points of the dyadic shell [N, 2N)
inline std::vector<Freq> shell_points(double N, const TorusSpec& torus) {
  std::vector<Freq> pts;
  if (torus.d == 1) {
    const double s = torus.lambda * torus.alphas[0];
    const std::int64_t lo = static_cast<std::int64_t>(std::ceil(N * s - 1e-9));
    const std::int64_t hi = static_cast<std::int64_t>(std::ceil(2.0 * N * s - 1e-9)) - 1;
    for (std::int64_t k = lo; k <= hi; ++k) pts.push_back(Freq(k));
  } else {
    const double s0 = torus.lambda * torus.alphas[0];
    const double s1 = torus.lambda * torus.alphas[1];
    const std::int64_t hi0 = static_cast<std::int64_t>(std::ceil(2.0 * N * s0));
    const std::int64_t hi1 = static_cast<std::int64_t>(std::ceil(2.0 * N * s1));
    for (std::int64_t a = -hi0; a <= hi0; ++a)
      for (std::int64_t b = -hi1; b <= hi1; ++b) {
        const Freq k(a, b);
        const double m = std::sqrt(physical_norm_sq(k, torus));
        if (m >= N * (1.0 - 1e-12) && m < 2.0 * N * (1.0 - 1e-12)) pts.push_back(k);
      }
  }
  return pts;
}

inline CoefficientVector normalized_indicator(const TorusSpec& torus, const std::vector<Freq>& pts) {
  const double a = 1.0 / std::sqrt(static_cast<double>(pts.size()));
  std::vector<CoefficientVector::Entry> e;
  e.reserve(pts.size());
  for (const Freq& k : pts) e.emplace_back(k, cplx{a, 0.0});
  return CoefficientVector(torus, std::move(e));
}

}  // namespace gen_detail

// Structured generators on the dyadic shell [N, 2N): coherent knapp blocks,
// the flat a == 1 profile, seeded gaussian data, and a single mode. All
// outputs are l2-normalized. The knapp block width is N^{alpha/2} for the
// schrodinger symbol and N^{(1+alpha)/2} for airy, capped at the shell width.
inline StructuredData structured_data(DataKind kind, double N, const Dispersion& disp,
                                      const TorusSpec& torus, double alpha = 1.0,
                                      std::uint64_t seed = 0) {
  if (!(N >= 1.0) || std::exp2(std::round(std::log2(N))) != N)
    throw std::invalid_argument("structured_data: N must be dyadic");
  StructuredData out;
  const auto shell = gen_detail::shell_points(N, torus);
  if (shell.empty()) throw std::invalid_argument("structured_data: empty shell");

  switch (kind) {
    case DataKind::single_mode: {
      out.coeffs = CoefficientVector(torus, {{shell.front(), cplx{1.0, 0.0}}});
      out.generator_id = "single_mode(N=" + std::to_string(static_cast<long long>(N)) + ")";
      return out;
    }
    case DataKind::constant: {
      out.coeffs = gen_detail::normalized_indicator(torus, shell);
      out.generator_id = "constant(N=" + std::to_string(static_cast<long long>(N)) + ")";
      return out;
    }
    case DataKind::random: {
      Rng rng(seed);
      std::vector<CoefficientVector::Entry> e;
      e.reserve(shell.size());
      for (const Freq& k : shell) e.emplace_back(k, rng.next_complex_gaussian());
      out.coeffs = CoefficientVector(torus, std::move(e)).normalized();
      out.generator_id = "random(N=" + std::to_string(static_cast<long long>(N)) +
                         ",seed=" + std::to_string(seed) + ")";
      return out;
    }
    case DataKind::knapp: {
      const bool cubic = disp.kind == Dispersion::Kind::airy ||
                         disp.kind == Dispersion::Kind::kdv_galilean;
      const double width_phys = cubic ? std::pow(N, 0.5 * (1.0 + alpha)) : std::pow(N, 0.5 * alpha);
      std::int64_t w = static_cast<std::int64_t>(
          std::llround(width_phys * torus.lambda * torus.alphas[0]));
      if (w < 1) {
        out.capped = true;
        out.coeffs = CoefficientVector(torus, {{shell.front(), cplx{1.0, 0.0}}});
        out.generator_id = "knapp->single_mode(N=" + std::to_string(static_cast<long long>(N)) + ")";
        return out;
      }
      std::vector<Freq> pts;
      if (torus.d == 1) {
        const std::int64_t avail = static_cast<std::int64_t>(shell.size());
        if (w >= avail) {
          w = avail;
          out.capped = true;
        }
        pts.assign(shell.begin(), shell.begin() + w);
      } else {
        // coherent square patch at the inner shell corner
        const std::int64_t k0 = shell.front()[0];
        std::int64_t base = 0;
        for (const Freq& k : shell) base = std::max(base, k[0]);
        (void)k0;
        const double s0 = torus.lambda * torus.alphas[0];
        const std::int64_t start = static_cast<std::int64_t>(std::ceil(N * s0));
        const std::int64_t wmax = static_cast<std::int64_t>(std::floor(0.5 * N * s0));
        if (w > wmax && wmax >= 1) {
          w = wmax;
          out.capped = true;
        }
        for (std::int64_t a = 0; a < w; ++a)
          for (std::int64_t b = 0; b < w; ++b) pts.push_back(Freq(start + a, b));
      }
      out.coeffs = gen_detail::normalized_indicator(torus, pts);
      out.generator_id = "knapp(N=" + std::to_string(static_cast<long long>(N)) +
                         ",alpha=" + std::to_string(alpha) + (out.capped ? ",capped" : "") + ")";
      return out;
    }
  }
  throw std::logic_error("structured_data: unreachable");
}

// ---------------------------------------------------------------------------
// ratio objectives
// ---------------------------------------------------------------------------

// A scale-invariant ratio of a coefficient vector on a fixed support list,
// with an analytic Wirtinger gradient (d r / d conj c) when available.
class RatioObjective {
 public:
  virtual ~RatioObjective() = default;
  virtual std::size_t dim() const = 0;
  virtual double value(const std::vector<cplx>& c) const = 0;
  virtual bool has_analytic_gradient() const = 0;
  // returns value; fills grad with d r / d conj(c)
  virtual double value_and_gradient(const std::vector<cplx>& c, std::vector<cplx>& grad) const = 0;
  virtual const std::vector<Freq>& support() const = 0;
  virtual const TorusSpec& torus() const = 0;
};

namespace ext_detail {

inline double central_diff_gradient(const RatioObjective& obj, const std::vector<cplx>& c,
                                    std::vector<cplx>& grad, double h = 1e-6) {
  // finite differences in the 2n real coordinates; grad holds the Wirtinger
  // derivative, so dr along v is 2 Re <v, grad>
  const std::size_t n = c.size();
  grad.assign(n, cplx{0.0, 0.0});
  std::vector<cplx> w = c;
  for (std::size_t i = 0; i < n; ++i) {
    w[i] = c[i] + h;
    const double fp = obj.value(w);
    w[i] = c[i] - h;
    const double fm = obj.value(w);
    const double dre = (fp - fm) / (2.0 * h);
    w[i] = c[i] + cplx{0.0, h};
    const double gp = obj.value(w);
    w[i] = c[i] - cplx{0.0, h};
    const double gm = obj.value(w);
    const double dim = (gp - gm) / (2.0 * h);
    w[i] = c[i];
    grad[i] = 0.5 * cplx{dre, dim};  // d/dconj = (d/dre + i d/dim)/2
  }
  return obj.value(c);
}

}  // namespace ext_detail

// || e^{-it omega} f ||_{L^p([0,T] x torus)} / || f ||_{L^2(torus)} as a
// function of the coefficients on a fixed support. Even p uses the adjoint
// transform for the gradient of ||field||_p^p; other p falls back to central
// differences.
class LinearLpObjective final : public RatioObjective {
 public:
  LinearLpObjective(std::vector<Freq> support, TorusSpec torus, Dispersion disp, double T, double p,
                    std::size_t time_budget = 4096)
      : support_(std::move(support)), torus_(torus), disp_(disp), T_(T), p_(p) {
    if (support_.empty()) throw std::invalid_argument("objective: empty support");
    std::sort(support_.begin(), support_.end());
    grid_.d = torus_.d;
    std::array<std::int64_t, 2> lo{}, hi{};
    for (int ax = 0; ax < torus_.d; ++ax) {
      lo[ax] = hi[ax] = support_[0][ax];
      for (const auto& k : support_) {
        lo[ax] = std::min(lo[ax], k[ax]);
        hi[ax] = std::max(hi[ax], k[ax]);
      }
      const std::int64_t spread = std::max<std::int64_t>(hi[ax] - lo[ax], 1);
      const double pe = even_p() ? p_ : 2.0 * std::ceil(0.5 * p_);
      grid_.mx[ax] = next_pow2(static_cast<std::size_t>(pe * static_cast<double>(spread)) + 1);
      if (!even_p()) grid_.mx[ax] *= 2;
    }
    omegas_.reserve(support_.size());
    bins_.reserve(support_.size());
    double wlo = 0.0, whi = 0.0;
    bool first = true;
    for (const auto& k : support_) {
      const double w = disp_.omega(k, torus_);
      omegas_.push_back(w);
      if (first) {
        wlo = whi = w;
        first = false;
      } else {
        wlo = std::min(wlo, w);
        whi = std::max(whi, w);
      }
      std::size_t bin = 0;
      for (int ax = 0; ax < torus_.d; ++ax) {
        const std::int64_t m = static_cast<std::int64_t>(grid_.mx[ax]);
        bin = bin * m + static_cast<std::size_t>(((k[ax] % m) + m) % m);
      }
      bins_.push_back(bin);
    }
    const double band = std::ceil(p_ / 2.0) * (whi - wlo);
    std::size_t panels = static_cast<std::size_t>(std::ceil(band * T_ / 6.0)) + 4;
    panels = std::min(panels, std::max<std::size_t>(1, time_budget / 15));
    grid_.time = TimeRule::gauss_kronrod(T_, panels);
  }

  std::size_t dim() const override { return support_.size(); }
  const std::vector<Freq>& support() const override { return support_; }
  const TorusSpec& torus() const override { return torus_; }
  bool has_analytic_gradient() const override { return even_p(); }

  double value(const std::vector<cplx>& c) const override { return eval(c, nullptr); }

  double value_and_gradient(const std::vector<cplx>& c, std::vector<cplx>& grad) const override {
    if (!even_p()) return ext_detail::central_diff_gradient(*this, c, grad);
    return eval(c, &grad);
  }

 private:
  bool even_p() const { return detail::is_even_integer(p_); }

  double l2sq(const std::vector<cplx>& c) const {
    double s = 0.0;
    for (const cplx& v : c) s += std::norm(v);
    return s;
  }

  // value, and optionally the Wirtinger gradient of the ratio
  double eval(const std::vector<cplx>& c, std::vector<cplx>* grad) const {
    const std::size_t n = support_.size();
    const std::size_t ns = grid_.spatial_size();
    const double vol = torus_.volume();
    const std::size_t nt = grid_.time.size();
    const double csq = l2sq(c);
    if (csq == 0.0) throw std::invalid_argument("objective: zero point");

    std::vector<double> slice_np(nt, 0.0);
    std::vector<std::vector<cplx>> slice_adj;
    if (grad) slice_adj.assign(nt, {});

    parallel_for(nt, [&](std::size_t j) {
      thread_local std::vector<cplx> buf, scratch;
      const double t = grid_.time.nodes[j];
      buf.assign(ns, cplx{0.0, 0.0});
      for (std::size_t i = 0; i < n; ++i) buf[bins_[i]] += c[i] * std::polar(1.0, -t * omegas_[i]);
      if (grid_.d == 1)
        fft(buf, +1);
      else
        fft2(buf, grid_.mx[0], grid_.mx[1], +1, scratch);
      Compensated s;
      if (grad) {
        // g = |f|^{p-2} f, then one forward transform gives the pairings
        // <|f|^{p-2} f, e^{i xi x}> for every support bin at this slice
        thread_local std::vector<cplx> gbuf, gscratch;
        gbuf.resize(ns);
        for (std::size_t m = 0; m < ns; ++m) {
          const double n2 = std::norm(buf[m]);
          s.add(std::pow(n2, 0.5 * p_));
          gbuf[m] = std::pow(n2, 0.5 * p_ - 1.0) * buf[m];
        }
        if (grid_.d == 1)
          fft(gbuf, -1);
        else
          fft2(gbuf, grid_.mx[0], grid_.mx[1], -1, gscratch);
        auto& adj = slice_adj[j];
        adj.resize(n);
        const double scale = vol / static_cast<double>(ns);
        for (std::size_t i = 0; i < n; ++i)
          adj[i] = gbuf[bins_[i]] * scale * std::polar(1.0, grid_.time.nodes[j] * omegas_[i]);
      } else {
        for (std::size_t m = 0; m < ns; ++m) s.add(std::pow(std::norm(buf[m]), 0.5 * p_));
      }
      slice_np[j] = s.value() * vol / static_cast<double>(ns);
    });

    Compensated np;
    for (std::size_t j = 0; j < nt; ++j) np.add(grid_.time.weights[j] * slice_np[j]);
    const double Np = np.value();
    const double r = std::pow(std::max(Np, 0.0), 1.0 / p_) / std::sqrt(vol * csq);
    if (grad) {
      grad->assign(n, cplx{0.0, 0.0});
      if (Np > 0.0) {
        // I_k = int |f|^{p-2} f conj(mode_k); dNp/dconj(c_k) = (p/2) I_k and
        // d r / d conj(c_k) = (r/2)(I_k / Np - c_k / |c|^2)
        for (std::size_t j = 0; j < nt; ++j) {
          const double w = grid_.time.weights[j];
          for (std::size_t i = 0; i < n; ++i) (*grad)[i] += w * slice_adj[j][i];
        }
        for (std::size_t i = 0; i < n; ++i)
          (*grad)[i] = 0.5 * r * ((*grad)[i] / Np - c[i] / csq);
      }
    }
    return r;
  }

  std::vector<Freq> support_;
  TorusSpec torus_;
  Dispersion disp_;
  double T_;
  double p_;
  GridSampling grid_;
  std::vector<double> omegas_;
  std::vector<std::size_t> bins_;
};

// ---------------------------------------------------------------------------
// projected gradient ascent on the unit sphere
// ---------------------------------------------------------------------------

struct TracePoint {
  int iter;
  double ratio;
  double step;
  double grad_norm;
};

struct ExtremizerResult {
  CoefficientVector best_coeffs;
  double best_ratio = 0.0;
  std::vector<TracePoint> trace;  // trace of the winning restart
  int restarts_used = 0;
  bool converged = false;
};

struct ExtremizeOptions {
  int restarts = 4;
  int max_iters = 200;
  double tol = 1e-7;
  double step0 = 0.1;
  std::uint64_t seed = 1;
  double knapp_alpha = 1.0;
};

namespace ext_detail {

inline void normalize(std::vector<cplx>& c) {
  double s = 0.0;
  for (const cplx& v : c) s += std::norm(v);
  s = std::sqrt(s);
  for (cplx& v : c) v /= s;
}

struct AscentOutcome {
  std::vector<cplx> point;
  double ratio = 0.0;
  bool converged = false;
  std::vector<TracePoint> trace;
};

inline AscentOutcome ascend(const RatioObjective& obj, std::vector<cplx> c,
                            const ExtremizeOptions& opts) {
  normalize(c);
  AscentOutcome out;
  std::vector<cplx> grad, trial;
  double r = obj.value_and_gradient(c, grad);
  double step = opts.step0;
  int small_count = 0;
  for (int iter = 0; iter < opts.max_iters; ++iter) {
    // tangential component on the sphere
    cplx inner{0.0, 0.0};
    for (std::size_t i = 0; i < c.size(); ++i) inner += std::conj(c[i]) * grad[i];
    double gnorm = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) gnorm += std::norm(grad[i] - inner * c[i]);
    gnorm = std::sqrt(gnorm);
    out.trace.push_back({iter, r, step, gnorm});
    if (gnorm <= 1e-10) {
      out.converged = true;
      break;
    }
    trial = c;
    for (std::size_t i = 0; i < c.size(); ++i) trial[i] += step * (grad[i] - inner * c[i]);
    normalize(trial);
    const double rt = obj.value(trial);
    if (rt > r) {
      const double rel = (rt - r) / std::max(r, 1e-300);
      c = trial;
      r = obj.value_and_gradient(c, grad);
      step = std::min(step * 1.2, 1e3);
      small_count = rel < opts.tol ? small_count + 1 : 0;
      if (small_count >= 5) {
        out.converged = true;
        break;
      }
    } else {
      step *= 0.5;
      if (step < 1e-8) break;
    }
  }
  out.point = std::move(c);
  out.ratio = r;
  return out;
}

}  // namespace ext_detail

// Multi-start projected gradient ascent over the l2 unit sphere on the given
// support. Restart seeds are always the knapp-style coherent block, the flat
// profile, and seeded gaussian draws; the result can never be worse than its
// seeds. Restarts run in parallel and merge deterministically (max ratio,
// ties to the lower restart index).
inline ExtremizerResult extremize_ratio(const RatioObjective& obj, const ExtremizeOptions& opts) {
  const std::size_t n = obj.dim();
  if (n == 0) throw std::invalid_argument("extremize: empty support");
  const int restarts = std::max(opts.restarts, 2);

  std::vector<std::vector<cplx>> seeds;
  {
    std::vector<cplx> knapp(n, cplx{0.0, 0.0});
    const std::size_t w =
        std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(std::sqrt(double(n)))));
    for (std::size_t i = 0; i < std::min(w, n); ++i) knapp[i] = 1.0;
    ext_detail::normalize(knapp);
    seeds.push_back(std::move(knapp));
    std::vector<cplx> flat(n, cplx{1.0, 0.0});
    ext_detail::normalize(flat);
    seeds.push_back(std::move(flat));
    for (int rsx = 2; rsx < restarts; ++rsx) {
      Rng rng(mix_seed(opts.seed, static_cast<std::uint64_t>(rsx)));
      std::vector<cplx> v(n);
      for (auto& x : v) x = rng.next_complex_gaussian();
      ext_detail::normalize(v);
      seeds.push_back(std::move(v));
    }
  }

  std::vector<ext_detail::AscentOutcome> outcomes(seeds.size());
  parallel_for(seeds.size(), [&](std::size_t i) { outcomes[i] = ext_detail::ascend(obj, seeds[i], opts); });

  std::size_t best = 0;
  for (std::size_t i = 1; i < outcomes.size(); ++i)
    if (outcomes[i].ratio > outcomes[best].ratio) best = i;

  ExtremizerResult res;
  res.restarts_used = restarts;
  res.best_ratio = outcomes[best].ratio;
  res.converged = outcomes[best].converged;
  res.trace = std::move(outcomes[best].trace);
  std::vector<CoefficientVector::Entry> entries;
  const auto& supp = obj.support();
  for (std::size_t i = 0; i < n; ++i) entries.emplace_back(supp[i], outcomes[best].point[i]);
  res.best_coeffs = CoefficientVector(obj.torus(), std::move(entries)).normalized();
  return res;
}

// Max mismatch between the analytic directional derivative and central
// differences over seeded random unit directions. Relative where the
// derivative is nonzero, absolute below 1e-8.
inline double gradient_check(const RatioObjective& obj, const std::vector<cplx>& point, double h,
                             int directions = 10, std::uint64_t seed = 1) {
  std::vector<cplx> grad;
  obj.value_and_gradient(point, grad);
  Rng rng(seed);
  double worst = 0.0;
  for (int dir = 0; dir < directions; ++dir) {
    std::vector<cplx> v(point.size());
    for (auto& x : v) x = rng.next_complex_gaussian();
    ext_detail::normalize(v);
    double analytic = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i)
      analytic += 2.0 * (std::conj(v[i]) * grad[i]).real();
    std::vector<cplx> wp = point, wm = point;
    for (std::size_t i = 0; i < v.size(); ++i) {
      wp[i] += h * v[i];
      wm[i] -= h * v[i];
    }
    const double fd = (obj.value(wp) - obj.value(wm)) / (2.0 * h);
    const double denom = std::max(std::abs(analytic), std::abs(fd));
    const double err = denom < 1e-8 ? std::abs(analytic - fd) : std::abs(analytic - fd) / denom;
    worst = std::max(worst, err);
  }
  return worst;
}

}  // namespace strichartz
