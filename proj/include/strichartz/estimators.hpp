#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "strichartz/coeffs.hpp"
#include "strichartz/dispersion.hpp"
#include "strichartz/norms.hpp"
#include "strichartz/region.hpp"
#include "strichartz/theory.hpp"

namespace strichartz {

// Verifier precondition violations are reported, never silently repaired.
struct PreconditionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct EstimateReport {
  std::string estimate_id;
  std::map<std::string, double> parameters;
  double observed = 0.0;
  std::optional<double> theory_bound_value;
  std::string data_provenance;  // generator ids + seeds, filled by callers
  std::string route;            // evaluation path actually used
};

inline nlohmann::json report_to_json(const EstimateReport& r) {
  nlohmann::json j;
  j["estimate_id"] = r.estimate_id;
  j["parameters"] = r.parameters;
  j["observed"] = r.observed;
  if (r.theory_bound_value)
    j["theory_bound"] = *r.theory_bound_value;
  else
    j["theory_bound"] = nullptr;
  j["data_provenance"] = r.data_provenance;
  j["route"] = r.route;
  return j;
}

namespace est_detail {

inline void require_nonzero(const CoefficientVector& c, const char* who) {
  if (c.empty() || c.l2_norm() == 0.0)
    throw PreconditionError(std::string(who) + ": zero data");
}

inline double min_abs_physical(const CoefficientVector& c) {
  double m = 0.0;
  bool first = true;
  for (const auto& [k, a] : c.entries()) {
    const double v = std::sqrt(physical_norm_sq(k, c.torus()));
    if (first || v < m) m = v, first = false;
  }
  return m;
}

inline double max_abs_physical(const CoefficientVector& c) {
  double m = 0.0;
  for (const auto& [k, a] : c.entries())
    m = std::max(m, std::sqrt(physical_norm_sq(k, c.torus())));
  return m;
}

// dyadic shell N with support modulus in [N, 2N); boundary ties inclusive
inline double infer_dyadic_shell(const CoefficientVector& c, const char* who) {
  require_nonzero(c, who);
  const double lo = min_abs_physical(c);
  const double hi = max_abs_physical(c);
  if (!(lo > 0)) throw PreconditionError(std::string(who) + ": support touches frequency zero");
  const double N = std::exp2(std::floor(std::log2(lo * (1.0 + 1e-12))));
  if (hi > 2.0 * N * (1.0 + 1e-9))
    throw PreconditionError(std::string(who) + ": support not contained in a dyadic shell [N,2N)");
  return N;
}

inline double derive_beta(double N1, double N3) {
  if (!(N3 > 1.0)) return 1.0;
  const double b = std::log(N1) / std::log(N3) - 1.0;
  return std::min(1.0, std::max(b, 1e-9));
}

struct IntegralTrace {
  double value;
  std::string route;
};

inline IntegralTrace even_integral(const std::vector<ExactFactor>& factors, const Dispersion& disp,
                                   double T, const NormOptions& opts) {
  const IntegralResult r = even_product_integral(factors, disp, T, opts);
  return {r.value, r.route};
}

}  // namespace est_detail

// ---------------------------------------------------------------------------
// linear ratio
// ---------------------------------------------------------------------------

// ||e^{-it omega} f||_{L^p([0,T] x torus)} / ||f||_{L^2(torus)}
inline double strichartz_ratio(const CoefficientVector& coeffs, const Dispersion& disp, double T,
                               double p, const NormOptions& opts = {},
                               std::string* route_out = nullptr) {
  est_detail::require_nonzero(coeffs, "strichartz_ratio");
  double num;
  std::string route;
  if (detail::is_even_integer(p)) {
    const auto r = est_detail::even_integral({{&coeffs, static_cast<int>(p) / 2}}, disp, T, opts);
    num = std::pow(std::max(r.value, 0.0), 1.0 / p);
    route = r.route;
  } else {
    num = lp_norm(coeffs, disp, T, p, opts).value;
    route = "quadrature";
  }
  if (route_out) *route_out = route;
  return num / coeffs.function_l2_norm();
}

// ---------------------------------------------------------------------------
// bilinear short-time
// ---------------------------------------------------------------------------

// ||f1 f2||_{L^2([0,T] x torus)} / (||f1||_{L^2} ||f2||_{L^2}). Requires the
// supports to sit in separated dyadic shells (high factor first) unless the
// caller explicitly overrides.
inline double bilinear_short_ratio(const CoefficientVector& c1, const CoefficientVector& c2,
                                   const Dispersion& disp, double T, bool override_separation = false,
                                   const NormOptions& opts = {}, std::string* route_out = nullptr) {
  est_detail::require_nonzero(c1, "bilinear_short_ratio");
  est_detail::require_nonzero(c2, "bilinear_short_ratio");
  if (!override_separation) {
    const double lo1 = est_detail::min_abs_physical(c1);
    const double hi2 = est_detail::max_abs_physical(c2);
    if (!(hi2 * 2.0 <= lo1 * (1.0 + 1e-9)))
      throw PreconditionError(
          "bilinear_short_ratio: supports not dyadically separated (need max|xi_2| <= min|xi_1|/2)");
  }
  const auto r = est_detail::even_integral({{&c1, 1}, {&c2, 1}}, disp, T, opts);
  if (route_out) *route_out = r.route;
  return std::sqrt(std::max(r.value, 0.0)) / (c1.function_l2_norm() * c2.function_l2_norm());
}

// ---------------------------------------------------------------------------
// trilinear verifiers (1d)
// ---------------------------------------------------------------------------

namespace est_detail {

// int prod |f_j|^2 normalized so three single modes give exactly T:
// observed = integral / (vol * prod sum|c_j|^2)
inline double trilinear_observed(const CoefficientVector& c1, const CoefficientVector& c2,
                                 const CoefficientVector& c3, const Dispersion& disp, double T,
                                 const NormOptions& opts, std::string* route) {
  if (c1.empty() || c2.empty() || c3.empty()) {
    if (route) *route = "degenerate";
    return 0.0;  // degenerate input contract
  }
  const auto r = even_integral({{&c1, 1}, {&c2, 1}, {&c3, 1}}, disp, T, opts);
  if (route) *route = r.route;
  const double vol = c1.torus().volume();
  return r.value / (vol * c1.l2_norm_sq() * c2.l2_norm_sq() * c3.l2_norm_sq());
}

}  // namespace est_detail

// Quantified trilinear bound on [0, N1^{-alpha}]: supports in dyadic shells
// [N_j, 2N_j) with N1 >= N2 >= N3 and N1 >= N3^{1+beta}. beta <= 0 derives
// the largest admissible value from N1, N3. The shell inclusion N1 >=
// N3^{1+beta} is evaluated inclusively (boundary ties pass).
inline EstimateReport trilinear_1d(const CoefficientVector& c1, const CoefficientVector& c2,
                                   const CoefficientVector& c3, double alpha, double beta = 0.0,
                                   const NormOptions& opts = {}) {
  if (c1.torus().d != 1) throw PreconditionError("trilinear_1d: 1d data required");
  const double N1 = est_detail::infer_dyadic_shell(c1, "trilinear_1d f1");
  const double N2 = est_detail::infer_dyadic_shell(c2, "trilinear_1d f2");
  const double N3 = est_detail::infer_dyadic_shell(c3, "trilinear_1d f3");
  if (!(N1 >= N2 && N2 >= N3))
    throw PreconditionError("trilinear_1d: need N1 >= N2 >= N3");
  if (beta <= 0.0) beta = est_detail::derive_beta(N1, N3);
  if (!(beta > 0.0 && beta <= 1.0)) throw PreconditionError("trilinear_1d: beta in (0,1]");
  if (N1 * (1.0 + 1e-9) < std::pow(N3, 1.0 + beta))
    throw PreconditionError("trilinear_1d: size constraint N1 >= N3^{1+beta} fails");
  const double T = std::pow(N1, -alpha);

  EstimateReport rep;
  rep.estimate_id = "trilinear_1d";
  rep.parameters = {{"N1", N1}, {"N2", N2}, {"N3", N3}, {"alpha", alpha}, {"beta", beta}, {"T", T}};
  rep.observed = est_detail::trilinear_observed(c1, c2, c3, Dispersion::schrodinger(), T, opts,
                                                &rep.route);
  rep.theory_bound_value =
      theory_bound("trilinear_1d", {{"N1", N1}, {"alpha", alpha}, {"beta", beta}}).value;
  return rep;
}

// Logarithmic refinement: requires the weak separation
// N3 <= N1 exp(-log N1 / log log N1).
inline EstimateReport trilinear_1d_log(const CoefficientVector& c1, const CoefficientVector& c2,
                                       const CoefficientVector& c3, double alpha,
                                       const NormOptions& opts = {}) {
  if (c1.torus().d != 1) throw PreconditionError("trilinear_1d_log: 1d data required");
  const double N1 = est_detail::infer_dyadic_shell(c1, "trilinear_1d_log f1");
  const double N2 = est_detail::infer_dyadic_shell(c2, "trilinear_1d_log f2");
  const double N3 = est_detail::infer_dyadic_shell(c3, "trilinear_1d_log f3");
  if (!(N1 >= N2 && N2 >= N3))
    throw PreconditionError("trilinear_1d_log: need N1 >= N2 >= N3");
  if (!(N1 > std::exp(1.0)))
    throw PreconditionError("trilinear_1d_log: N1 too small for log log N1");
  const double sep = N1 * std::exp(-std::log(N1) / std::log(std::log(N1)));
  if (!(N3 <= sep * (1.0 + 1e-9)))
    throw PreconditionError("trilinear_1d_log: weak separation N3 <= N1 exp(-log N1/log log N1) fails");
  const double T = std::pow(N1, -alpha);

  EstimateReport rep;
  rep.estimate_id = "trilinear_1d_log";
  rep.parameters = {{"N1", N1}, {"N2", N2}, {"N3", N3}, {"alpha", alpha}, {"T", T}};
  rep.observed = est_detail::trilinear_observed(c1, c2, c3, Dispersion::schrodinger(), T, opts,
                                                &rep.route);
  rep.theory_bound_value = theory_bound("trilinear_1d_log", {{"N1", N1}, {"alpha", alpha}}).value;
  return rep;
}

// ---------------------------------------------------------------------------
// transversality
// ---------------------------------------------------------------------------

// nu = (minimal triangle area over lattice triples) / N1^2, exact over the
// finite supports. Symmetric in the three supports; invariant under integer
// rescaling of supports and N1 together.
inline double transversality_nu(const std::vector<Freq>& s1, const std::vector<Freq>& s2,
                                const std::vector<Freq>& s3, double N1, const TorusSpec& torus) {
  if (s1.empty() || s2.empty() || s3.empty())
    throw PreconditionError("transversality_nu: empty support");
  const double triples = static_cast<double>(s1.size()) * static_cast<double>(s2.size()) *
                         static_cast<double>(s3.size());
  if (triples > 2e8) throw PreconditionError("transversality_nu: supports too large to enumerate");
  double min_area2 = -1.0;  // twice the area
  for (const Freq& a : s1) {
    const auto pa = physical(a, torus);
    for (const Freq& b : s2) {
      const auto pb = physical(b, torus);
      const double ux = pb[0] - pa[0], uy = pb[1] - pa[1];
      for (const Freq& c : s3) {
        const auto pc = physical(c, torus);
        const double vx = pc[0] - pa[0], vy = pc[1] - pa[1];
        const double cross = std::abs(ux * vy - uy * vx);
        if (min_area2 < 0.0 || cross < min_area2) min_area2 = cross;
      }
    }
  }
  return 0.5 * min_area2 / (N1 * N1);
}

inline double transversality_nu(const FrequencyRegion& r1, const FrequencyRegion& r2,
                                const FrequencyRegion& r3, double N1, const TorusSpec& torus) {
  return transversality_nu(r1.lattice_points(torus), r2.lattice_points(torus),
                           r3.lattice_points(torus), N1, torus);
}

// ---------------------------------------------------------------------------
// trilinear verifier (2d)
// ---------------------------------------------------------------------------

// int prod |f_i|^{4/3} over [0, N1^{-alpha}] x T^2_gamma, normalized so three
// unit single modes give exactly T. Preconditions: supports inside balls
// B(xi_i^*, N3), |xi_1^* - xi_2^*| >= N1/2, transversality nu > 0.
inline EstimateReport trilinear_2d(const CoefficientVector& c1, const CoefficientVector& c2,
                                   const CoefficientVector& c3, double alpha,
                                   const NormOptions& opts = {}) {
  const TorusSpec& torus = c1.torus();
  if (torus.d != 2) throw PreconditionError("trilinear_2d: 2d data required");
  est_detail::require_nonzero(c1, "trilinear_2d");
  est_detail::require_nonzero(c2, "trilinear_2d");
  est_detail::require_nonzero(c3, "trilinear_2d");

  const CoefficientVector* cs[3] = {&c1, &c2, &c3};
  std::array<std::array<double, 2>, 3> centers;
  double radius = 0.0;
  double max_mod = 0.0;
  std::vector<Freq> supports[3];
  for (int i = 0; i < 3; ++i) {
    double lo0 = 0, hi0 = 0, lo1 = 0, hi1 = 0;
    bool first = true;
    for (const auto& [k, a] : cs[i]->entries()) {
      const auto xi = physical(k, torus);
      if (first) {
        lo0 = hi0 = xi[0];
        lo1 = hi1 = xi[1];
        first = false;
      } else {
        lo0 = std::min(lo0, xi[0]);
        hi0 = std::max(hi0, xi[0]);
        lo1 = std::min(lo1, xi[1]);
        hi1 = std::max(hi1, xi[1]);
      }
      max_mod = std::max(max_mod, std::sqrt(xi[0] * xi[0] + xi[1] * xi[1]));
      supports[i].push_back(k);
    }
    centers[i] = {0.5 * (lo0 + hi0), 0.5 * (lo1 + hi1)};
    for (const auto& [k, a] : cs[i]->entries()) {
      const auto xi = physical(k, torus);
      const double dx = xi[0] - centers[i][0], dy = xi[1] - centers[i][1];
      radius = std::max(radius, std::sqrt(dx * dx + dy * dy));
    }
  }
  const double N1 = std::exp2(std::floor(std::log2(max_mod * (1.0 + 1e-12))));
  const double N3 = std::max(1.0, std::exp2(std::ceil(std::log2(std::max(radius, 1.0)))));
  const double sep = std::hypot(centers[0][0] - centers[1][0], centers[0][1] - centers[1][1]);
  if (!(sep * 2.0 >= N1 * (1.0 - 1e-9)))
    throw PreconditionError("trilinear_2d: centers of f1 and f2 not separated at scale N1");
  const double nu = transversality_nu(supports[0], supports[1], supports[2], N1, torus);
  if (!(nu > 0.0))
    throw PreconditionError("trilinear_2d: transversality degenerates (collinear supports)");
  const double beta = est_detail::derive_beta(N1, N3);
  const double T = std::pow(N1, -alpha);

  EstimateReport rep;
  rep.estimate_id = "trilinear_2d";
  rep.parameters = {{"N1", N1},       {"N3", N3},     {"alpha", alpha}, {"beta", beta},
                    {"nu", nu},       {"T", T},       {"gamma", torus.alphas[1]},
                    {"lambda", torus.lambda}};
  const IntegralResult raw = product_integral_quadrature(
      {{&c1, 4.0 / 3.0}, {&c2, 4.0 / 3.0}, {&c3, 4.0 / 3.0}}, Dispersion::schrodinger(), T, opts);
  const double vol = torus.volume();
  rep.observed = raw.value / (vol * std::pow(c1.l2_norm_sq() * c2.l2_norm_sq() * c3.l2_norm_sq(),
                                             2.0 / 3.0));
  rep.route = "quadrature";
  rep.theory_bound_value =
      theory_bound("trilinear_2d", {{"N1", N1}, {"alpha", alpha}, {"beta", beta}, {"nu", nu}})
          .value;
  return rep;
}

// ---------------------------------------------------------------------------
// rescaled-torus verifiers (unit time window)
// ---------------------------------------------------------------------------

inline EstimateReport rescaled_verify_bilinear_1d(const CoefficientVector& c1,
                                                  const CoefficientVector& c2,
                                                  const NormOptions& opts = {}) {
  const TorusSpec& torus = c1.torus();
  if (torus.d != 1) throw PreconditionError("rescaled_bilinear_1d: 1d data required");
  const double N1 = est_detail::infer_dyadic_shell(c1, "rescaled_bilinear_1d f1");
  const double N2 = est_detail::infer_dyadic_shell(c2, "rescaled_bilinear_1d f2");
  if (!(N1 > N2)) throw PreconditionError("rescaled_bilinear_1d: need N1 > N2");
  EstimateReport rep;
  rep.estimate_id = "rescaled_bilinear_1d";
  rep.parameters = {{"N1", N1}, {"N2", N2}, {"lambda", torus.lambda}, {"T", 1.0}};
  rep.observed = bilinear_short_ratio(c1, c2, Dispersion::schrodinger(), 1.0, false, opts,
                                      &rep.route);
  rep.theory_bound_value =
      theory_bound("rescaled_bilinear_1d", {{"N1", N1}, {"lambda", torus.lambda}}).value;
  return rep;
}

// int_0^1 |f1|^2 |f2|^4 / (vol * l2(f1)^2 l2(f2)^4); high factor quadratic,
// as in the rescaled statement.
inline EstimateReport rescaled_verify_trilinear_1d(const CoefficientVector& c1,
                                                   const CoefficientVector& c2, double beta = 0.0,
                                                   const NormOptions& opts = {}) {
  const TorusSpec& torus = c1.torus();
  if (torus.d != 1) throw PreconditionError("rescaled_trilinear_1d: 1d data required");
  const double N1 = est_detail::infer_dyadic_shell(c1, "rescaled_trilinear_1d f1");
  const double N2 = est_detail::infer_dyadic_shell(c2, "rescaled_trilinear_1d f2");
  if (!(N1 > N2)) throw PreconditionError("rescaled_trilinear_1d: need N1 >> N2");
  if (beta <= 0.0) beta = est_detail::derive_beta(N1, N2);
  if (N1 * (1.0 + 1e-9) < std::pow(N2, 1.0 + beta))
    throw PreconditionError("rescaled_trilinear_1d: size constraint N1 >= N2^{1+beta} fails");
  EstimateReport rep;
  rep.estimate_id = "rescaled_trilinear_1d";
  rep.parameters = {{"N1", N1}, {"N2", N2}, {"beta", beta}, {"lambda", torus.lambda}, {"T", 1.0}};
  const auto r =
      est_detail::even_integral({{&c1, 1}, {&c2, 2}}, Dispersion::schrodinger(), 1.0, opts);
  rep.route = r.route;
  const double vol = torus.volume();
  rep.observed =
      r.value / (vol * c1.l2_norm_sq() * c2.l2_norm_sq() * c2.l2_norm_sq());
  rep.theory_bound_value = theory_bound("rescaled_trilinear_1d",
                                        {{"N1", N1}, {"lambda", torus.lambda}, {"beta", beta}})
                               .value;
  return rep;
}

inline EstimateReport rescaled_verify_trilinear_2d(const CoefficientVector& c1,
                                                   const CoefficientVector& c2,
                                                   const CoefficientVector& c3,
                                                   const NormOptions& opts = {}) {
  const TorusSpec& torus = c1.torus();
  if (torus.d != 2) throw PreconditionError("rescaled_trilinear_2d: 2d data required");
  // same measurement as trilinear_2d but over the unit window on the
  // lambda-torus; alpha = 0 gives T = 1
  EstimateReport rep = trilinear_2d(c1, c2, c3, 0.0, opts);
  rep.estimate_id = "rescaled_trilinear_2d";
  const double N1 = rep.parameters.at("N1");
  const double beta = rep.parameters.at("beta");
  const double nu = rep.parameters.at("nu");
  rep.theory_bound_value =
      theory_bound("rescaled_trilinear_2d",
                   {{"N1", N1}, {"lambda", torus.lambda}, {"beta", beta}, {"nu", nu}})
          .value;
  return rep;
}

// ---------------------------------------------------------------------------
// square function gap
// ---------------------------------------------------------------------------

// LHS/RHS of the transverse square-function estimate: LHS the bilinear L^2
// integral, RHS the block-decomposed sum over pairs of length-block_len
// frequency blocks partitioning each support.
inline double square_function_gap(const CoefficientVector& c1, const CoefficientVector& c2,
                                  std::int64_t block_len, double T, const NormOptions& opts = {},
                                  std::string* route_out = nullptr) {
  est_detail::require_nonzero(c1, "square_function_gap");
  est_detail::require_nonzero(c2, "square_function_gap");
  if (c1.torus().d != 1) throw PreconditionError("square_function_gap: 1d data required");
  if (block_len < 1) throw PreconditionError("square_function_gap: block length >= 1 required");
  if (!(c1.max_k(0) < c2.min_k(0) || c2.max_k(0) < c1.min_k(0)))
    throw PreconditionError("square_function_gap: supports must be disjoint and separated");

  const Dispersion disp = Dispersion::schrodinger();
  const auto lhs = est_detail::even_integral({{&c1, 1}, {&c2, 1}}, disp, T, opts);

  auto blocks = [&](const CoefficientVector& c) {
    std::vector<CoefficientVector> out;
    const std::int64_t lo = c.min_k(0), hi = c.max_k(0);
    for (std::int64_t start = lo; start <= hi; start += block_len) {
      std::vector<CoefficientVector::Entry> kept;
      for (const auto& e : c.entries())
        if (e.first[0] >= start && e.first[0] < start + block_len) kept.push_back(e);
      if (!kept.empty()) out.emplace_back(c.torus(), std::move(kept));
    }
    return out;
  };
  const auto b1 = blocks(c1);
  const auto b2 = blocks(c2);
  Compensated rhs;
  for (const auto& t1 : b1)
    for (const auto& t2 : b2)
      rhs.add(est_detail::even_integral({{&t1, 1}, {&t2, 1}}, disp, T, opts).value);
  if (route_out) *route_out = lhs.route;
  if (rhs.value() <= 0.0) throw PreconditionError("square_function_gap: degenerate block sum");
  return lhs.value / rhs.value();
}

// ---------------------------------------------------------------------------
// smoothing sweeps
// ---------------------------------------------------------------------------

enum class SmoothingKind { schrodinger_low_p, airy };

// ||field||_{L^p([0,N^{-alpha}] x torus)} / ||f||_{L^2}; the bound shape is
// N^{-kappa} with kappa from the closed-form exponent.
inline EstimateReport smoothing_ratio(SmoothingKind kind, double N, double alpha, double p,
                                      const CoefficientVector& coeffs,
                                      const NormOptions& opts = {}) {
  const TorusSpec& torus = coeffs.torus();
  const int d = torus.d;
  Dispersion disp = Dispersion::schrodinger();
  if (kind == SmoothingKind::schrodinger_low_p) {
    if (!(p >= 2.0 && p < 2.0 * (d + 2.0) / d))
      throw PreconditionError("smoothing_ratio: p out of range (need 2 <= p < 2(d+2)/d)");
  } else {
    if (d != 1 || p != 6.0)
      throw PreconditionError("smoothing_ratio: airy smoothing needs d = 1, p = 6");
    disp = Dispersion::airy();
  }
  const double shell = est_detail::infer_dyadic_shell(coeffs, "smoothing_ratio");
  if (shell != N)
    throw PreconditionError("smoothing_ratio: support is not in the dyadic shell [N, 2N)");
  const double T = std::pow(N, -alpha);

  EstimateReport rep;
  rep.estimate_id = kind == SmoothingKind::airy ? "airy_smoothing" : "smoothing_low_p";
  rep.parameters = {{"N1", N}, {"alpha", alpha}, {"p", p}, {"T", T}, {"d", static_cast<double>(d)}};
  rep.observed = strichartz_ratio(coeffs, disp, T, p, opts, &rep.route);
  rep.theory_bound_value =
      theory_bound(rep.estimate_id,
                   {{"N1", N}, {"alpha", alpha}, {"p", p}, {"d", static_cast<double>(d)}})
          .value;
  return rep;
}

}  // namespace strichartz
