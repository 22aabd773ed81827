#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

namespace strichartz {

// Number of scale-squaring steps needed to pass from block scale
// N^{-beta/(1+beta)} to N^{-1}: the least n with (beta/(1+beta)) 2^n >= 1,
// i.e. ceil(log2(1/beta + 1)). Evaluated in integer arithmetic after
// recovering beta as a small rational, so dyadic and small-denominator
// inputs are exact.
inline int iteration_count(double beta) {
  if (!(beta > 0.0 && beta <= 1.0)) throw std::invalid_argument("iteration_count: beta in (0,1]");
  // continued-fraction recovery of a small rational p/q ~= beta
  std::int64_t p = 1, q = 1;
  {
    double x = beta;
    std::int64_t h0 = 0, h1 = 1, k0 = 1, k1 = 0;
    for (int it = 0; it < 64; ++it) {
      const double fa = std::floor(x);
      const std::int64_t a = static_cast<std::int64_t>(fa);
      const std::int64_t h2 = a * h1 + h0;
      const std::int64_t k2 = a * k1 + k0;
      if (k2 > (std::int64_t{1} << 31)) break;
      h0 = h1;
      h1 = h2;
      k0 = k1;
      k1 = k2;
      const double approx = static_cast<double>(h1) / static_cast<double>(k1);
      if (std::abs(approx - beta) <= 4e-16 * std::max(1.0, std::abs(beta))) break;
      const double frac = x - fa;
      if (frac < 1e-15) break;
      x = 1.0 / frac;
    }
    p = h1;
    q = k1;
  }
  // minimality: smallest n with p * 2^n >= p + q
  for (int n = 0; n <= 62; ++n) {
    if (p * (std::int64_t{1} << n) >= p + q) return n;
  }
  throw std::logic_error("iteration_count: overflow");
}

// One multiplicative factor of a closed-form bound.
struct BoundFactor {
  std::string factor;  // display name, e.g. "log(N1)"
  double base;         // numeric base
  double exponent;
};

// A bound evaluated with every absolute constant normalized to 1; the value
// is exactly the product of the breakdown factors. log means natural log.
struct BoundReport {
  std::string estimate_id;
  std::map<std::string, double> inputs;
  double value = 1.0;
  std::vector<BoundFactor> breakdown;

  void push(const std::string& name, double base, double exponent) {
    breakdown.push_back({name, base, exponent});
    value *= std::pow(base, exponent);
  }
};

namespace theory_detail {

inline double need(const std::map<std::string, double>& in, const std::string& key) {
  auto it = in.find(key);
  if (it == in.end()) throw std::invalid_argument("theory: missing input '" + key + "'");
  return it->second;
}

inline double get_or(const std::map<std::string, double>& in, const std::string& key, double dflt) {
  auto it = in.find(key);
  return it == in.end() ? dflt : it->second;
}

}  // namespace theory_detail

// Rescaled-torus linear constant: 1 once lambda >= N, the unit-torus loss
// otherwise.
inline void push_rescaled_linear(BoundReport& r, int d, double lambda, double N, double eps) {
  if (lambda >= N) return;  // L_d = 1
  if (d == 1)
    r.push("log(N1)", std::log(N), 2.0 + eps);
  else
    r.push("N1", N, eps);
}

inline BoundReport theory_bound(const std::string& estimate_id,
                                const std::map<std::string, double>& in) {
  using theory_detail::get_or;
  using theory_detail::need;
  BoundReport r;
  r.estimate_id = estimate_id;
  r.inputs = in;
  const double eps = get_or(in, "eps", 0.0);
  if (eps < 0) throw std::invalid_argument("theory: eps >= 0 required");

  if (estimate_id == "linear_lp") {
    // L^6 growth on the unit torus
    const double N = need(in, "N1");
    r.push("log(N1)", std::log(N), 2.0 + eps);
  } else if (estimate_id == "bilinear_short") {
    const double N1 = need(in, "N1");
    r.push("N1", N1, -0.5);
  } else if (estimate_id == "trilinear_1d") {
    const double N1 = need(in, "N1");
    const double alpha = need(in, "alpha");
    const double beta = need(in, "beta");
    r.push("log(N1)", std::log(N1), 12.0 + eps);
    r.push("N1", N1, -alpha * beta / 8.0);
  } else if (estimate_id == "trilinear_1d_log") {
    const double N1 = need(in, "N1");
    const double alpha = need(in, "alpha");
    r.push("log(N1)", std::log(N1), 20.0);
    r.push("N1", N1, -alpha / (40.0 * std::log(std::log(N1))));
  } else if (estimate_id == "trilinear_2d") {
    const double N1 = need(in, "N1");
    const double alpha = need(in, "alpha");
    const double beta = need(in, "beta");
    const double nu = need(in, "nu");
    if (!(nu > 0)) throw std::invalid_argument("theory: nu > 0 required");
    r.push("nu", nu, -1.0 + beta / (2.0 * (1.0 + beta)));
    r.push("N1", N1, -alpha * beta / 12.0 + eps);
  } else if (estimate_id == "rescaled_bilinear_1d") {
    const double N1 = need(in, "N1");
    const double lambda = need(in, "lambda");
    if (N1 <= 1.0)
      r.push("B1(lambda,N1)", 1.0, 1.0);
    else
      r.push("B1(lambda,N1)", 1.0 / N1 + 1.0 / lambda, 0.5);
  } else if (estimate_id == "rescaled_trilinear_1d") {
    const double N1 = need(in, "N1");
    const double lambda = need(in, "lambda");
    const double beta = need(in, "beta");
    const double b1 = N1 <= 1.0 ? 1.0 : std::sqrt(1.0 / N1 + 1.0 / lambda);
    r.push("B1(lambda,N1)", b1, beta / (1.0 + beta));
    push_rescaled_linear(r, 1, lambda, N1, eps);
  } else if (estimate_id == "rescaled_trilinear_2d") {
    const double N1 = need(in, "N1");
    const double lambda = need(in, "lambda");
    const double beta = need(in, "beta");
    const double nu = need(in, "nu");
    if (!(nu > 0)) throw std::invalid_argument("theory: nu > 0 required");
    r.push("nu", nu, -1.0 + beta / (2.0 * (1.0 + beta)));
    r.push("B2(lambda,N1,1)", std::sqrt(1.0 / lambda + 1.0 / N1), 2.0 * beta / (3.0 * (1.0 + beta)));
    if (eps > 0) r.push("N1", N1, eps);
  } else if (estimate_id == "smoothing_low_p") {
    const double N = need(in, "N1");
    const double alpha = need(in, "alpha");
    const double p = need(in, "p");
    const double d = get_or(in, "d", 1.0);
    if (!(p >= 2.0 && p < 2.0 * (d + 2.0) / d))
      throw std::invalid_argument("theory: p out of range for smoothing_low_p");
    // decay exponent from the Bernstein exit: kappa0 = alpha (1/p - d/2 (1/2 - 1/p))
    const double kappa = alpha * (1.0 / p - 0.5 * d * (0.5 - 1.0 / p));
    r.push("N1", N, -kappa);
  } else if (estimate_id == "airy_smoothing") {
    const double N = need(in, "N1");
    const double alpha = need(in, "alpha");
    if (!(alpha > 0.0 && alpha <= 2.0))
      throw std::invalid_argument("theory: airy smoothing needs alpha in (0,2]");
    const double kappa0 = alpha <= 1.0 ? alpha / 6.0 : 1.0 / 6.0;
    r.push("N1", N, -kappa0);
  } else if (estimate_id == "square_function_gap") {
    r.push("C", 1.0, 1.0);  // some uniform constant; normalized
  } else {
    throw std::invalid_argument("theory: unknown estimate id '" + estimate_id + "'");
  }
  return r;
}

inline nlohmann::json bound_to_json(const BoundReport& r) {
  nlohmann::json j;
  j["estimate_id"] = r.estimate_id;
  j["inputs"] = r.inputs;
  j["value"] = r.value;
  auto arr = nlohmann::json::array();
  for (const auto& f : r.breakdown)
    arr.push_back({{"factor", f.factor}, {"base", f.base}, {"exponent", f.exponent}});
  j["exponent_breakdown"] = std::move(arr);
  j["normalized_constants"] = true;
  return j;
}

}  // namespace strichartz
