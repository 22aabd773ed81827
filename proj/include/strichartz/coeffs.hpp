#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "strichartz/torus.hpp"

namespace strichartz {

// Sparse frequency-space data: a finite map lattice point -> complex
// amplitude. Entries are kept sorted lexicographically; the bounding box and
// l2 norm are fixed at construction (instances are immutable).
class CoefficientVector {
 public:
  using Entry = std::pair<Freq, std::complex<double>>;

  CoefficientVector() = default;

  CoefficientVector(TorusSpec torus, std::vector<std::pair<Freq, std::complex<double>>> entries)
      : torus_(torus), entries_(std::move(entries)) {
    torus_.validate();
    std::sort(entries_.begin(), entries_.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    for (std::size_t i = 0; i + 1 < entries_.size(); ++i) {
      if (entries_[i].first == entries_[i + 1].first)
        throw std::invalid_argument("coefficients: duplicate lattice frequency");
    }
    double l2sq = 0.0;
    for (const auto& [k, c] : entries_) {
      if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
        throw std::invalid_argument("coefficients: non-finite amplitude");
      l2sq += std::norm(c);
      for (int i = 0; i < torus_.d; ++i) {
        lo_[i] = std::min(lo_[i], k[i]);
        hi_[i] = std::max(hi_[i], k[i]);
      }
    }
    if (entries_.empty()) {
      lo_ = {0, 0};
      hi_ = {0, 0};
    }
    l2sq_ = l2sq;
  }

  const TorusSpec& torus() const { return torus_; }
  const std::vector<std::pair<Freq, std::complex<double>>>& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }
  std::size_t size() const { return entries_.size(); }

  // l2 norm of the coefficient sequence, sqrt(sum |c_k|^2)
  double l2_norm() const { return std::sqrt(l2sq_); }
  double l2_norm_sq() const { return l2sq_; }

  // L2(torus) norm of the synthesized function, sqrt(vol * sum |c_k|^2)
  double function_l2_norm() const { return std::sqrt(torus_.volume() * l2sq_); }

  std::int64_t min_k(int axis) const { return lo_[axis]; }
  std::int64_t max_k(int axis) const { return hi_[axis]; }
  // lattice extent per axis, max_k - min_k (0 for a single mode)
  std::int64_t spread(int axis) const { return empty() ? 0 : hi_[axis] - lo_[axis]; }

  CoefficientVector scaled(std::complex<double> s) const {
    auto e = entries_;
    for (auto& [k, c] : e) c *= s;
    return CoefficientVector(torus_, std::move(e));
  }

  CoefficientVector normalized() const {
    const double n = l2_norm();
    if (n == 0.0) throw std::invalid_argument("cannot normalize zero data");
    return scaled(1.0 / n);
  }

 private:
  TorusSpec torus_;
  std::vector<std::pair<Freq, std::complex<double>>> entries_;
  std::array<std::int64_t, 2> lo_{INT64_MAX, INT64_MAX};
  std::array<std::int64_t, 2> hi_{INT64_MIN, INT64_MIN};
  double l2sq_ = 0.0;
};

inline nlohmann::json torus_to_json(const TorusSpec& t) {
  nlohmann::json j;
  j["d"] = t.d;
  j["alphas"] = std::vector<double>(t.alphas.begin(), t.alphas.begin() + t.d);
  j["lambda"] = t.lambda;
  return j;
}

inline TorusSpec torus_from_json(const nlohmann::json& j) {
  const int d = j.at("d").get<int>();
  const auto alphas = j.at("alphas").get<std::vector<double>>();
  TorusSpec t(d, j.at("lambda").get<double>(), d == 2 ? alphas.at(1) : 1.0);
  return t;
}

// Wire format: {"torus": {...}, "entries": [[k..., re, im], ...]},
// entries ordered lexicographically by lattice point.
inline nlohmann::json coeffs_to_json(const CoefficientVector& c) {
  nlohmann::json j;
  j["torus"] = torus_to_json(c.torus());
  auto arr = nlohmann::json::array();
  for (const auto& [k, a] : c.entries()) {
    nlohmann::json e = nlohmann::json::array();
    for (int i = 0; i < c.torus().d; ++i) e.push_back(k[i]);
    e.push_back(a.real());
    e.push_back(a.imag());
    arr.push_back(std::move(e));
  }
  j["entries"] = std::move(arr);
  return j;
}

inline CoefficientVector coeffs_from_json(const nlohmann::json& j) {
  const TorusSpec torus = torus_from_json(j.at("torus"));
  std::vector<std::pair<Freq, std::complex<double>>> entries;
  for (const auto& e : j.at("entries")) {
    if (static_cast<int>(e.size()) != torus.d + 2)
      throw std::invalid_argument("coefficient entry arity mismatch");
    Freq k;
    for (int i = 0; i < torus.d; ++i) k[i] = e.at(i).get<std::int64_t>();
    entries.emplace_back(k, std::complex<double>(e.at(torus.d).get<double>(),
                                                 e.at(torus.d + 1).get<double>()));
  }
  return CoefficientVector(torus, std::move(entries));
}

}  // namespace strichartz
