#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <unordered_set>
#include <vector>

#include "strichartz/coeffs.hpp"
#include "strichartz/torus.hpp"

namespace strichartz {

// Boundary comparisons on physical frequencies use a relative tolerance;
// ties are inclusive. Lattice points never sit exactly on generic region
// boundaries once the period factors are irrational.
inline constexpr double kRegionTol = 1e-12;

inline bool leq_tol(double a, double b) {
  return a <= b + kRegionTol * std::max({1.0, std::abs(a), std::abs(b)});
}

// Frequency-space membership test: dyadic annulus, ball, axis box, or an
// explicit lattice set. Annulus(N) keeps physical modulus in [N/2, 2N],
// matching the usual dyadic projection.
class FrequencyRegion {
 public:
  enum class Kind { annulus, ball, box, explicit_set };

  static FrequencyRegion annulus(double N) {
    if (!(N > 0)) throw std::invalid_argument("annulus: N must be positive");
    FrequencyRegion r;
    r.kind_ = Kind::annulus;
    r.radius_ = N;
    return r;
  }

  static FrequencyRegion ball(std::array<double, 2> center, double radius) {
    if (!(radius >= 0)) throw std::invalid_argument("ball: negative radius");
    FrequencyRegion r;
    r.kind_ = Kind::ball;
    r.center_ = center;
    r.radius_ = radius;
    return r;
  }

  // closed per-axis intervals [lo_i, hi_i] in physical frequency units
  static FrequencyRegion box(std::array<double, 2> lo, std::array<double, 2> hi) {
    FrequencyRegion r;
    r.kind_ = Kind::box;
    r.lo_ = lo;
    r.hi_ = hi;
    return r;
  }

  static FrequencyRegion interval(double lo, double hi) {
    return box({lo, 0.0}, {hi, 0.0});
  }

  static FrequencyRegion explicit_set(std::vector<Freq> points) {
    FrequencyRegion r;
    r.kind_ = Kind::explicit_set;
    r.points_ = std::unordered_set<Freq, FreqHash>(points.begin(), points.end());
    return r;
  }

  Kind kind() const { return kind_; }

  bool contains(const Freq& k, const TorusSpec& torus) const {
    switch (kind_) {
      case Kind::annulus: {
        const double m2 = physical_norm_sq(k, torus);
        const double lo = 0.5 * radius_, hi = 2.0 * radius_;
        return leq_tol(lo * lo, m2) && leq_tol(m2, hi * hi);
      }
      case Kind::ball: {
        const auto xi = physical(k, torus);
        double d2 = 0.0;
        for (int i = 0; i < torus.d; ++i) {
          const double dx = xi[i] - center_[i];
          d2 += dx * dx;
        }
        return leq_tol(d2, radius_ * radius_);
      }
      case Kind::box: {
        const auto xi = physical(k, torus);
        for (int i = 0; i < torus.d; ++i) {
          if (!(leq_tol(lo_[i], xi[i]) && leq_tol(xi[i], hi_[i]))) return false;
        }
        return true;
      }
      case Kind::explicit_set:
        return points_.count(k) > 0;
    }
    return false;
  }

  // All lattice points of the region (for exact minimization / generators).
  // Only meaningful for bounded kinds; explicit sets return their members.
  std::vector<Freq> lattice_points(const TorusSpec& torus) const {
    std::vector<Freq> out;
    if (kind_ == Kind::explicit_set) {
      out.assign(points_.begin(), points_.end());
      std::sort(out.begin(), out.end());
      return out;
    }
    std::array<std::int64_t, 2> lo{0, 0}, hi{0, 0};
    for (int i = 0; i < torus.d; ++i) {
      double plo, phi;
      if (kind_ == Kind::annulus) {
        plo = -2.0 * radius_;
        phi = 2.0 * radius_;
      } else if (kind_ == Kind::ball) {
        plo = center_[i] - radius_;
        phi = center_[i] + radius_;
      } else {
        plo = lo_[i];
        phi = hi_[i];
      }
      const double scale = torus.lambda * torus.alphas[i];
      lo[i] = static_cast<std::int64_t>(std::floor(plo * scale - 1.0));
      hi[i] = static_cast<std::int64_t>(std::ceil(phi * scale + 1.0));
    }
    if (torus.d == 1) {
      for (std::int64_t a = lo[0]; a <= hi[0]; ++a)
        if (contains(Freq(a), torus)) out.push_back(Freq(a));
    } else {
      for (std::int64_t a = lo[0]; a <= hi[0]; ++a)
        for (std::int64_t b = lo[1]; b <= hi[1]; ++b)
          if (contains(Freq(a, b), torus)) out.push_back(Freq(a, b));
    }
    return out;
  }

 private:
  Kind kind_ = Kind::box;
  std::array<double, 2> center_{0.0, 0.0};
  double radius_ = 0.0;
  std::array<double, 2> lo_{0.0, 0.0};
  std::array<double, 2> hi_{0.0, 0.0};
  std::unordered_set<Freq, FreqHash> points_;
};

// Restriction of the entries to the region; the empty result is the zero
// vector, not an error.
inline CoefficientVector project(const CoefficientVector& coeffs, const FrequencyRegion& region) {
  std::vector<CoefficientVector::Entry> kept;
  for (const auto& e : coeffs.entries())
    if (region.contains(e.first, coeffs.torus())) kept.push_back(e);
  return CoefficientVector(coeffs.torus(), std::move(kept));
}

}  // namespace strichartz
