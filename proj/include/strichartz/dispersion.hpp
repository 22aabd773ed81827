#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

#include "strichartz/torus.hpp"

namespace strichartz {

// Phase symbol of the propagator. A field evolves as
//   u(x, t) = sum_k c_k exp(i(xi(k).x - t*omega(k))),
// so schrodinger reproduces exp(i(k.x - t|k|^2)) and airy (omega = -k^3)
// reproduces exp(i(kx + t k^3)). The KdV-shifted symbol is stored with the
// same orientation as airy so that the frequency-translation contract in
// kdv_galilean_reduce holds pointwise for complex data.
struct Dispersion {
  enum class Kind { schrodinger, airy, fractional, kdv_galilean };

  Kind kind = Kind::schrodinger;
  double a = 2.0;          // fractional exponent, a > 2
  std::int64_t shift = 0;  // KdV-Galilean parameter A

  static Dispersion schrodinger() { return {Kind::schrodinger, 2.0, 0}; }
  static Dispersion airy() { return {Kind::airy, 3.0, 0}; }
  static Dispersion fractional(double exponent) {
    if (!(exponent > 2.0)) throw std::invalid_argument("fractional dispersion needs a > 2");
    return {Kind::fractional, exponent, 0};
  }
  static Dispersion kdv_galilean(std::int64_t A) { return {Kind::kdv_galilean, 3.0, A}; }

  double omega(const Freq& f, const TorusSpec& torus) const {
    switch (kind) {
      case Kind::schrodinger:
        return physical_norm_sq(f, torus);
      case Kind::airy: {
        if (torus.d != 1) throw std::invalid_argument("airy dispersion is 1d only");
        const double k = physical(f, torus)[0];
        return -k * k * k;
      }
      case Kind::fractional:
        return std::pow(physical_norm_sq(f, torus), 0.5 * a);
      case Kind::kdv_galilean: {
        if (torus.d != 1) throw std::invalid_argument("kdv dispersion is 1d only");
        const double l = physical(f, torus)[0];
        return -(3.0 * static_cast<double>(shift) * l * l + l * l * l);
      }
    }
    return 0.0;
  }

  // True when omega takes integer values on the unit rational lattice, so
  // all phase differences share the common time period 2*pi.
  bool integer_symbol(const TorusSpec& torus) const {
    if (!torus.is_unit_rational()) return false;
    return kind != Kind::fractional;
  }

  std::int64_t omega_int(const Freq& f) const {
    switch (kind) {
      case Kind::schrodinger:
        return f[0] * f[0] + f[1] * f[1];
      case Kind::airy:
        return -f[0] * f[0] * f[0];
      case Kind::kdv_galilean:
        return -(3 * shift * f[0] * f[0] + f[0] * f[0] * f[0]);
      case Kind::fractional:
        throw std::logic_error("fractional symbol is not integer-valued");
    }
    return 0;
  }

  std::string name() const {
    switch (kind) {
      case Kind::schrodinger: return "schrodinger";
      case Kind::airy: return "airy";
      case Kind::fractional: return "fractional(" + std::to_string(a) + ")";
      case Kind::kdv_galilean: return "kdv_galilean(" + std::to_string(shift) + ")";
    }
    return "?";
  }
};

}  // namespace strichartz
