#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace strichartz {

// Kahan-compensated accumulator; reductions run in fixed index order so
// results do not depend on the worker schedule.
class Compensated {
 public:
  void add(double x) {
    const double y = x - c_;
    const double t = s_ + y;
    c_ = (t - s_) - y;
    s_ = t;
  }
  double value() const { return s_; }

 private:
  double s_ = 0.0;
  double c_ = 0.0;
};

// 7-point Gauss / 15-point Kronrod pair on [-1, 1] (the embedded Gauss rule
// reuses the odd Kronrod nodes, so the error signal costs no extra samples).
// Constants are checked against analytic integrals in the test suite.
namespace gk15 {
inline constexpr double xgk[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};
inline constexpr double wgk[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};
inline constexpr double wg[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};
}  // namespace gk15

// Time quadrature over [0, T]. Two rules:
//  - uniform_periodic: the rectangle rule, exact for trigonometric
//    polynomials of integer frequency < M over a full 2*pi period; the
//    embedded coarse rule keeps every other node.
//  - composite Gauss-Kronrod panels for generic windows; the embedded
//    7-point Gauss weights give the error signal for free.
struct TimeRule {
  enum class Kind { uniform_periodic, gauss_kronrod };

  Kind kind = Kind::gauss_kronrod;
  double T = 1.0;
  std::vector<double> nodes;
  std::vector<double> weights;
  std::vector<double> coarse_weights;  // 0 where the coarse rule skips a node
  std::size_t panels = 1;              // gk panels, or M for uniform

  static TimeRule uniform_periodic(double T, std::size_t M) {
    if (M < 1) throw std::invalid_argument("time rule: M >= 1 required");
    TimeRule r;
    r.kind = Kind::uniform_periodic;
    r.T = T;
    r.panels = M;
    r.nodes.resize(M);
    r.weights.assign(M, T / static_cast<double>(M));
    r.coarse_weights.assign(M, 0.0);
    for (std::size_t j = 0; j < M; ++j)
      r.nodes[j] = T * static_cast<double>(j) / static_cast<double>(M);
    if (M % 2 == 0 && M >= 2) {
      for (std::size_t j = 0; j < M; j += 2) r.coarse_weights[j] = 2.0 * T / static_cast<double>(M);
    }
    return r;
  }

  static TimeRule gauss_kronrod(double T, std::size_t P) {
    if (P < 1) throw std::invalid_argument("time rule: panels >= 1 required");
    TimeRule r;
    r.kind = Kind::gauss_kronrod;
    r.T = T;
    r.panels = P;
    r.nodes.reserve(15 * P);
    r.weights.reserve(15 * P);
    r.coarse_weights.reserve(15 * P);
    const double h = T / static_cast<double>(P);
    for (std::size_t p = 0; p < P; ++p) {
      const double mid = (static_cast<double>(p) + 0.5) * h;
      for (int i = 0; i < 15; ++i) {
        // nodes ordered across the panel: i=0..14 maps to -xgk[0]..+xgk[0]
        const int a = i < 8 ? i : 14 - i;
        const double x = (i < 8 ? -1.0 : 1.0) * (i == 7 ? 0.0 : gk15::xgk[a]);
        r.nodes.push_back(mid + 0.5 * h * x);
        r.weights.push_back(0.5 * h * gk15::wgk[a]);
        const bool gauss_node = (a % 2 == 1) || a == 7;
        r.coarse_weights.push_back(gauss_node && a != 7 ? 0.5 * h * gk15::wg[a / 2]
                                   : a == 7             ? 0.5 * h * gk15::wg[3]
                                                        : 0.0);
      }
    }
    return r;
  }

  std::size_t size() const { return nodes.size(); }
  bool has_coarse() const {
    for (double w : coarse_weights)
      if (w != 0.0) return true;
    return false;
  }
};

}  // namespace strichartz
