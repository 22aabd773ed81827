#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "strichartz/coeffs.hpp"
#include "strichartz/dispersion.hpp"
#include "strichartz/parallel.hpp"
#include "strichartz/quadrature.hpp"

namespace strichartz {

// Thrown when an exact enumeration would exceed its cost guard; callers fall
// back to quadrature.
struct CostGuardError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// One factor |f|^{2m} of an even-power integrand.
struct ExactFactor {
  const CoefficientVector* coeffs;
  int m;
};

namespace detail {

// Dense per-slot view over a 1d support: amplitude and integer symbol by
// lattice offset.
struct DenseSlot1d {
  std::int64_t lo = 0, hi = -1;
  std::vector<cplx> amp;
  std::vector<std::int64_t> omega;
  std::vector<char> present;
};

inline DenseSlot1d dense_slot(const CoefficientVector& c, const Dispersion& disp) {
  DenseSlot1d s;
  if (c.empty()) return s;
  s.lo = c.min_k(0);
  s.hi = c.max_k(0);
  const std::size_t n = static_cast<std::size_t>(s.hi - s.lo + 1);
  s.amp.assign(n, cplx{0.0, 0.0});
  s.omega.assign(n, 0);
  s.present.assign(n, 0);
  for (const auto& [k, a] : c.entries()) {
    const std::size_t i = static_cast<std::size_t>(k[0] - s.lo);
    s.amp[i] = a;
    s.omega[i] = disp.omega_int(k);
    s.present[i] = 1;
  }
  return s;
}

// Accumulator keyed by integer phase sum, reusable across momentum classes.
class PhaseAccumulator {
 public:
  explicit PhaseAccumulator(std::int64_t omega_lo, std::int64_t omega_hi) {
    const std::int64_t range = omega_hi - omega_lo + 1;
    flat_ = range > 0 && range <= (std::int64_t{1} << 22);
    if (flat_) {
      lo_ = omega_lo;
      acc_.assign(static_cast<std::size_t>(range), cplx{0.0, 0.0});
      stamp_.assign(static_cast<std::size_t>(range), 0);
    }
  }

  void begin_class() {
    ++gen_;
    touched_.clear();
    if (!flat_) map_.clear();
  }

  void add(std::int64_t omega, cplx v) {
    if (flat_) {
      const std::size_t i = static_cast<std::size_t>(omega - lo_);
      if (stamp_[i] != gen_) {
        stamp_[i] = gen_;
        acc_[i] = v;
        touched_.push_back(i);
      } else {
        acc_[i] += v;
      }
    } else {
      map_[omega] += v;
    }
  }

  // sum of |A|^2 over the classes accumulated since begin_class()
  double flush() {
    double s = 0.0;
    if (flat_) {
      for (std::size_t i : touched_) s += std::norm(acc_[i]);
    } else {
      for (const auto& [o, a] : map_) s += std::norm(a);
    }
    return s;
  }

 private:
  bool flat_ = false;
  std::int64_t lo_ = 0;
  std::uint32_t gen_ = 0;
  std::vector<cplx> acc_;
  std::vector<std::uint32_t> stamp_;
  std::vector<std::size_t> touched_;
  std::unordered_map<std::int64_t, cplx> map_;
};

struct Key2d {
  std::int64_t s0, s1, omega;
  bool operator==(const Key2d& o) const { return s0 == o.s0 && s1 == o.s1 && omega == o.omega; }
};
struct Key2dHash {
  std::size_t operator()(const Key2d& k) const {
    std::uint64_t h = static_cast<std::uint64_t>(k.s0) * 0x9e3779b97f4a7c15ULL;
    h ^= static_cast<std::uint64_t>(k.s1) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    h ^= static_cast<std::uint64_t>(k.omega) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return static_cast<std::size_t>(h);
  }
};

}  // namespace detail

// Exact full-period space-time integral of |f1|^{2 m1} |f2|^{2 m2} with
// m1 + m2 = m <= 3, integer frequencies and integer phase symbol: the value
// is vol_x * 2 pi * sum over momentum/phase classes of |sum of coefficient
// products|^2, obtained by meet-in-the-middle accumulation on
// (momentum sum, phase sum).
inline double exact_even_power_integral(const CoefficientVector& c1,
                                        const CoefficientVector* c2, const Dispersion& disp,
                                        int m, int m1, int m2) {
  if (m1 + m2 != m || m1 < 0 || m2 < 0) throw std::invalid_argument("oracle: bad powers");
  if (m < 1 || m > 3) throw std::invalid_argument("oracle: m must be in {1,2,3} (cost guard)");
  if (m2 > 0 && c2 == nullptr) throw std::invalid_argument("oracle: second factor missing");
  const TorusSpec& torus = c1.torus();
  if (!torus.is_unit_rational())
    throw std::invalid_argument("oracle: integer frequencies required (lambda = 1, alpha = 1)");
  if (!disp.integer_symbol(torus))
    throw std::invalid_argument("oracle: phase symbol must be integer-valued on the lattice");
  if (c2 && !(c2->torus() == torus)) throw std::invalid_argument("oracle: torus mismatch");

  // slot sets, one per tuple position
  std::vector<const CoefficientVector*> slots;
  for (int i = 0; i < m1; ++i) slots.push_back(&c1);
  for (int i = 0; i < m2; ++i) slots.push_back(c2);
  double tuples = 1.0;
  for (const auto* s : slots) tuples *= static_cast<double>(s->size());
  if (tuples > 4e9) throw CostGuardError("oracle: tuple enumeration too large");
  for (const auto* s : slots)
    if (s->empty()) return 0.0;

  const double prefactor = torus.volume() * kTwoPi;
  double class_sum = 0.0;

  if (torus.d == 1) {
    std::vector<detail::DenseSlot1d> ds;
    for (const auto* s : slots) ds.push_back(detail::dense_slot(*s, disp));
    std::int64_t olo = 0, ohi = 0;
    for (const auto& s : ds) {
      const auto [mn, mx] = std::minmax_element(s.omega.begin(), s.omega.end());
      olo += *mn;
      ohi += *mx;
    }
    detail::PhaseAccumulator acc(olo, ohi);
    std::int64_t slo = 0, shi = 0;
    for (const auto& s : ds) {
      slo += s.lo;
      shi += s.hi;
    }
    for (std::int64_t s = slo; s <= shi; ++s) {
      acc.begin_class();
      if (m == 1) {
        const auto& d0 = ds[0];
        if (s >= d0.lo && s <= d0.hi && d0.present[static_cast<std::size_t>(s - d0.lo)]) {
          const std::size_t i = static_cast<std::size_t>(s - d0.lo);
          acc.add(d0.omega[i], d0.amp[i]);
        }
      } else if (m == 2) {
        const auto& d0 = ds[0];
        const auto& d1 = ds[1];
        const std::int64_t k0lo = std::max(d0.lo, s - d1.hi);
        const std::int64_t k0hi = std::min(d0.hi, s - d1.lo);
        for (std::int64_t k0 = k0lo; k0 <= k0hi; ++k0) {
          const std::size_t i0 = static_cast<std::size_t>(k0 - d0.lo);
          if (!d0.present[i0]) continue;
          const std::size_t i1 = static_cast<std::size_t>(s - k0 - d1.lo);
          if (!d1.present[i1]) continue;
          acc.add(d0.omega[i0] + d1.omega[i1], d0.amp[i0] * d1.amp[i1]);
        }
      } else {
        const auto& d0 = ds[0];
        const auto& d1 = ds[1];
        const auto& d2 = ds[2];
        const std::int64_t k0lo = std::max(d0.lo, s - d1.hi - d2.hi);
        const std::int64_t k0hi = std::min(d0.hi, s - d1.lo - d2.lo);
        for (std::int64_t k0 = k0lo; k0 <= k0hi; ++k0) {
          const std::size_t i0 = static_cast<std::size_t>(k0 - d0.lo);
          if (!d0.present[i0]) continue;
          const std::int64_t r = s - k0;
          const std::int64_t k1lo = std::max(d1.lo, r - d2.hi);
          const std::int64_t k1hi = std::min(d1.hi, r - d2.lo);
          const cplx a0 = d0.amp[i0];
          const std::int64_t w0 = d0.omega[i0];
          for (std::int64_t k1 = k1lo; k1 <= k1hi; ++k1) {
            const std::size_t i1 = static_cast<std::size_t>(k1 - d1.lo);
            if (!d1.present[i1]) continue;
            const std::size_t i2 = static_cast<std::size_t>(r - k1 - d2.lo);
            if (!d2.present[i2]) continue;
            acc.add(w0 + d1.omega[i1] + d2.omega[i2], a0 * d1.amp[i1] * d2.amp[i2]);
          }
        }
      }
      class_sum += acc.flush();
    }
  } else {
    std::unordered_map<detail::Key2d, cplx, detail::Key2dHash> acc;
    acc.reserve(static_cast<std::size_t>(std::min(tuples, 1e7)));
    auto add_tuple = [&](const Freq& sum, std::int64_t omega, cplx v) {
      acc[detail::Key2d{sum[0], sum[1], omega}] += v;
    };
    const auto& e0 = slots[0]->entries();
    if (m == 1) {
      for (const auto& [k, a] : e0) add_tuple(k, disp.omega_int(k), a);
    } else if (m == 2) {
      for (const auto& [ka, aa] : e0)
        for (const auto& [kb, ab] : slots[1]->entries())
          add_tuple(ka + kb, disp.omega_int(ka) + disp.omega_int(kb), aa * ab);
    } else {
      for (const auto& [ka, aa] : e0)
        for (const auto& [kb, ab] : slots[1]->entries()) {
          const Freq kab = ka + kb;
          const std::int64_t wab = disp.omega_int(ka) + disp.omega_int(kb);
          const cplx vab = aa * ab;
          for (const auto& [kc, ac] : slots[2]->entries())
            add_tuple(kab + kc, wab + disp.omega_int(kc), vab * ac);
        }
    }
    for (const auto& [key, a] : acc) class_sum += std::norm(a);
  }
  return prefactor * class_sum;
}

inline double exact_even_power_integral(const CoefficientVector& c1, const Dispersion& disp,
                                        int m) {
  return exact_even_power_integral(c1, nullptr, disp, m, m, 0);
}

namespace detail {

inline cplx window_integral(double T, double delta) {
  // int_0^T e^{-i t delta} dt
  const double x = delta * T;
  if (std::abs(x) < 1e-8) {
    return {T * (1.0 - x * x / 6.0), -T * x * 0.5};
  }
  return {std::sin(x) / delta, -(1.0 - std::cos(x)) / delta};
}

struct ClassTerms {
  std::vector<double> omega;
  std::vector<cplx> amp;
};

}  // namespace detail

// Exact finite-window integral int_0^T int |f1|^{2m1} ... dx dt for any torus
// and symbol: spatial orthogonality collapses the integral onto momentum
// classes, and the remaining time integrals have the closed form
// int_0^T e^{-i t (w - w')} dt. Cost grows with the squared class sizes, so a
// guard rejects large inputs.
inline double exact_product_window_integral(const std::vector<ExactFactor>& factors,
                                            const Dispersion& disp, double T,
                                            double pair_cost_guard = 4e9) {
  if (factors.empty()) throw std::invalid_argument("window integral: no factors");
  int m = 0;
  for (const auto& f : factors) m += f.m;
  if (m < 1 || m > 3) throw std::invalid_argument("window integral: total power must be <= 3");
  const TorusSpec& torus = factors[0].coeffs->torus();
  for (const auto& f : factors) {
    if (!(f.coeffs->torus() == torus))
      throw std::invalid_argument("window integral: torus mismatch");
    if (f.coeffs->empty()) return 0.0;
  }

  std::vector<const CoefficientVector*> slots;
  for (const auto& f : factors)
    for (int i = 0; i < f.m; ++i) slots.push_back(f.coeffs);
  double tuples = 1.0;
  for (const auto* s : slots) tuples *= static_cast<double>(s->size());
  if (tuples > 2e7) throw CostGuardError("window integral: tuple enumeration too large");

  struct SKeyHash {
    std::size_t operator()(const std::int64_t& k) const {
      return std::hash<std::int64_t>()(static_cast<std::int64_t>(k * 0x9e3779b97f4a7c15ULL));
    }
  };
  auto pack = [&](const Freq& s) {
    if (torus.d == 1) return s[0];
    return (s[0] << 32) ^ (s[1] & 0xffffffffLL);
  };
  std::unordered_map<std::int64_t, detail::ClassTerms, SKeyHash> classes;
  classes.reserve(static_cast<std::size_t>(std::min(tuples, 4e6)));

  auto emit = [&](const Freq& s, double w, cplx a) {
    auto& cl = classes[pack(s)];
    cl.omega.push_back(w);
    cl.amp.push_back(a);
  };
  const auto& e0 = slots[0]->entries();
  std::vector<double> w0(e0.size());
  for (std::size_t i = 0; i < e0.size(); ++i) w0[i] = disp.omega(e0[i].first, torus);
  if (m == 1) {
    for (std::size_t i = 0; i < e0.size(); ++i) emit(e0[i].first, w0[i], e0[i].second);
  } else if (m == 2) {
    const auto& e1 = slots[1]->entries();
    for (std::size_t i = 0; i < e0.size(); ++i)
      for (const auto& [kb, ab] : e1)
        emit(e0[i].first + kb, w0[i] + disp.omega(kb, torus), e0[i].second * ab);
  } else {
    const auto& e1 = slots[1]->entries();
    const auto& e2 = slots[2]->entries();
    std::vector<double> w2(e2.size());
    for (std::size_t i = 0; i < e2.size(); ++i) w2[i] = disp.omega(e2[i].first, torus);
    for (std::size_t i = 0; i < e0.size(); ++i)
      for (const auto& [kb, ab] : e1) {
        const Freq kab = e0[i].first + kb;
        const double wab = w0[i] + disp.omega(kb, torus);
        const cplx vab = e0[i].second * ab;
        for (std::size_t j = 0; j < e2.size(); ++j)
          emit(kab + e2[j].first, wab + w2[j], vab * e2[j].second);
      }
  }

  double pair_cost = 0.0;
  for (const auto& [key, cl] : classes)
    pair_cost += static_cast<double>(cl.omega.size()) * static_cast<double>(cl.omega.size());
  if (pair_cost > pair_cost_guard)
    throw CostGuardError("window integral: class pair cost too large");

  // deterministic class order, parallel per-class sums
  std::vector<const detail::ClassTerms*> ordered;
  std::vector<std::int64_t> keys;
  keys.reserve(classes.size());
  for (const auto& [key, cl] : classes) keys.push_back(key);
  std::sort(keys.begin(), keys.end());
  ordered.reserve(keys.size());
  for (auto k : keys) ordered.push_back(&classes.at(k));

  std::vector<double> partial(ordered.size(), 0.0);
  parallel_for(ordered.size(), [&](std::size_t ci) {
    const auto& cl = *ordered[ci];
    const std::size_t n = cl.omega.size();
    Compensated sum;
    for (std::size_t i = 0; i < n; ++i) {
      sum.add(std::norm(cl.amp[i]) * T);
      for (std::size_t j = i + 1; j < n; ++j) {
        const cplx term =
            cl.amp[i] * std::conj(cl.amp[j]) * detail::window_integral(T, cl.omega[i] - cl.omega[j]);
        sum.add(2.0 * term.real());
      }
    }
    partial[ci] = sum.value();
  });
  Compensated total;
  for (double v : partial) total.add(v);
  return torus.volume() * total.value();
}

}  // namespace strichartz
