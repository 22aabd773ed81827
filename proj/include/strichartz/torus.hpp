#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace strichartz {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

// Periodic spatial domain: axis i has period 2*pi*lambda*alpha_i.
// alpha_1 is pinned to 1; remaining period factors lie in (1/2, 1];
// lambda >= 1 rescales all axes at once.
struct TorusSpec {
  int d = 1;
  std::array<double, 2> alphas{1.0, 1.0};
  double lambda = 1.0;

  TorusSpec() = default;
  TorusSpec(int dim, double lam, double alpha2 = 1.0) : d(dim), lambda(lam) {
    alphas = {1.0, alpha2};
    validate();
  }

  void validate() const {
    if (d != 1 && d != 2) throw std::invalid_argument("torus: d must be 1 or 2");
    if (alphas[0] != 1.0) throw std::invalid_argument("torus: alpha_1 must be 1");
    for (int i = 1; i < d; ++i) {
      if (!(alphas[i] > 0.5 && alphas[i] <= 1.0))
        throw std::invalid_argument("torus: alpha_i must lie in (1/2, 1]");
    }
    if (!(lambda >= 1.0)) throw std::invalid_argument("torus: lambda must be >= 1");
  }

  double period(int axis) const { return kTwoPi * lambda * alphas[axis]; }

  double volume() const {
    double v = 1.0;
    for (int i = 0; i < d; ++i) v *= period(i);
    return v;
  }

  bool is_unit_rational() const {
    if (lambda != 1.0) return false;
    for (int i = 0; i < d; ++i)
      if (alphas[i] != 1.0) return false;
    return true;
  }

  bool operator==(const TorusSpec& o) const {
    return d == o.d && lambda == o.lambda && alphas == o.alphas;
  }
};

// Integer lattice point; the physical frequency on axis i is k_i/(lambda*alpha_i).
struct Freq {
  std::array<std::int64_t, 2> k{0, 0};

  Freq() = default;
  explicit Freq(std::int64_t k0) : k{k0, 0} {}
  Freq(std::int64_t k0, std::int64_t k1) : k{k0, k1} {}

  std::int64_t operator[](int i) const { return k[i]; }
  std::int64_t& operator[](int i) { return k[i]; }

  Freq operator+(const Freq& o) const { return {k[0] + o.k[0], k[1] + o.k[1]}; }
  Freq operator-(const Freq& o) const { return {k[0] - o.k[0], k[1] - o.k[1]}; }
  bool operator==(const Freq& o) const { return k == o.k; }
  bool operator<(const Freq& o) const { return k < o.k; }  // lexicographic
};

inline std::array<double, 2> physical(const Freq& f, const TorusSpec& torus) {
  std::array<double, 2> xi{0.0, 0.0};
  for (int i = 0; i < torus.d; ++i)
    xi[i] = static_cast<double>(f[i]) / (torus.lambda * torus.alphas[i]);
  return xi;
}

inline double physical_norm_sq(const Freq& f, const TorusSpec& torus) {
  const auto xi = physical(f, torus);
  double s = 0.0;
  for (int i = 0; i < torus.d; ++i) s += xi[i] * xi[i];
  return s;
}

struct FreqHash {
  std::size_t operator()(const Freq& f) const {
    std::uint64_t h = static_cast<std::uint64_t>(f.k[0]) * 0x9e3779b97f4a7c15ULL;
    h ^= static_cast<std::uint64_t>(f.k[1]) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return static_cast<std::size_t>(h);
  }
};

}  // namespace strichartz
