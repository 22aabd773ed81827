#pragma once

#include <cassert>
#include <complex>
#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <vector>

namespace strichartz {

using cplx = std::complex<double>;

inline std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

// Iterative radix-2 FFT with cached twiddle/bit-reversal tables. Grid sizes
// are always padded to powers of two, so no mixed-radix path is needed.
class FftPlan {
 public:
  explicit FftPlan(std::size_t n) : n_(n) {
    assert(n >= 1 && (n & (n - 1)) == 0);
    rev_.resize(n);
    std::size_t log2n = 0;
    while ((std::size_t{1} << log2n) < n) ++log2n;
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t r = 0;
      for (std::size_t b = 0; b < log2n; ++b) r |= ((i >> b) & 1) << (log2n - 1 - b);
      rev_[i] = r;
    }
    // twiddles for each stage, forward sign (-); conjugate for inverse
    tw_.resize(n / 2);
    const double two_pi = 6.283185307179586476925286766559;
    for (std::size_t k = 0; k < n / 2; ++k) {
      const double a = -two_pi * static_cast<double>(k) / static_cast<double>(n);
      tw_[k] = {std::cos(a), std::sin(a)};
    }
  }

  std::size_t size() const { return n_; }

  // sign = -1: forward (e^{-i 2pi km/n}); sign = +1: inverse without 1/n
  void transform(cplx* data, int sign) const {
    const std::size_t n = n_;
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t j = rev_[i];
      if (i < j) std::swap(data[i], data[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
      const std::size_t half = len >> 1;
      const std::size_t step = n / len;
      for (std::size_t base = 0; base < n; base += len) {
        for (std::size_t k = 0; k < half; ++k) {
          cplx w = tw_[k * step];
          if (sign > 0) w = std::conj(w);
          const cplx u = data[base + k];
          const cplx v = data[base + k + half] * w;
          data[base + k] = u + v;
          data[base + k + half] = u - v;
        }
      }
    }
  }

 private:
  std::size_t n_;
  std::vector<std::size_t> rev_;
  std::vector<cplx> tw_;
};

inline const FftPlan& fft_plan(std::size_t n) {
  static std::mutex mu;
  static std::map<std::size_t, std::unique_ptr<FftPlan>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, std::make_unique<FftPlan>(n)).first;
  return *it->second;
}

inline void fft(std::vector<cplx>& v, int sign) {
  fft_plan(v.size()).transform(v.data(), sign);
}

// Row-column transform of a dense n0 x n1 array (row-major, both powers of 2).
inline void fft2(std::vector<cplx>& v, std::size_t n0, std::size_t n1, int sign,
                 std::vector<cplx>& scratch) {
  assert(v.size() == n0 * n1);
  const FftPlan& pr = fft_plan(n1);
  for (std::size_t r = 0; r < n0; ++r) pr.transform(v.data() + r * n1, sign);
  const FftPlan& pc = fft_plan(n0);
  scratch.resize(n0);
  for (std::size_t c = 0; c < n1; ++c) {
    for (std::size_t r = 0; r < n0; ++r) scratch[r] = v[r * n1 + c];
    pc.transform(scratch.data(), sign);
    for (std::size_t r = 0; r < n0; ++r) v[r * n1 + c] = scratch[r];
  }
}

}  // namespace strichartz
