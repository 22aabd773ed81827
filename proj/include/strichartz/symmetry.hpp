#pragma once

#include <stdexcept>
#include <utility>

#include "strichartz/coeffs.hpp"
#include "strichartz/dispersion.hpp"

namespace strichartz {

// Frequency translation new(k + k0) = old(k); the l2 norm is preserved
// exactly (amplitudes are only relabeled).
inline CoefficientVector galilean_shift(const CoefficientVector& coeffs, const Freq& k0) {
  std::vector<CoefficientVector::Entry> entries;
  entries.reserve(coeffs.size());
  for (const auto& [k, c] : coeffs.entries()) entries.emplace_back(k + k0, c);
  return CoefficientVector(coeffs.torus(), std::move(entries));
}

// Recenters 1d integer-frequency data at A and swaps the cubic symbol for
// its shifted form: writing k = A + l,
//   sum_k c_k e^{i(kx + t k^3)}
//     = e^{i(Ax + tA^3)} sum_l c_{A+l} e^{i(l(x + 3A^2 t) + t(3A l^2 + l^3))},
// so the moduli agree pointwise after the drift x -> x + 3A^2 t and every
// space-time L^p norm over the full torus is unchanged.
inline std::pair<CoefficientVector, Dispersion> kdv_galilean_reduce(
    const CoefficientVector& coeffs, std::int64_t A) {
  if (coeffs.torus().d != 1)
    throw std::invalid_argument("kdv_galilean_reduce: 1d data required");
  if (coeffs.torus().lambda != 1.0)
    throw std::invalid_argument("kdv_galilean_reduce: integer frequencies (lambda = 1) required");
  return {galilean_shift(coeffs, Freq(-A)), Dispersion::kdv_galilean(A)};
}

}  // namespace strichartz
