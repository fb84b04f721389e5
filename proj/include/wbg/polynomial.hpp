#pragma once

#include <cstddef>
#include <span>

namespace wbg {

/// Exact value of int_0^{u0} int_0^{v} r(u) du dv for r(u) = sum_k coeffs[k] u^k.
inline double nested_polynomial_integral(std::span<const double> coeffs, double u0) {
  // Term k integrates twice to coeffs[k] * u0^{k+2} / ((k+1)(k+2)); evaluated by Horner.
  double acc = 0.0;
  for (std::size_t k = coeffs.size(); k-- > 0;) {
    const double kk = static_cast<double>(k);
    acc = acc * u0 + coeffs[k] / ((kk + 1.0) * (kk + 2.0));
  }
  return acc * u0 * u0;
}

}  // namespace wbg
