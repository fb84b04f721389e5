#pragma once

#include <algorithm>
#include <array>
#include <cmath>

#include "wbg/errors.hpp"

namespace wbg {

/// General 2x2 matrix, row-major.
struct Mat2 {
  double m11, m12, m21, m22;

  double max_abs_deviation_from_identity() const {
    return std::max({std::abs(m11 - 1.0), std::abs(m12), std::abs(m21), std::abs(m22 - 1.0)});
  }
};

/// Symmetric 2x2 matrix; the off-diagonal entry is stored once.
struct Sym2 {
  double s11, s12, s22;

  double det() const { return s11 * s22 - s12 * s12; }
  double trace() const { return s11 + s22; }

  /// Eigenvalues in ascending order.
  std::array<double, 2> eigenvalues() const {
    const double mean = 0.5 * (s11 + s22);
    const double radius = std::hypot(0.5 * (s11 - s22), s12);
    const double hi = mean + radius;
    const double lo = mean - radius;
    // Recover the smaller one from the determinant when the two nearly cancel.
    if (std::abs(lo) < 1e-8 * std::abs(hi) && hi != 0.0) return {det() / hi, hi};
    return {lo, hi};
  }

  /// Sylvester's criterion.
  bool is_positive_definite() const { return s11 > 0.0 && det() > 0.0; }

  Sym2 inverse(double singular_tol = 1e-300) const {
    const double d = det();
    if (!(std::abs(d) > singular_tol)) throw SingularityError("Sym2::inverse: singular matrix");
    return {s22 / d, -s12 / d, s11 / d};
  }

  Sym2 operator-() const { return {-s11, -s12, -s22}; }

  friend bool operator==(const Sym2&, const Sym2&) = default;
};

inline Mat2 operator*(const Sym2& lhs, const Sym2& rhs) {
  return {lhs.s11 * rhs.s11 + lhs.s12 * rhs.s12, lhs.s11 * rhs.s12 + lhs.s12 * rhs.s22,
          lhs.s12 * rhs.s11 + lhs.s22 * rhs.s12, lhs.s12 * rhs.s12 + lhs.s22 * rhs.s22};
}

inline std::array<double, 2> operator*(const Sym2& m, const std::array<double, 2>& v) {
  return {m.s11 * v[0] + m.s12 * v[1], m.s12 * v[0] + m.s22 * v[1]};
}

}  // namespace wbg
