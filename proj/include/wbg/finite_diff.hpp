#pragma once

#include <algorithm>
#include <cmath>

#include "wbg/matrix2.hpp"
#include "wbg/weibull.hpp"

namespace wbg {

inline constexpr double kGradientStep = 1e-5;
inline constexpr double kHessianStep = 1e-4;

struct FdGradient {
  double d_a;
  double d_b;
  bool clipped = false;  // a step was shrunk to stay inside the positive quadrant
};

struct FdHessian {
  Sym2 hessian;
  bool clipped = false;
};

namespace detail {

// Relative step h * max(1, |c|), shrunk to c/2 if c - step would leave (0, inf).
inline double fd_step(double coordinate, double h, bool& clipped) {
  double step = h * std::max(1.0, std::abs(coordinate));
  if (step >= coordinate) {
    step = 0.5 * coordinate;
    clipped = true;
  }
  return step;
}

}  // namespace detail

/// Central-difference gradient of F : ThetaPoint -> double.
template <class F>
FdGradient finite_diff_gradient(F&& f, const ThetaPoint& theta, double h = kGradientStep) {
  if (!(h > 0.0)) throw DomainError("finite_diff_gradient: h must be > 0");
  FdGradient out{};
  const double a = theta.a();
  const double b = theta.b();
  const double sa = detail::fd_step(a, h, out.clipped);
  const double sb = detail::fd_step(b, h, out.clipped);
  out.d_a = (f(ThetaPoint(a + sa, b)) - f(ThetaPoint(a - sa, b))) / (2.0 * sa);
  out.d_b = (f(ThetaPoint(a, b + sb)) - f(ThetaPoint(a, b - sb))) / (2.0 * sb);
  return out;
}

/// Second-order central stencils; the mixed entry uses the four-corner stencil.
template <class F>
FdHessian finite_diff_hessian(F&& f, const ThetaPoint& theta, double h = kHessianStep) {
  if (!(h > 0.0)) throw DomainError("finite_diff_hessian: h must be > 0");
  FdHessian out{};
  const double a = theta.a();
  const double b = theta.b();
  const double sa = detail::fd_step(a, h, out.clipped);
  const double sb = detail::fd_step(b, h, out.clipped);
  const double f0 = f(theta);
  const double h_aa = (f(ThetaPoint(a + sa, b)) - 2.0 * f0 + f(ThetaPoint(a - sa, b))) / (sa * sa);
  const double h_bb = (f(ThetaPoint(a, b + sb)) - 2.0 * f0 + f(ThetaPoint(a, b - sb))) / (sb * sb);
  const double h_ab = (f(ThetaPoint(a + sa, b + sb)) - f(ThetaPoint(a + sa, b - sb)) -
                       f(ThetaPoint(a - sa, b + sb)) + f(ThetaPoint(a - sa, b - sb))) /
                      (4.0 * sa * sb);
  out.hessian = {h_aa, h_ab, h_bb};
  return out;
}

}  // namespace wbg
