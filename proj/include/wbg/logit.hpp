#pragma once

#include <array>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "wbg/errors.hpp"
#include "wbg/jet.hpp"
#include "wbg/matrix2.hpp"
#include "wbg/polynomial.hpp"
#include "wbg/roots.hpp"
#include "wbg/weibull.hpp"

namespace wbg {

// ---------------------------------------------------------------------------
// Group structure on R_+^2 and its action on R_+
// ---------------------------------------------------------------------------

/// Element (m, n) of R_+^2 under the iota product. The neutral element is (1, 1).
class GroupElement {
public:
  GroupElement(double m, double n) : m_(m), n_(n) {
    if (!std::isfinite(m) || !std::isfinite(n) || m <= 0.0 || n <= 0.0) {
      throw DomainError("GroupElement: components must be finite and positive");
    }
  }
  explicit GroupElement(const ThetaPoint& theta) : GroupElement(theta.a(), theta.b()) {}

  double m() const noexcept { return m_; }
  double n() const noexcept { return n_; }

  static GroupElement identity() { return {1.0, 1.0}; }

  friend bool operator==(const GroupElement&, const GroupElement&) = default;

private:
  double m_;
  double n_;
};

/// iota((m, n), (m', n')) = (m'^{1/n} m, n n').
inline GroupElement iota_product(const GroupElement& x, const GroupElement& y) {
  return {std::pow(y.m(), 1.0 / x.n()) * x.m(), x.n() * y.n()};
}

/// nu(theta, x) = m^{-n} x^n.
inline double action(const GroupElement& theta, double x) {
  detail::require_positive_x(x, "action");
  return std::pow(x / theta.m(), theta.n());
}

inline double action(const ThetaPoint& theta, double x) { return action(GroupElement(theta), x); }

// ---------------------------------------------------------------------------
// Closed-form expressions, generic over the scalar so that Jet2 can carry
// exact first and second derivatives through them.
// ---------------------------------------------------------------------------

namespace detail {

template <class T>
T scaled_power_expr(const T& a, const T& b, const T& x) {
  using std::exp;
  using std::log;
  return exp(b * (log(x) - log(a)));
}

template <class T>
T constraint_expr(const T& a, const T& b, const T& x) {
  using std::log;
  const T u = scaled_power_expr(a, b, x);
  const T la = log(a);
  const T lx = log(x);
  return 2.0 * b * u - 2.0 * b - 2.0 * u * a * la + 2.0 * u * a * lx - 2.0 * a * lx + 2.0 * a * la - a;
}

template <class T>
T potential_expr(const T& a, const T& b, const T& x) {
  const T u = scaled_power_expr(a, b, x);
  const T c = b * b / (12.0 * a * a * x);
  const T w = (u - 1.0) * (u - 1.0);
  return c * w * w + 4.0 * c * u - c;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Constraint on x
// ---------------------------------------------------------------------------

struct ConstraintRoot {
  double x;
  double residual;
  double lo;
  double hi;
};

struct SearchWindow {
  double lo = 1e-3;
  double hi = 1e3;
};

inline constexpr int kRootScanPanels = 256;

inline double constraint_residual(const ThetaPoint& theta, double x) {
  detail::require_positive_x(x, "constraint_residual");
  const double a = theta.a();
  const double b = theta.b();
  const double u = std::pow(x / a, b);
  const double la = std::log(a);
  const double lx = std::log(x);
  return 2.0 * b * u - 2.0 * b - 2.0 * u * a * la + 2.0 * u * a * lx - 2.0 * a * lx + 2.0 * a * la - a;
}

/// d(residual)/dx.
inline double constraint_residual_dx(const ThetaPoint& theta, double x) {
  detail::require_positive_x(x, "constraint_residual_dx");
  using J = Jet2<1>;
  return detail::constraint_expr(J::constant(theta.a()), J::constant(theta.b()), J::variable(x, 0)).g[0];
}

/// Solves constraint_residual(theta, x) = 0 inside `window`. The window is
/// scanned on 256 log-spaced panels and the rightmost sign change is refined
/// by Newton-safeguarded bisection. The equation typically has two roots (one
/// below and one above x = a); the rightmost is the one returned.
inline ConstraintRoot solve_constraint(const ThetaPoint& theta, SearchWindow window = {}, double tol = 1e-12) {
  if (!(window.lo > 0.0) || !(window.lo < window.hi)) {
    throw DomainError("solve_constraint: window must satisfy 0 < lo < hi");
  }
  if (!(tol > 0.0)) throw DomainError("solve_constraint: tol must be > 0");
  auto f = [&](double x) { return constraint_residual(theta, x); };

  const double log_lo = std::log(window.lo);
  const double log_step = (std::log(window.hi) - log_lo) / kRootScanPanels;
  auto node = [&](int i) {
    if (i == 0) return window.lo;
    if (i == kRootScanPanels) return window.hi;
    return std::exp(log_lo + log_step * i);
  };

  double right = window.hi;
  double f_right = f(right);
  for (int i = kRootScanPanels - 1; i >= 0; --i) {
    const double left = node(i);
    const double f_left = f(left);
    if (f_right == 0.0) return {right, 0.0, left, right};
    if (detail::opposite_signs(f_left, f_right)) {
      const BracketedRoot root = find_root_bracketed_newton(
          f, [&](double x) { return constraint_residual_dx(theta, x); }, left, right, RootOptions{tol, 0.0, 400});
      return {root.x, root.residual, left, right};
    }
    right = left;
    f_right = f_left;
  }
  if (f_right == 0.0) return {right, 0.0, right, node(1)};
  throw BracketError("solve_constraint: no sign change of the constraint residual in [" +
                     std::to_string(window.lo) + ", " + std::to_string(window.hi) + "]");
}

// ---------------------------------------------------------------------------
// Binary model, link function and potential
// ---------------------------------------------------------------------------

/// p(y, x) = pdf(x) / 2 for y in {0, 1}.
inline double logit_density(const ThetaPoint& theta, int y, double x) {
  if (y != 0 && y != 1) throw DomainError("logit_density: y must be 0 or 1");
  return 0.5 * pdf(theta, x);
}

/// Gradient of log p(y, x) in (a, b); the factor 1/2 drops out.
inline ScoreVector logit_score(const ThetaPoint& theta, double x) { return score(theta, x); }

/// r(u) = (b/a)(u - 1) / (2x).
inline double link_function(const ThetaPoint& theta, double x, double u) {
  detail::require_positive_x(x, "link_function");
  return (theta.b() / theta.a()) * (u - 1.0) / (2.0 * x);
}

/// Published closed form b^2/(12a^2x)(u-1)^4 + b^2/(3a^2x) u - b^2/(12a^2x), u = a^{-b}x^b.
inline double potential_closed(const ThetaPoint& theta, double x) {
  detail::require_positive_x(x, "potential_closed");
  const double a = theta.a();
  const double b = theta.b();
  const double u = std::pow(x / a, b);
  const double c = b * b / (12.0 * a * a * x);
  const double w = (u - 1.0) * (u - 1.0);
  return c * w * w + b * b / (3.0 * a * a * x) * u - c;
}

/// Exact value of the double integral of the link function from 0 to u0 = a^{-b}x^b.
inline double potential_integral(const ThetaPoint& theta, double x) {
  detail::require_positive_x(x, "potential_integral");
  const double k = theta.b() / (2.0 * theta.a() * x);
  const std::array<double, 2> coeffs{-k, k};
  return nested_polynomial_integral(coeffs, action(theta, x));
}

// ---------------------------------------------------------------------------
// Derivatives of the potential, Legendre dual, information matrix
// ---------------------------------------------------------------------------

/// How x enters the derivatives of Phi(a, b; x).
///  fixed_x:          x is an independent constant.
///  total_derivative: x moves with theta along the level set of the
///                    constraint residual through (theta, x), so that
///                    dx/dtheta = -R_theta / R_x.
enum class DiffMode { fixed_x, total_derivative };

inline const char* to_string(DiffMode mode) {
  return mode == DiffMode::fixed_x ? "fixed_x" : "total_derivative";
}

struct PotentialDerivatives {
  double phi;
  std::array<double, 2> gradient;  // (dPhi/da, dPhi/db)
  Sym2 hessian;
  std::array<double, 2> dx_dtheta;  // zero in fixed_x mode
};

inline PotentialDerivatives potential_derivatives(const ThetaPoint& theta, double x, DiffMode mode) {
  detail::require_positive_x(x, "potential_derivatives");
  using J = Jet2<3>;
  const J a = J::variable(theta.a(), 0);
  const J b = J::variable(theta.b(), 1);
  const J xv = J::variable(x, 2);
  const J phi = detail::potential_expr(a, b, xv);

  PotentialDerivatives out{potential_closed(theta, x), {phi.g[0], phi.g[1]},
                           {phi.hess(0, 0), phi.hess(0, 1), phi.hess(1, 1)}, {0.0, 0.0}};
  if (mode == DiffMode::fixed_x) return out;

  const J r = detail::constraint_expr(a, b, xv);
  const double r_x = r.g[2];
  if (!(std::abs(r_x) > 1e-12)) {
    throw SingularityError("potential_derivatives: d(residual)/dx vanishes; x(theta) is not defined");
  }
  const std::array<double, 2> dx{-r.g[0] / r_x, -r.g[1] / r_x};
  double d2x[2][2];
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t j = 0; j < 2; ++j) {
      d2x[i][j] = -(r.hess(i, j) + r.hess(i, 2) * dx[j] + r.hess(j, 2) * dx[i] + r.hess(2, 2) * dx[i] * dx[j]) / r_x;
    }
  }
  auto total_hess = [&](std::size_t i, std::size_t j) {
    return phi.hess(i, j) + phi.hess(i, 2) * dx[j] + phi.hess(j, 2) * dx[i] + phi.hess(2, 2) * dx[i] * dx[j] +
           phi.g[2] * d2x[i][j];
  };
  out.gradient = {phi.g[0] + phi.g[2] * dx[0], phi.g[1] + phi.g[2] * dx[1]};
  out.hessian = {total_hess(0, 0), total_hess(0, 1), total_hess(1, 1)};
  out.dx_dtheta = dx;
  return out;
}

struct DualCoordinates {
  double eta1;
  double eta2;
};

inline DualCoordinates dual_coordinates(const ThetaPoint& theta, double x, DiffMode mode = DiffMode::fixed_x) {
  const auto d = potential_derivatives(theta, x, mode);
  return {d.gradient[0], d.gradient[1]};
}

struct PotentialEval {
  double phi;
  double eta1;
  double eta2;
  double psi;
  double legendre_residual;  // a eta1 + b eta2 - phi - psi
  DiffMode mode;
};

inline PotentialEval dual_potential(const ThetaPoint& theta, double x, DiffMode mode = DiffMode::fixed_x) {
  const double phi = potential_closed(theta, x);
  const auto [eta1, eta2] = dual_coordinates(theta, x, mode);
  const double psi = theta.a() * eta1 + theta.b() * eta2 - phi;
  return {phi, eta1, eta2, psi, theta.a() * eta1 + theta.b() * eta2 - phi - psi, mode};
}

struct LogitInformation {
  Sym2 hessian;              // H = Hessian of Phi
  Sym2 information;          // published sign: I = -H
  Sym2 information_inverse;  // published entries: (1/A)[[-H_bb, H_ab], [H_ab, -H_aa]]
  double det_a;              // A = H_aa H_bb - H_ab^2
  bool hessian_positive_definite;
};

inline constexpr double kSingularDeterminant = 1e-12;

inline LogitInformation logit_information(const ThetaPoint& theta, double x, DiffMode mode = DiffMode::fixed_x) {
  const Sym2 h = potential_derivatives(theta, x, mode).hessian;
  const double det_a = h.s11 * h.s22 - h.s12 * h.s12;
  if (!(std::abs(det_a) > kSingularDeterminant)) {
    throw SingularityError("logit_information: Hessian determinant of the potential vanishes");
  }
  return {h, -h, {-h.s22 / det_a, h.s12 / det_a, -h.s11 / det_a}, det_a, h.is_positive_definite()};
}

}  // namespace wbg
