#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "wbg/errors.hpp"

namespace wbg {

/// Euler-Mascheroni constant, double precision.
inline constexpr double kEuler = 0.5772156649015329;

/// Weibull parameters: scale a > 0, shape b > 0.
class ThetaPoint {
public:
  ThetaPoint(double a, double b) : a_(a), b_(b) {
    if (!std::isfinite(a) || !std::isfinite(b) || a <= 0.0 || b <= 0.0) {
      throw DomainError("ThetaPoint: scale and shape must be finite and positive (a=" +
                        std::to_string(a) + ", b=" + std::to_string(b) + ")");
    }
  }

  double a() const noexcept { return a_; }
  double b() const noexcept { return b_; }

  friend bool operator==(const ThetaPoint&, const ThetaPoint&) = default;

private:
  double a_;
  double b_;
};

struct ScoreVector {
  double d_a;
  double d_b;
};

/// Second partials of the log-likelihood; h_ab is stored once.
struct LogLikHessian {
  double h_aa;
  double h_ab;
  double h_bb;
};

/// Moments of xi = log X, obtained through the Gumbel change of variables.
struct GumbelLink {
  double mean_xi;
  double var_xi;
};

namespace detail {

inline void require_positive_x(double x, const char* op) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw DomainError(std::string(op) + ": x must be finite and > 0");
  }
}

// a^{-b} x^b, the quantity that appears in every derivative of the log-likelihood.
inline double scaled_power(const ThetaPoint& theta, double x) {
  return std::pow(x / theta.a(), theta.b());
}

}  // namespace detail

inline double pdf(const ThetaPoint& theta, double x) {
  detail::require_positive_x(x, "pdf");
  const double a = theta.a();
  const double b = theta.b();
  const double z = x / a;
  return (b / a) * std::pow(z, b - 1.0) * std::exp(-std::pow(z, b));
}

inline double log_likelihood(const ThetaPoint& theta, double x) {
  detail::require_positive_x(x, "log_likelihood");
  const double a = theta.a();
  const double b = theta.b();
  const double la = std::log(a);
  return std::log(b) - la - (b - 1.0) * la + (b - 1.0) * std::log(x) -
         detail::scaled_power(theta, x);
}

inline ScoreVector score(const ThetaPoint& theta, double x) {
  detail::require_positive_x(x, "score");
  const double a = theta.a();
  const double b = theta.b();
  const double u = detail::scaled_power(theta, x);
  const double la = std::log(a);
  const double lx = std::log(x);
  return {(b / a) * (u - 1.0), u * la - u * lx + lx - la + 1.0 / b};
}

inline LogLikHessian log_likelihood_hessian(const ThetaPoint& theta, double x) {
  detail::require_positive_x(x, "log_likelihood_hessian");
  const double a = theta.a();
  const double b = theta.b();
  const double u = detail::scaled_power(theta, x);
  const double la = std::log(a);
  const double lx = std::log(x);
  const double h_aa = -(b / (a * a)) * (-1.0 + u * b + u);
  const double h_ab = -(1.0 / a) * (1.0 + u * la * b - u - u * b * lx);
  const double h_bb = -(1.0 / (b * b)) *
                      (1.0 + u * la * la * b * b - 2.0 * u * la * b * b * lx + u * b * b * lx * lx);
  return {h_aa, h_ab, h_bb};
}

// Closed-form moment identities. The *_paper variants return the published
// expressions unchanged; their agreement with quadrature is checked elsewhere.

inline double moment_xb(const ThetaPoint& theta) { return std::pow(theta.a(), theta.b()); }

inline double moment_log_paper(const ThetaPoint& theta) {
  const double a = theta.a();
  const double b = theta.b();
  return -a + (1.0 - kEuler) * b + a * b * std::log(a);
}

inline double moment_xb_log_paper(const ThetaPoint& theta) {
  const double a = theta.a();
  const double b = theta.b();
  const double ab = std::pow(a, b);
  const double ab1 = std::pow(a, b + 1.0);
  return ab / b - ab1 + (1.0 - kEuler) * ab * b + ab1 * b * std::log(a);
}

inline double moment_xb_log2_paper(const ThetaPoint& theta) {
  const double a = theta.a();
  const double b = theta.b();
  const double ab = std::pow(a, b);
  const double la = std::log(a);
  const double vartheta = -1.0 / b + (1.0 - kEuler) / a + la;
  const double pi2 = std::numbers::pi * std::numbers::pi;
  return (ab * b / (6.0 * a * a)) * pi2 + ab * b * vartheta * vartheta + 2.0 * ab * la * vartheta +
         ab * b * la * la;
}

inline GumbelLink gumbel_link(const ThetaPoint& theta) {
  const double a = theta.a();
  const double b = theta.b();
  return {-1.0 / b + (1.0 - kEuler) / a + std::log(a),
          std::numbers::pi * std::numbers::pi / (6.0 * a * a)};
}

/// Inverse-CDF draws x = a(-log u)^{1/b}. Deterministic for a given seed on
/// every platform: uniforms are built from the raw 64-bit engine output.
inline std::vector<double> sample(const ThetaPoint& theta, std::uint64_t seed, std::size_t n) {
  if (n == 0) throw DomainError("sample: n must be >= 1");
  std::mt19937_64 engine(seed);
  std::vector<double> out;
  out.reserve(n);
  const double inv_b = 1.0 / theta.b();
  for (std::size_t i = 0; i < n; ++i) {
    // (k + 0.5) / 2^53 lies strictly inside (0, 1).
    const double u = (static_cast<double>(engine() >> 11) + 0.5) * 0x1.0p-53;
    out.push_back(theta.a() * std::pow(-std::log(u), inv_b));
  }
  return out;
}

}  // namespace wbg
