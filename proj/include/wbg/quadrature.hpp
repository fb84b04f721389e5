#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <queue>
#include <vector>

#include "wbg/errors.hpp"
#include "wbg/weibull.hpp"

namespace wbg {

struct QuadratureConfig {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  std::size_t max_subdivisions = 200;

  void validate() const {
    if (!(rel_tol > 0.0) || !(abs_tol > 0.0)) throw DomainError("QuadratureConfig: tolerances must be > 0");
    if (max_subdivisions < 1) throw DomainError("QuadratureConfig: max_subdivisions must be >= 1");
  }
};

struct OracleValue {
  double value = 0.0;
  double error_estimate = 0.0;
  std::size_t evaluations = 0;
};

namespace detail {

// 15-point Kronrod extension of the 7-point Gauss rule (QUADPACK qk15 tables).
inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
// Gauss weights for the odd-indexed Kronrod nodes 1, 3, 5, 7.
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double lo;
  double hi;
  double value;
  double error;

  bool operator<(const Panel& other) const { return error < other.error; }
};

template <class F>
Panel kronrod15(F& f, double lo, double hi) {
  const double center = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  const double f_center = f(center);
  double kronrod = f_center * kKronrodWeights[7];
  double gauss = f_center * kGaussWeights[3];
  double abs_sum = std::abs(kronrod);
  std::array<double, 15> values{};
  values[7] = f_center;
  for (std::size_t j = 0; j < 7; ++j) {
    const double dx = half * kKronrodNodes[j];
    const double f1 = f(center - dx);
    const double f2 = f(center + dx);
    values[j] = f1;
    values[14 - j] = f2;
    kronrod += kKronrodWeights[j] * (f1 + f2);
    abs_sum += kKronrodWeights[j] * (std::abs(f1) + std::abs(f2));
    if (j % 2 == 1) gauss += kGaussWeights[j / 2] * (f1 + f2);
  }
  const double mean = 0.5 * kronrod;
  double asc = kKronrodWeights[7] * std::abs(f_center - mean);
  for (std::size_t j = 0; j < 7; ++j) {
    asc += kKronrodWeights[j] * (std::abs(values[j] - mean) + std::abs(values[14 - j] - mean));
  }
  kronrod *= half;
  gauss *= half;
  abs_sum *= std::abs(half);
  asc *= std::abs(half);

  double error = std::abs(kronrod - gauss);
  if (asc != 0.0 && error != 0.0) error = asc * std::min(1.0, std::pow(200.0 * error / asc, 1.5));
  constexpr double eps = std::numeric_limits<double>::epsilon();
  if (abs_sum > std::numeric_limits<double>::min() / (50.0 * eps)) {
    error = std::max(error, 50.0 * eps * abs_sum);
  }
  return {lo, hi, kronrod, error};
}

}  // namespace detail

/// Adaptive Gauss-Kronrod (7/15) quadrature on a finite interval. The panel
/// with the largest error estimate is bisected until the total estimate meets
/// max(abs_tol, rel_tol * |I|).
template <class F>
OracleValue integrate_interval(F&& f, double lo, double hi, const QuadratureConfig& cfg = {}) {
  cfg.validate();
  std::size_t evaluations = 0;
  auto counted = [&](double x) {
    ++evaluations;
    return f(x);
  };

  std::priority_queue<detail::Panel> panels;
  panels.push(detail::kronrod15(counted, lo, hi));
  double total = panels.top().value;
  double total_error = panels.top().error;
  std::size_t subdivisions = 1;

  auto converged = [&] { return total_error <= std::max(cfg.abs_tol, cfg.rel_tol * std::abs(total)); };
  while (!converged()) {
    if (subdivisions >= cfg.max_subdivisions) {
      throw NonConvergenceError("integrate: subdivision budget exhausted", total, total_error);
    }
    const detail::Panel worst = panels.top();
    panels.pop();
    const double mid = 0.5 * (worst.lo + worst.hi);
    const detail::Panel left = detail::kronrod15(counted, worst.lo, mid);
    const detail::Panel right = detail::kronrod15(counted, mid, worst.hi);
    total += left.value + right.value - worst.value;
    total_error += left.error + right.error - worst.error;
    panels.push(left);
    panels.push(right);
    ++subdivisions;
    if (!std::isfinite(total)) {
      throw NonConvergenceError("integrate: non-finite integrand value", total, total_error);
    }
  }

  // Re-sum from the panels to drop the drift accumulated by the running updates.
  double value = 0.0;
  double error = 0.0;
  while (!panels.empty()) {
    value += panels.top().value;
    error += panels.top().error;
    panels.pop();
  }
  return {value, error, evaluations};
}

/// Integral over (0, inf) after the change of variables x = t / (1 - t).
template <class F>
OracleValue integrate_halfline(F&& f, const QuadratureConfig& cfg = {}) {
  auto mapped = [&](double t) {
    const double one_minus = 1.0 - t;
    const double x = t / one_minus;
    return f(x) / (one_minus * one_minus);
  };
  return integrate_interval(mapped, 0.0, 1.0, cfg);
}

/// E_theta[g(X)] by half-line quadrature of g * pdf. Points where the density
/// underflows contribute nothing, so g may overflow there.
template <class G>
OracleValue expectation_quadrature(const ThetaPoint& theta, G&& g, const QuadratureConfig& cfg = {}) {
  auto integrand = [&](double x) {
    if (!(x > 0.0) || !std::isfinite(x)) return 0.0;
    const double p = pdf(theta, x);
    if (p == 0.0) return 0.0;
    return g(x) * p;
  };
  return integrate_halfline(integrand, cfg);
}

/// Sample mean of g over n inverse-CDF draws; error_estimate is the standard error.
template <class G>
OracleValue expectation_montecarlo(const ThetaPoint& theta, G&& g, std::uint64_t seed, std::size_t n) {
  if (n < 2) throw DomainError("expectation_montecarlo: n must be >= 2");
  const std::vector<double> draws = sample(theta, seed, n);
  std::vector<double> values;
  values.reserve(n);
  double sum = 0.0;
  for (const double x : draws) {
    values.push_back(g(x));
    sum += values.back();
  }
  const double mean = sum / static_cast<double>(n);
  double sq = 0.0;
  for (const double v : values) sq += (v - mean) * (v - mean);
  const double variance = sq / static_cast<double>(n - 1);
  return {mean, std::sqrt(variance / static_cast<double>(n)), n};
}

}  // namespace wbg
