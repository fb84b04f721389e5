#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "wbg/matrix2.hpp"
#include "wbg/quadrature.hpp"
#include "wbg/verification.hpp"
#include "wbg/weibull.hpp"

namespace wbg {

enum class MetricSource { paper_closed_form, numeric_hessian, numeric_outer };

inline const char* to_string(MetricSource source) {
  switch (source) {
    case MetricSource::paper_closed_form: return "paper_closed_form";
    case MetricSource::numeric_hessian: return "numeric_hessian";
    case MetricSource::numeric_outer: return "numeric_outer";
  }
  return "unknown";
}

/// Symmetric 2x2 metric in (a, b) coordinates with the route that produced it.
struct MetricTensor2 {
  double g11;
  double g12;
  double g22;
  MetricSource source;

  Sym2 matrix() const { return {g11, g12, g22}; }
};

struct MetricIntermediates {
  double rho1;
  double rho2;
  double vartheta;
};

/// Attached to every record that depends on rho2.
inline constexpr const char* kRho2ReadingNote = "rho2 coefficient '(1++2a+b)' read as (1+2a+b)";

inline MetricIntermediates intermediates(const ThetaPoint& theta) {
  const double a = theta.a();
  const double b = theta.b();
  const double la = std::log(a);
  const double vartheta = -1.0 / b + (1.0 - kEuler) / a + la;
  const double rho1 = a * b + b * (1.0 - a * b) * la - (1.0 - kEuler) * b * b;
  const double rho2 = -1.0 / (b * b) - 2.0 * (1.0 / b - a + (1.0 - kEuler) * b + 2.0 * vartheta) * la -
                      (1.0 + 2.0 * a + b) * la * la - b * vartheta * vartheta;
  return {rho1, rho2, vartheta};
}

/// Published closed form of the Weibull Fisher metric.
inline MetricTensor2 metric_paper(const ThetaPoint& theta) {
  const double a = theta.a();
  const double b = theta.b();
  const auto [rho1, rho2, vartheta] = intermediates(theta);
  const double pi2 = std::numbers::pi * std::numbers::pi;
  return {b * b / (a * a), (rho1 - 1.0) / a, (b * pi2 - 6.0 * a * a * rho2) / (6.0 * a * a),
          MetricSource::paper_closed_form};
}

/// Published inverse, entry by entry. Throws SingularityError when the shared
/// denominator is below 1e-12 in magnitude.
inline MetricTensor2 metric_paper_inverse(const ThetaPoint& theta) {
  const double a = theta.a();
  const double b = theta.b();
  const auto [rho1, rho2, vartheta] = intermediates(theta);
  const double pi2 = std::numbers::pi * std::numbers::pi;
  const double a2 = a * a;
  const double den =
      b * b * b * pi2 - 6.0 * a2 * b * b * rho2 - 6.0 * a2 + 12.0 * a2 * rho1 - 6.0 * a2 * rho1 * rho1;
  if (std::abs(den) < 1e-12) throw SingularityError("metric_paper_inverse: denominator vanishes");
  return {a2 * (b * pi2 - 6.0 * a2 * rho2) / den, -6.0 * a2 * a * (-1.0 + rho1) / den, 6.0 * a2 * b * b / den,
          MetricSource::paper_closed_form};
}

/// max |G * G^{-1} - Id| for the published pair.
inline double verify_inverse(const ThetaPoint& theta) {
  return (metric_paper(theta).matrix() * metric_paper_inverse(theta).matrix()).max_abs_deviation_from_identity();
}

/// Fisher information as -E[Hessian of the log-likelihood].
inline MetricTensor2 metric_numeric_hessian(const ThetaPoint& theta, const QuadratureConfig& cfg = {}) {
  const double g11 = -expectation_quadrature(theta, [&](double x) { return log_likelihood_hessian(theta, x).h_aa; }, cfg).value;
  const double g12 = -expectation_quadrature(theta, [&](double x) { return log_likelihood_hessian(theta, x).h_ab; }, cfg).value;
  const double g22 = -expectation_quadrature(theta, [&](double x) { return log_likelihood_hessian(theta, x).h_bb; }, cfg).value;
  return {g11, g12, g22, MetricSource::numeric_hessian};
}

/// Fisher information as E[score score^T].
inline MetricTensor2 metric_numeric_outer(const ThetaPoint& theta, const QuadratureConfig& cfg = {}) {
  const double g11 = expectation_quadrature(theta, [&](double x) { const auto s = score(theta, x); return s.d_a * s.d_a; }, cfg).value;
  const double g12 = expectation_quadrature(theta, [&](double x) { const auto s = score(theta, x); return s.d_a * s.d_b; }, cfg).value;
  const double g22 = expectation_quadrature(theta, [&](double x) { const auto s = score(theta, x); return s.d_b * s.d_b; }, cfg).value;
  return {g11, g12, g22, MetricSource::numeric_outer};
}

/// d g11/db - d g12/da by central differences. A metric that is the Hessian
/// of some potential in (a, b) must make this vanish; MetricFn maps a
/// ThetaPoint to anything with g11 and g12 members.
template <class MetricFn>
double integrability_residual(MetricFn&& metric, const ThetaPoint& theta, double h = 1e-5) {
  if (!(h > 0.0)) throw DomainError("integrability_residual: h must be > 0");
  const double a = theta.a();
  const double b = theta.b();
  double sa = h * std::max(1.0, a);
  double sb = h * std::max(1.0, b);
  if (sa >= a) sa = 0.5 * a;
  if (sb >= b) sb = 0.5 * b;
  const double dg11_db = (metric(ThetaPoint(a, b + sb)).g11 - metric(ThetaPoint(a, b - sb)).g11) / (2.0 * sb);
  const double dg12_da = (metric(ThetaPoint(a + sa, b)).g12 - metric(ThetaPoint(a - sa, b)).g12) / (2.0 * sa);
  return dg11_db - dg12_da;
}

inline double integrability_residual(const ThetaPoint& theta, double h = 1e-5) {
  return integrability_residual([](const ThetaPoint& t) { return metric_paper(t); }, theta, h);
}

/// Published moment identities against quadrature of the same expectations.
inline std::vector<VerificationRecord> compare_moments(const ThetaPoint& theta, const QuadratureConfig& cfg = {}) {
  const double b = theta.b();
  const double e_log = expectation_quadrature(theta, [](double x) { return std::log(x); }, cfg).value;
  const double e_log2 = expectation_quadrature(theta, [](double x) { const double l = std::log(x); return l * l; }, cfg).value;
  const double e_xb = expectation_quadrature(theta, [b](double x) { return std::pow(x, b); }, cfg).value;
  const double e_xb_log = expectation_quadrature(theta, [b](double x) { return std::pow(x, b) * std::log(x); }, cfg).value;
  const double e_xb_log2 = expectation_quadrature(theta, [b](double x) { const double l = std::log(x); return std::pow(x, b) * l * l; }, cfg).value;
  const GumbelLink link = gumbel_link(theta);

  std::vector<VerificationRecord> out;
  out.push_back(make_record("E[x^b]", moment_xb(theta), e_xb));
  out.push_back(make_record("E[log x]", moment_log_paper(theta), e_log));
  out.push_back(make_record("E[x^b log x]", moment_xb_log_paper(theta), e_xb_log));
  out.push_back(make_record("E[x^b log^2 x]", moment_xb_log2_paper(theta), e_xb_log2));
  out.push_back(make_record("Gumbel E[xi]", link.mean_xi, e_log, "xi = log x"));
  out.push_back(make_record("Gumbel Var[xi]", link.var_xi, e_log2 - e_log * e_log, "xi = log x"));
  return out;
}

/// Metric entries (published vs -E[Hessian]) followed by the moment audit.
inline std::vector<VerificationRecord> compare_metrics(const ThetaPoint& theta, const QuadratureConfig& cfg = {}) {
  const MetricTensor2 paper = metric_paper(theta);
  const MetricTensor2 oracle = metric_numeric_hessian(theta, cfg);
  std::vector<VerificationRecord> out;
  out.push_back(make_record("g11", paper.g11, oracle.g11));
  out.push_back(make_record("g12", paper.g12, oracle.g12));
  out.push_back(make_record("g22", paper.g22, oracle.g22, kRho2ReadingNote));
  for (auto& record : compare_moments(theta, cfg)) out.push_back(std::move(record));
  return out;
}

}  // namespace wbg
