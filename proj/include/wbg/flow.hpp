#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "wbg/errors.hpp"
#include "wbg/logit.hpp"
#include "wbg/weibull.hpp"

namespace wbg {

/// paper:   the published system, (1/A) adj(H) grad Phi = H^{-1} grad Phi.
/// descent: -H^{-1} grad Phi, the gradient system with H as metric.
enum class SignMode { paper, descent };

inline const char* to_string(SignMode mode) { return mode == SignMode::paper ? "paper" : "descent"; }

/// Where x comes from when Phi(a, b; x) is differentiated.
struct XPolicy {
  enum class Kind { fixed, resolve_root };
  Kind kind = Kind::fixed;
  double x = 1.0;  // the pinned value, or the last root (bracket centre) when resolving

  static XPolicy fixed(double x) { return {Kind::fixed, x}; }
  static XPolicy resolve_root(double hint = 0.0) { return {Kind::resolve_root, hint}; }
};

struct FieldEval {
  std::array<double, 2> velocity;  // (adot, bdot)
  double x;
  double phi;
  std::array<double, 2> gradient;
  Sym2 hessian;
  double det_a;
};

namespace detail {

inline double policy_x(const ThetaPoint& theta, const XPolicy& policy) {
  if (policy.kind == XPolicy::Kind::fixed) return policy.x;
  if (policy.x > 0.0) {
    try {
      return solve_constraint(theta, {policy.x / 4.0, policy.x * 4.0}).x;
    } catch (const BracketError&) {
      // fall through to the full window
    }
  }
  return solve_constraint(theta).x;
}

}  // namespace detail

/// Field of the gradient system together with the quantities it was built from.
inline FieldEval evaluate_field(const ThetaPoint& theta, const XPolicy& policy, SignMode sign,
                                DiffMode mode = DiffMode::fixed_x) {
  const double x = detail::policy_x(theta, policy);
  const PotentialDerivatives d = potential_derivatives(theta, x, mode);
  const Sym2& h = d.hessian;
  const double det_a = h.s11 * h.s22 - h.s12 * h.s12;
  if (!(std::abs(det_a) > kSingularDeterminant)) {
    throw SingularityError("vector_field: Hessian determinant of the potential vanishes");
  }
  const double phi_a = d.gradient[0];
  const double phi_b = d.gradient[1];
  double adot = (1.0 / det_a) * h.s22 * phi_a - (1.0 / det_a) * h.s12 * phi_b;
  double bdot = -(1.0 / det_a) * h.s12 * phi_a + (1.0 / det_a) * h.s11 * phi_b;
  if (sign == SignMode::descent) {
    adot = -adot;
    bdot = -bdot;
  }
  return {{adot, bdot}, x, d.phi, d.gradient, h, det_a};
}

inline std::array<double, 2> vector_field(const ThetaPoint& theta, const XPolicy& policy,
                                          SignMode sign = SignMode::descent, DiffMode mode = DiffMode::fixed_x) {
  return evaluate_field(theta, policy, sign, mode).velocity;
}

struct FlowState {
  double t;
  ThetaPoint theta;
  double phi;
  double x;
  bool hessian_positive_definite;
};

struct StepStats {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  double min_step = std::numeric_limits<double>::infinity();
};

struct FlowTrajectory {
  std::vector<FlowState> states;
  StepStats step_stats;
  std::optional<std::string> abort_reason;
};

struct StepControl {
  double step = 1e-3;
  double min_step = 1e-12;
};

/// Classical RK4 at a fixed step. A step whose stages leave the positive
/// quadrant, produce non-finite values or hit a singular field is retried at
/// half the size; the nominal step is restored afterwards. A singular field
/// at an accepted state, or a step below min_step, ends the run early with
/// abort_reason set and the partial trajectory kept.
inline FlowTrajectory integrate_flow(const ThetaPoint& theta0, XPolicy policy, SignMode sign, double t_end,
                                     StepControl control = {}, DiffMode mode = DiffMode::fixed_x) {
  if (!(t_end > 0.0)) throw DomainError("integrate_flow: t_end must be > 0");
  if (!(control.step > 0.0) || !(control.min_step > 0.0)) throw DomainError("integrate_flow: steps must be > 0");

  FlowTrajectory out;
  auto record = [&](double t, const ThetaPoint& theta, const FieldEval& f) {
    out.states.push_back({t, theta, f.phi, f.x, f.hessian.is_positive_definite()});
  };

  FieldEval current{};
  try {
    current = evaluate_field(theta0, policy, sign, mode);
  } catch (const std::exception& e) {
    out.abort_reason = std::string("singular field at start: ") + e.what();
    return out;
  }
  double t = 0.0;
  ThetaPoint theta = theta0;
  record(t, theta, current);
  if (policy.kind == XPolicy::Kind::resolve_root) policy.x = current.x;

  const double t_slack = 1e-12 * std::max(1.0, t_end);
  while (t_end - t > t_slack) {
    double h = std::min(control.step, t_end - t);
    std::optional<ThetaPoint> next;
    std::optional<FieldEval> next_field;
    while (!next) {
      if (h < control.min_step) {
        out.abort_reason = "step size underflow below " + std::to_string(control.min_step);
        return out;
      }
      try {
        const auto& k1 = current.velocity;
        auto stage = [&](const std::array<double, 2>& k, double scale) {
          return vector_field(ThetaPoint(theta.a() + scale * k[0], theta.b() + scale * k[1]), policy, sign, mode);
        };
        const auto k2 = stage(k1, 0.5 * h);
        const auto k3 = stage(k2, 0.5 * h);
        const auto k4 = stage(k3, h);
        const double a = theta.a() + h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]);
        const double b = theta.b() + h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]);
        const ThetaPoint candidate(a, b);
        const FieldEval f = evaluate_field(candidate, policy, sign, mode);
        if (!std::isfinite(f.velocity[0]) || !std::isfinite(f.velocity[1]) || !std::isfinite(f.phi)) {
          throw DomainError("non-finite field");
        }
        next = candidate;
        next_field = f;
      } catch (const std::exception&) {
        // DomainError (left the quadrant, non-finite), SingularityError or a
        // failed root solve inside a stage: shrink and retry.
        ++out.step_stats.rejected;
        h *= 0.5;
      }
    }
    t += h;
    theta = *next;
    current = *next_field;
    if (policy.kind == XPolicy::Kind::resolve_root) policy.x = current.x;
    ++out.step_stats.accepted;
    out.step_stats.min_step = std::min(out.step_stats.min_step, h);
    record(t, theta, current);
  }
  return out;
}

struct LyapunovReport {
  double max_upward_jump = 0.0;     // max over steps of max(0, phi[i+1] - phi[i])
  double max_upward_jump_pd = 0.0;  // same, restricted to steps with H positive definite at both ends
  double pd_fraction = 0.0;         // fraction of states with H positive definite
  std::vector<double> dphi_dt;      // finite-difference rate per step
};

inline LyapunovReport lyapunov_report(const FlowTrajectory& trajectory) {
  const auto& s = trajectory.states;
  if (s.empty()) throw DomainError("lyapunov_report: empty trajectory");
  LyapunovReport out;
  std::size_t pd = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i].hessian_positive_definite) ++pd;
    if (i + 1 == s.size()) break;
    const double jump = s[i + 1].phi - s[i].phi;
    out.max_upward_jump = std::max(out.max_upward_jump, jump);
    if (s[i].hessian_positive_definite && s[i + 1].hessian_positive_definite) {
      out.max_upward_jump_pd = std::max(out.max_upward_jump_pd, jump);
    }
    out.dphi_dt.push_back(jump / (s[i + 1].t - s[i].t));
  }
  out.pd_fraction = static_cast<double>(pd) / static_cast<double>(s.size());
  return out;
}

}  // namespace wbg
