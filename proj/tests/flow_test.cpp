#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "wbg/flow.hpp"

namespace {

using wbg::SignMode;
using wbg::ThetaPoint;
using wbg::XPolicy;

// Matrix route: (1/A) adj(H) grad Phi, assembled independently of evaluate_field.
std::array<double, 2> adjugate_form(const ThetaPoint& theta, double x) {
  const auto d = wbg::potential_derivatives(theta, x, wbg::DiffMode::fixed_x);
  const double A = d.hessian.det();
  const wbg::Sym2 adj{d.hessian.s22, -d.hessian.s12, d.hessian.s11};
  const auto v = adj * d.gradient;
  return {v[0] / A, v[1] / A};
}

TEST(VectorField, MatchesAdjugateForm) {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> par(0.5, 2.5);
  std::uniform_real_distribution<double> xs(0.3, 3.0);
  int checked = 0;
  for (int i = 0; i < 50; ++i) {
    const ThetaPoint theta(par(rng), par(rng));
    const double x = xs(rng);
    std::array<double, 2> ref{};
    try {
      ref = adjugate_form(theta, x);
    } catch (const std::exception&) {
      continue;
    }
    if (std::abs(wbg::potential_derivatives(theta, x, wbg::DiffMode::fixed_x).hessian.det()) < 1e-6) continue;
    const auto v = wbg::vector_field(theta, XPolicy::fixed(x), SignMode::paper);
    const double scale = std::max(1.0, std::max(std::abs(ref[0]), std::abs(ref[1])));
    EXPECT_NEAR(v[0], ref[0], 1e-12 * scale);
    EXPECT_NEAR(v[1], ref[1], 1e-12 * scale);
    const auto w = wbg::vector_field(theta, XPolicy::fixed(x), SignMode::descent);
    EXPECT_EQ(w[0], -v[0]);
    EXPECT_EQ(w[1], -v[1]);
    ++checked;
  }
  EXPECT_GT(checked, 40);
}

TEST(VectorField, PaperFieldSolvesNewtonSystem) {
  // H v = grad Phi for the published sign.
  const auto f = wbg::evaluate_field({1, 1}, XPolicy::fixed(1.0), SignMode::paper);
  const auto hv = f.hessian * f.velocity;
  EXPECT_NEAR(hv[0], f.gradient[0], 1e-13);
  EXPECT_NEAR(hv[1], f.gradient[1], 1e-13);
  EXPECT_NEAR(f.det_a, 3.5 * 0.5 - 4.0, 1e-13);
}

TEST(VectorField, SingularHessianThrows) {
  EXPECT_THROW(wbg::evaluate_field({1, 1e-7}, XPolicy::fixed(1.0), SignMode::descent), wbg::SingularityError);
}

TEST(VectorField, ResolveRootUsesConstraintRoot) {
  const auto f = wbg::evaluate_field({1, 1}, XPolicy::resolve_root(), SignMode::descent);
  EXPECT_NEAR(f.x, 1.3785019004884524, 1e-11);
  const auto g = wbg::evaluate_field({1, 1}, XPolicy::resolve_root(1.3), SignMode::descent);
  EXPECT_NEAR(g.x, f.x, 1e-11);
}

TEST(IntegrateFlow, DescentIsNonIncreasingFromUnitTheta) {
  const auto tr = wbg::integrate_flow({1, 1}, XPolicy::fixed(1.0), SignMode::descent, 1.0, {1e-3, 1e-12});
  ASSERT_FALSE(tr.abort_reason.has_value()) << *tr.abort_reason;
  ASSERT_EQ(tr.states.size(), 1001u);
  EXPECT_NEAR(tr.states.back().t, 1.0, 1e-12);
  EXPECT_DOUBLE_EQ(tr.states.front().phi, 0.25);
  const auto rep = wbg::lyapunov_report(tr);
  EXPECT_LE(rep.max_upward_jump, 1e-8);
  EXPECT_LE(rep.max_upward_jump_pd, 1e-8);
  for (const double r : rep.dphi_dt) EXPECT_LE(r, 1e-8);
  EXPECT_LT(tr.states.back().phi, tr.states.front().phi);
}

TEST(IntegrateFlow, HessianIndefiniteAlongUnitThetaTrajectory) {
  // The potential is not convex here, so the "while H is PD" clause never applies.
  const auto tr = wbg::integrate_flow({1, 1}, XPolicy::fixed(1.0), SignMode::descent, 1.0, {1e-2, 1e-12});
  EXPECT_EQ(wbg::lyapunov_report(tr).pd_fraction, 0.0);
}

TEST(IntegrateFlow, Rk4RichardsonOrder) {
  auto end_at = [](double h) {
    const auto tr = wbg::integrate_flow({1, 1}, XPolicy::fixed(1.0), SignMode::descent, 0.5, {h, 1e-12});
    EXPECT_FALSE(tr.abort_reason.has_value());
    return tr.states.back().theta;
  };
  const ThetaPoint y1 = end_at(0.1), y2 = end_at(0.05), y3 = end_at(0.025);
  const double e12 = std::hypot(y1.a() - y2.a(), y1.b() - y2.b());
  const double e23 = std::hypot(y2.a() - y3.a(), y2.b() - y3.b());
  const double order = std::log2(e12 / e23);
  EXPECT_GE(order, 3.5) << order;
}

TEST(IntegrateFlow, Deterministic) {
  const auto a = wbg::integrate_flow({1.2, 0.8}, XPolicy::fixed(1.0), SignMode::descent, 0.3, {1e-2, 1e-12});
  const auto b = wbg::integrate_flow({1.2, 0.8}, XPolicy::fixed(1.0), SignMode::descent, 0.3, {1e-2, 1e-12});
  ASSERT_EQ(a.states.size(), b.states.size());
  for (std::size_t i = 0; i < a.states.size(); ++i) {
    EXPECT_EQ(a.states[i].t, b.states[i].t);
    EXPECT_EQ(a.states[i].theta, b.states[i].theta);
    EXPECT_EQ(a.states[i].phi, b.states[i].phi);
  }
}

TEST(IntegrateFlow, LastStepClippedToHorizon) {
  const auto tr = wbg::integrate_flow({1, 1}, XPolicy::fixed(1.0), SignMode::descent, 0.25, {0.1, 1e-12});
  ASSERT_EQ(tr.states.size(), 4u);
  EXPECT_NEAR(tr.states.back().t, 0.25, 1e-15);
}

TEST(IntegrateFlow, AbortsOnSingularStart) {
  const auto tr = wbg::integrate_flow({1, 1e-7}, XPolicy::fixed(1.0), SignMode::descent, 1.0);
  ASSERT_TRUE(tr.abort_reason.has_value());
  EXPECT_TRUE(tr.states.empty());
}

TEST(IntegrateFlow, RejectsBadArguments) {
  EXPECT_THROW(wbg::integrate_flow({1, 1}, XPolicy::fixed(1.0), SignMode::descent, 0.0), wbg::DomainError);
  EXPECT_THROW(wbg::integrate_flow({1, 1}, XPolicy::fixed(1.0), SignMode::descent, 1.0, {0.0, 1e-12}),
               wbg::DomainError);
}

TEST(IntegrateFlow, ResolveRootTracksConstraint) {
  const auto tr = wbg::integrate_flow({1, 1}, XPolicy::resolve_root(), SignMode::descent, 0.05, {1e-2, 1e-12});
  ASSERT_FALSE(tr.states.empty());
  for (const auto& s : tr.states) EXPECT_LE(std::abs(wbg::constraint_residual(s.theta, s.x)), 1e-12);
}

TEST(Lyapunov, ReportOnSyntheticTrajectory) {
  wbg::FlowTrajectory tr;
  tr.states.push_back({0.0, {1, 1}, 1.0, 1.0, true});
  tr.states.push_back({0.5, {1, 1}, 1.5, 1.0, false});
  tr.states.push_back({1.0, {1, 1}, 0.5, 1.0, true});
  const auto rep = wbg::lyapunov_report(tr);
  EXPECT_DOUBLE_EQ(rep.max_upward_jump, 0.5);
  EXPECT_DOUBLE_EQ(rep.max_upward_jump_pd, 0.0);
  EXPECT_DOUBLE_EQ(rep.pd_fraction, 2.0 / 3.0);
  ASSERT_EQ(rep.dphi_dt.size(), 2u);
  EXPECT_DOUBLE_EQ(rep.dphi_dt[0], 1.0);
  EXPECT_THROW(wbg::lyapunov_report(wbg::FlowTrajectory{}), wbg::DomainError);
}

}  // namespace
