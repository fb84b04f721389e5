#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "wbg/finite_diff.hpp"
#include "wbg/quadrature.hpp"
#include "wbg/weibull.hpp"

namespace {

using wbg::ThetaPoint;

constexpr double kE = std::numbers::e;
constexpr double kPi2 = std::numbers::pi * std::numbers::pi;

// Grid used by the family-wide invariants.
std::vector<ThetaPoint> grid() {
  std::vector<ThetaPoint> g;
  for (double a : {0.5, 1.0, 2.0}) {
    for (double b : {0.5, 1.0, 2.0, 4.0}) g.emplace_back(a, b);
  }
  return g;
}

TEST(ThetaPoint, RejectsNonPositiveAndNonFinite) {
  EXPECT_THROW(ThetaPoint(0.0, 1.0), wbg::DomainError);
  EXPECT_THROW(ThetaPoint(1.0, -2.0), wbg::DomainError);
  EXPECT_THROW(ThetaPoint(std::nan(""), 1.0), wbg::DomainError);
  EXPECT_THROW(ThetaPoint(1.0, INFINITY), wbg::DomainError);
  EXPECT_NO_THROW(ThetaPoint(1e-8, 1e8));
}

TEST(Pdf, SpotValues) {
  EXPECT_NEAR(wbg::pdf({1, 1}, 1.0), std::exp(-1.0), 1e-15);
  EXPECT_NEAR(wbg::pdf({1, 2}, 1.0), 2.0 * std::exp(-1.0), 1e-15);
  EXPECT_THROW(wbg::pdf({1, 1}, 0.0), wbg::DomainError);
  EXPECT_THROW(wbg::pdf({1, 1}, -1.0), wbg::DomainError);
}

TEST(Pdf, IntegratesToOneOnGrid) {
  EXPECT_NEAR(wbg::integrate_halfline([](double x) { return wbg::pdf({2, 3}, x); }).value, 1.0, 1e-10);
  for (const auto& theta : grid()) {
    const auto mass = wbg::expectation_quadrature(theta, [](double) { return 1.0; });
    EXPECT_NEAR(mass.value, 1.0, 1e-10) << theta.a() << "," << theta.b();
  }
}

TEST(LogLikelihood, SpotValuesAndConsistencyWithPdf) {
  EXPECT_DOUBLE_EQ(wbg::log_likelihood({1, 1}, 1.0), -1.0);
  EXPECT_NEAR(wbg::log_likelihood({1, 1}, kE), -kE, 1e-15);
  EXPECT_NEAR(wbg::log_likelihood({2, 2}, 1.0), std::log(wbg::pdf({2, 2}, 1.0)), 1e-12);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> par(0.2, 5.0);
  std::uniform_real_distribution<double> xs(0.05, 4.0);
  for (int i = 0; i < 50; ++i) {
    const ThetaPoint theta(par(rng), par(rng));
    const double x = xs(rng);
    const double p = wbg::pdf(theta, x);
    if (p < 1e-200) continue;
    EXPECT_NEAR(wbg::log_likelihood(theta, x), std::log(p), 1e-12 * std::max(1.0, std::abs(std::log(p))));
  }
  EXPECT_THROW(wbg::log_likelihood({1, 1}, 0.0), wbg::DomainError);
}

TEST(Score, SpotValues) {
  const auto s1 = wbg::score({1, 1}, 1.0);
  EXPECT_DOUBLE_EQ(s1.d_a, 0.0);
  EXPECT_DOUBLE_EQ(s1.d_b, 1.0);
  const auto s2 = wbg::score({1, 1}, kE);
  EXPECT_NEAR(s2.d_a, kE - 1.0, 1e-14);
  EXPECT_NEAR(s2.d_b, 2.0 - kE, 1e-14);
  EXPECT_THROW(wbg::score({1, 1}, -3.0), wbg::DomainError);
}

TEST(Score, MatchesFiniteDifferencesOfLogLikelihood) {
  auto check = [](const ThetaPoint& theta, double x) {
    const auto fd = wbg::finite_diff_gradient([x](const ThetaPoint& t) { return wbg::log_likelihood(t, x); }, theta);
    const auto s = wbg::score(theta, x);
    EXPECT_NEAR(s.d_a, fd.d_a, 1e-6 * std::max(1.0, std::abs(fd.d_a)));
    EXPECT_NEAR(s.d_b, fd.d_b, 1e-6 * std::max(1.0, std::abs(fd.d_b)));
  };
  check({1.3, 0.8}, 2.1);
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> par(0.3, 3.0);
  std::uniform_real_distribution<double> xs(0.1, 3.0);
  for (int i = 0; i < 50; ++i) check({par(rng), par(rng)}, xs(rng));
}

TEST(LogLikelihoodHessian, SpotValues) {
  const auto h = wbg::log_likelihood_hessian({1, 1}, 1.0);
  EXPECT_DOUBLE_EQ(h.h_aa, -1.0);
  EXPECT_DOUBLE_EQ(h.h_bb, -1.0);
  EXPECT_THROW(wbg::log_likelihood_hessian({1, 1}, 0.0), wbg::DomainError);
}

TEST(LogLikelihoodHessian, MatchesFiniteDifferenceHessian) {
  auto check = [](const ThetaPoint& theta, double x) {
    const auto fd = wbg::finite_diff_hessian([x](const ThetaPoint& t) { return wbg::log_likelihood(t, x); }, theta);
    const auto h = wbg::log_likelihood_hessian(theta, x);
    EXPECT_NEAR(h.h_aa, fd.hessian.s11, 1e-5 * std::max(1.0, std::abs(h.h_aa)));
    EXPECT_NEAR(h.h_ab, fd.hessian.s12, 1e-5 * std::max(1.0, std::abs(h.h_ab)));
    EXPECT_NEAR(h.h_bb, fd.hessian.s22, 1e-5 * std::max(1.0, std::abs(h.h_bb)));
  };
  check({0.9, 1.4}, 1.7);
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> par(0.3, 3.0);
  std::uniform_real_distribution<double> xs(0.1, 3.0);
  for (int i = 0; i < 50; ++i) check({par(rng), par(rng)}, xs(rng));
}

TEST(Moments, XbClosedForm) {
  EXPECT_DOUBLE_EQ(wbg::moment_xb({2, 3}), 8.0);
  EXPECT_DOUBLE_EQ(wbg::moment_xb({1, 1}), 1.0);
  const ThetaPoint theta(1.5, 2.5);
  const auto q = wbg::expectation_quadrature(theta, [](double x) { return std::pow(x, 2.5); });
  EXPECT_NEAR(q.value, std::pow(1.5, 2.5), 1e-8);
  EXPECT_NEAR(std::pow(1.5, 2.5), 2.7556760, 1e-7);
}

TEST(Moments, PaperFormulasBySubstitution) {
  const double k = wbg::kEuler;
  EXPECT_NEAR(wbg::moment_log_paper({1, 1}), -k, 1e-15);
  EXPECT_NEAR(wbg::moment_log_paper({1, 2}), 1.0 - 2.0 * k, 1e-15);
  EXPECT_NEAR(wbg::moment_xb_log_paper({1, 1}), 1.0 - k, 1e-15);
  // 2 - 4 + 2(1 - k) + 4 log 2
  EXPECT_NEAR(wbg::moment_xb_log_paper({2, 1}), -2.0 + 2.0 * (1.0 - k) + 4.0 * std::log(2.0), 1e-14);
  EXPECT_NEAR(wbg::moment_xb_log_paper({2, 1}), 1.6181573924367, 1e-12);
  EXPECT_NEAR(wbg::moment_xb_log2_paper({1, 1}), kPi2 / 6.0 + k * k, 1e-14);
  EXPECT_NEAR(wbg::moment_xb_log2_paper({1, 2}), 3.3017926515088245, 1e-14);
}

// Oracle values frozen from an independent 30-digit quadrature.
TEST(Moments, PaperFormulasAgainstQuadrature) {
  const double k = wbg::kEuler;
  const auto e_log = [](const ThetaPoint& t) {
    return wbg::expectation_quadrature(t, [](double x) { return std::log(x); }).value;
  };
  EXPECT_NEAR(e_log({1, 1}), -k, 1e-10);
  EXPECT_NEAR(wbg::moment_log_paper({1, 1}) - e_log({1, 1}), 0.0, 1e-10);
  EXPECT_NEAR(e_log({1, 2}), -0.28860783245076643, 1e-10);
  // Off (1, 1) the published E[log x] disagrees with the integral.
  EXPECT_GT(std::abs(wbg::moment_log_paper({1, 2}) - e_log({1, 2})), 0.1);

  const auto e_xlog = wbg::expectation_quadrature({1, 1}, [](double x) { return x * std::log(x); }).value;
  EXPECT_NEAR(e_xlog, 1.0 - k, 1e-10);
  EXPECT_NEAR(wbg::moment_xb_log_paper({1, 1}), e_xlog, 1e-10);

  const auto e_xlog2 = wbg::expectation_quadrature({1, 1}, [](double x) { return x * std::log(x) * std::log(x); }).value;
  EXPECT_NEAR(e_xlog2, 0.82368066085287939, 1e-10);
  EXPECT_NEAR(e_xlog2, k * k - 2.0 * k + kPi2 / 6.0, 1e-10);
  EXPECT_GT(wbg::moment_xb_log2_paper({1, 1}) - e_xlog2, 1.0);
}

TEST(Moments, ScoreHasZeroMeanAndLn1HoldsForOracleValues) {
  for (const auto& theta : grid()) {
    const auto ea = wbg::expectation_quadrature(theta, [&](double x) { return wbg::score(theta, x).d_a; });
    const auto eb = wbg::expectation_quadrature(theta, [&](double x) { return wbg::score(theta, x).d_b; });
    EXPECT_NEAR(ea.value, 0.0, 1e-8);
    EXPECT_NEAR(eb.value, 0.0, 1e-8);

    const double b = theta.b();
    const double ab = std::pow(theta.a(), b);
    const double e_xb_log = wbg::expectation_quadrature(theta, [b](double x) { return std::pow(x, b) * std::log(x); }).value;
    const double e_log = wbg::expectation_quadrature(theta, [](double x) { return std::log(x); }).value;
    EXPECT_NEAR(e_xb_log - ab / b - ab * e_log, 0.0, 1e-8 * std::max(1.0, ab)) << theta.a() << "," << b;
  }
}

TEST(GumbelLink, SpotValues) {
  const double k = wbg::kEuler;
  const auto g11 = wbg::gumbel_link({1, 1});
  EXPECT_NEAR(g11.mean_xi, -k, 1e-15);
  EXPECT_NEAR(g11.var_xi, kPi2 / 6.0, 1e-15);
  EXPECT_NEAR(g11.var_xi, 1.6449341, 1e-7);
  const auto g21 = wbg::gumbel_link({2, 1});
  EXPECT_NEAR(g21.mean_xi, -1.0 + (1.0 - k) / 2.0 + std::log(2.0), 1e-15);
  EXPECT_NEAR(g21.mean_xi, -0.0954606518908211, 1e-13);
  for (const auto& theta : grid()) EXPECT_GT(wbg::gumbel_link(theta).var_xi, 0.0);
}

TEST(Sample, DeterministicPerSeed) {
  const auto first = wbg::sample({1, 1}, 99, 5);
  const auto second = wbg::sample({1, 1}, 99, 5);
  EXPECT_EQ(first, second);
  EXPECT_NE(first, wbg::sample({1, 1}, 100, 5));
  for (const double x : first) EXPECT_GT(x, 0.0);
  EXPECT_THROW(wbg::sample({1, 1}, 1, 0), wbg::DomainError);
}

TEST(Sample, MeansWithinThreeStandardErrors) {
  const auto exp_mean = wbg::expectation_montecarlo({1, 1}, [](double x) { return x; }, 2024, 100000);
  EXPECT_LT(std::abs(exp_mean.value - 1.0), 3.0 * exp_mean.error_estimate);
  const auto xb = wbg::expectation_montecarlo({2, 3}, [](double x) { return x * x * x; }, 2025, 100000);
  EXPECT_LT(std::abs(xb.value - wbg::moment_xb({2, 3})), 3.0 * xb.error_estimate);
}

}  // namespace
