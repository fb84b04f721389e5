#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "wbg/fisher.hpp"
#include "wbg/flow.hpp"
#include "wbg/logit.hpp"
#include "wbg/quadrature.hpp"
#include "wbg/verification.hpp"
#include "wbg/weibull.hpp"

namespace wbg {

inline constexpr const char* kVersion = "1.0.0";

struct MonteCarloConfig {
  std::uint64_t seed = 20240611;
  std::size_t n = 100000;
};

struct FlowConfig {
  double t_end = 1.0;
  double step = 1e-3;
  SignMode sign_mode = SignMode::descent;
  XPolicy x_policy = XPolicy::fixed(1.0);
};

struct RunConfig {
  std::vector<ThetaPoint> theta_grid;
  QuadratureConfig quadrature;
  MonteCarloConfig mc;
  FlowConfig flow;
  double potential_x = 1.0;  // x used by the potential audits that do not solve the constraint
  DiffMode mode = DiffMode::fixed_x;
  std::string output_path;

  static std::vector<ThetaPoint> default_grid() {
    std::vector<ThetaPoint> grid;
    for (double a : {0.5, 1.0, 2.0}) {
      for (double b : {0.5, 1.0, 2.0, 4.0}) grid.emplace_back(a, b);
    }
    return grid;
  }

  static RunConfig defaults() {
    RunConfig cfg;
    cfg.theta_grid = default_grid();
    return cfg;
  }
};

// ---------------------------------------------------------------------------
// Formatting and config (de)serialisation
// ---------------------------------------------------------------------------

/// Fixed 17 significant digits, enough to round-trip any double.
inline std::string format_double17(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

inline std::uint64_t fnv1a64(const std::string& text) {
  std::uint64_t hash = 14695981039346656037ull;
  for (const unsigned char c : text) {
    hash ^= c;
    hash *= 1099511628211ull;
  }
  return hash;
}

inline SignMode parse_sign_mode(const std::string& s) {
  if (s == "paper") return SignMode::paper;
  if (s == "descent") return SignMode::descent;
  throw DomainError("unknown sign mode '" + s + "' (expected paper|descent)");
}

inline DiffMode parse_diff_mode(const std::string& s) {
  if (s == "fixed" || s == "fixed_x") return DiffMode::fixed_x;
  if (s == "total" || s == "total_derivative") return DiffMode::total_derivative;
  throw DomainError("unknown differentiation mode '" + s + "' (expected fixed|total)");
}

inline nlohmann::json config_to_json(const RunConfig& cfg) {
  nlohmann::json grid = nlohmann::json::array();
  for (const auto& t : cfg.theta_grid) grid.push_back({t.a(), t.b()});
  nlohmann::json flow = {{"t_end", cfg.flow.t_end},
                         {"step", cfg.flow.step},
                         {"sign_mode", to_string(cfg.flow.sign_mode)},
                         {"x_policy", cfg.flow.x_policy.kind == XPolicy::Kind::fixed ? "fixed" : "resolve_root"},
                         {"x", cfg.flow.x_policy.x}};
  return {{"theta_grid", grid},
          {"quadrature",
           {{"rel_tol", cfg.quadrature.rel_tol},
            {"abs_tol", cfg.quadrature.abs_tol},
            {"max_subdivisions", cfg.quadrature.max_subdivisions}}},
          {"mc", {{"seed", cfg.mc.seed}, {"n", cfg.mc.n}}},
          {"flow", flow},
          {"potential_x", cfg.potential_x},
          {"mode", to_string(cfg.mode)},
          {"output_path", cfg.output_path}};
}

/// Missing keys keep their defaults.
inline RunConfig config_from_json(const nlohmann::json& j) {
  RunConfig cfg = RunConfig::defaults();
  if (j.contains("theta_grid")) {
    cfg.theta_grid.clear();
    for (const auto& p : j.at("theta_grid")) cfg.theta_grid.emplace_back(p.at(0).get<double>(), p.at(1).get<double>());
    if (cfg.theta_grid.empty()) throw DomainError("config: theta_grid must not be empty");
  }
  if (j.contains("quadrature")) {
    const auto& q = j.at("quadrature");
    cfg.quadrature.rel_tol = q.value("rel_tol", cfg.quadrature.rel_tol);
    cfg.quadrature.abs_tol = q.value("abs_tol", cfg.quadrature.abs_tol);
    cfg.quadrature.max_subdivisions = q.value("max_subdivisions", cfg.quadrature.max_subdivisions);
    cfg.quadrature.validate();
  }
  if (j.contains("mc")) {
    cfg.mc.seed = j.at("mc").value("seed", cfg.mc.seed);
    cfg.mc.n = j.at("mc").value("n", cfg.mc.n);
  }
  if (j.contains("flow")) {
    const auto& f = j.at("flow");
    cfg.flow.t_end = f.value("t_end", cfg.flow.t_end);
    cfg.flow.step = f.value("step", cfg.flow.step);
    cfg.flow.sign_mode = parse_sign_mode(f.value("sign_mode", std::string(to_string(cfg.flow.sign_mode))));
    const std::string policy = f.value("x_policy", std::string("fixed"));
    const double x = f.value("x", cfg.flow.x_policy.x);
    if (policy == "fixed") {
      cfg.flow.x_policy = XPolicy::fixed(x);
    } else if (policy == "resolve_root") {
      cfg.flow.x_policy = XPolicy::resolve_root(x);
    } else {
      throw DomainError("config: unknown x_policy '" + policy + "'");
    }
  }
  cfg.potential_x = j.value("potential_x", cfg.potential_x);
  if (j.contains("mode")) cfg.mode = parse_diff_mode(j.at("mode").get<std::string>());
  cfg.output_path = j.value("output_path", cfg.output_path);
  return cfg;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
  return config_from_json(nlohmann::json::parse(in));
}

inline std::string config_hash(const RunConfig& cfg) {
  char buf[17];
  const auto res = std::to_chars(buf, buf + sizeof buf, fnv1a64(config_to_json(cfg).dump()), 16);
  return std::string(buf, res.ptr);
}

inline nlohmann::json finite_or_null(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(); }

inline nlohmann::json record_to_json(const ThetaPoint& theta, const VerificationRecord& r) {
  return {{"theta", {theta.a(), theta.b()}},
          {"name", r.name},
          {"paper_value", finite_or_null(r.paper_value)},
          {"oracle_value", finite_or_null(r.oracle_value)},
          {"abs_diff", finite_or_null(r.abs_diff)},
          {"rel_diff", finite_or_null(r.rel_diff)},
          {"note", r.note}};
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

/// Names of the audited formulas, one record each per grid point, in report order.
inline const std::vector<std::string>& audited_formulas() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v = {"E[log x]",
                                  "E[x^b log x]",
                                  "E[x^b log^2 x]",
                                  "E[x^b]",
                                  "E[x^b] (Monte Carlo)",
                                  "G*Ginv-I",
                                  "Gumbel E[xi]",
                                  "Gumbel Var[xi]",
                                  "Legendre_residual",
                                  "Phi_closed_vs_integral",
                                  "Phi_closed_vs_integral@root",
                                  "g11",
                                  "g12",
                                  "g22",
                                  "integrability_residual",
                                  "logit_I*Iinv-I",
                                  "logit_score_coincidence@root"};
    std::sort(v.begin(), v.end());
    return v;
  }();
  return names;
}

namespace detail {

inline VerificationRecord failed_record(std::string name, const std::exception& e) {
  const double nan = std::nan("");
  return {std::move(name), nan, nan, nan, nan, std::string("error: ") + e.what()};
}

// Runs `make`, turning an exception into a record that carries the message.
template <class Make>
void audit(std::vector<VerificationRecord>& out, const std::string& name, Make&& make) {
  try {
    out.push_back(make());
  } catch (const std::exception& e) {
    out.push_back(failed_record(name, e));
  }
}

}  // namespace detail

/// Every audited formula at one grid point, sorted by name.
inline std::vector<VerificationRecord> verify_point(const ThetaPoint& theta, const RunConfig& cfg) {
  std::vector<VerificationRecord> out;
  const char* metric_names[] = {"g11", "g12", "g22"};
  try {
    const MetricTensor2 paper = metric_paper(theta);
    const MetricTensor2 oracle = metric_numeric_hessian(theta, cfg.quadrature);
    out.push_back(make_record("g11", paper.g11, oracle.g11));
    out.push_back(make_record("g12", paper.g12, oracle.g12));
    out.push_back(make_record("g22", paper.g22, oracle.g22, kRho2ReadingNote));
  } catch (const std::exception& e) {
    for (const char* n : metric_names) out.push_back(detail::failed_record(n, e));
  }
  try {
    for (auto& r : compare_moments(theta, cfg.quadrature)) out.push_back(std::move(r));
  } catch (const std::exception& e) {
    for (const char* n : {"E[x^b]", "E[log x]", "E[x^b log x]", "E[x^b log^2 x]", "Gumbel E[xi]", "Gumbel Var[xi]"}) {
      out.push_back(detail::failed_record(n, e));
    }
  }
  detail::audit(out, "E[x^b] (Monte Carlo)", [&] {
    const double b = theta.b();
    const OracleValue mc =
        expectation_montecarlo(theta, [b](double x) { return std::pow(x, b); }, cfg.mc.seed, cfg.mc.n);
    return make_record("E[x^b] (Monte Carlo)", moment_xb(theta), mc.value,
                       "stderr=" + format_double17(mc.error_estimate) + " n=" + std::to_string(cfg.mc.n));
  });
  detail::audit(out, "G*Ginv-I", [&] {
    return make_record("G*Ginv-I", verify_inverse(theta), 0.0, std::string("printed inverse; ") + kRho2ReadingNote);
  });
  detail::audit(out, "integrability_residual", [&] {
    return make_record("integrability_residual", integrability_residual(theta), 0.0,
                       "dg11/db - dg12/da; nonzero means no potential in (a,b)");
  });
  const std::string at_x = "x=" + format_double17(cfg.potential_x);
  detail::audit(out, "Phi_closed_vs_integral", [&] {
    return make_record("Phi_closed_vs_integral", potential_closed(theta, cfg.potential_x),
                       potential_integral(theta, cfg.potential_x), at_x);
  });
  detail::audit(out, "Legendre_residual", [&] {
    return make_record("Legendre_residual", dual_potential(theta, cfg.potential_x, cfg.mode).legendre_residual, 0.0,
                       at_x + " mode=" + to_string(cfg.mode));
  });
  detail::audit(out, "logit_I*Iinv-I", [&] {
    const LogitInformation info = logit_information(theta, cfg.potential_x, cfg.mode);
    return make_record("logit_I*Iinv-I", (info.information * info.information_inverse).max_abs_deviation_from_identity(),
                       0.0, at_x + " mode=" + to_string(cfg.mode) + " detA=" + format_double17(info.det_a));
  });
  detail::audit(out, "Phi_closed_vs_integral@root", [&] {
    const ConstraintRoot root = solve_constraint(theta);
    return make_record("Phi_closed_vs_integral@root", potential_closed(theta, root.x), potential_integral(theta, root.x),
                       "x*=" + format_double17(root.x));
  });
  detail::audit(out, "logit_score_coincidence@root", [&] {
    const ConstraintRoot root = solve_constraint(theta);
    const ScoreVector s = logit_score(theta, root.x);
    return make_record("logit_score_coincidence@root", s.d_a, s.d_b,
                       "paper_value=dlogp/da, oracle_value=dlogp/db at x*=" + format_double17(root.x));
  });
  std::sort(out.begin(), out.end(), [](const auto& l, const auto& r) { return l.name < r.name; });
  return out;
}

/// Report {meta: {version, config_hash}, records: [...]}, records ordered by
/// grid point (a, then b) and then by formula name.
inline nlohmann::json cmd_verify(const RunConfig& cfg) {
  std::vector<ThetaPoint> grid = cfg.theta_grid;
  std::sort(grid.begin(), grid.end(),
            [](const ThetaPoint& l, const ThetaPoint& r) { return std::pair(l.a(), l.b()) < std::pair(r.a(), r.b()); });
  nlohmann::json records = nlohmann::json::array();
  for (const auto& theta : grid) {
    for (const auto& r : verify_point(theta, cfg)) records.push_back(record_to_json(theta, r));
  }
  return {{"meta", {{"version", kVersion}, {"config_hash", config_hash(cfg)}}}, {"records", records}};
}

// ---------------------------------------------------------------------------
// metric, constraint, potential, flow
// ---------------------------------------------------------------------------

inline nlohmann::json tensor_to_json(const MetricTensor2& g) {
  const auto ev = g.matrix().eigenvalues();
  return {{"source", to_string(g.source)},
          {"g11", g.g11},
          {"g12", g.g12},
          {"g22", g.g22},
          {"eigenvalues", {ev[0], ev[1]}},
          {"positive_definite", g.matrix().is_positive_definite()}};
}

inline nlohmann::json cmd_metric(const RunConfig& cfg, const ThetaPoint& theta) {
  nlohmann::json tensors = nlohmann::json::array();
  tensors.push_back(tensor_to_json(metric_paper(theta)));
  const std::pair<MetricSource, std::function<MetricTensor2()>> oracles[] = {
      {MetricSource::numeric_hessian, [&] { return metric_numeric_hessian(theta, cfg.quadrature); }},
      {MetricSource::numeric_outer, [&] { return metric_numeric_outer(theta, cfg.quadrature); }}};
  for (const auto& [source, compute] : oracles) {
    try {
      tensors.push_back(tensor_to_json(compute()));
    } catch (const std::exception& e) {
      tensors.push_back({{"source", to_string(source)}, {"error", e.what()}});
    }
  }
  nlohmann::json inverse;
  try {
    inverse = tensor_to_json(metric_paper_inverse(theta));
    inverse["source"] = "paper_closed_form_inverse";
    inverse["product_deviation"] = verify_inverse(theta);
  } catch (const std::exception& e) {
    inverse = {{"source", "paper_closed_form_inverse"}, {"error", e.what()}};
  }
  return {{"theta", {theta.a(), theta.b()}}, {"tensors", tensors}, {"paper_inverse", inverse}, {"note", kRho2ReadingNote}};
}

/// Root record, or {error: "no_bracket", ...} when the window holds no sign change.
inline nlohmann::json cmd_constraint(const ThetaPoint& theta, SearchWindow window = {}, double tol = 1e-12) {
  nlohmann::json out = {{"theta", {theta.a(), theta.b()}}, {"window", {window.lo, window.hi}}};
  try {
    const ConstraintRoot root = solve_constraint(theta, window, tol);
    out["x"] = root.x;
    out["residual"] = root.residual;
    out["bracket"] = {root.lo, root.hi};
  } catch (const BracketError& e) {
    out["error"] = "no_bracket";
    out["message"] = e.what();
  }
  return out;
}

/// Phi, dual coordinates, dual potential and information matrix at (theta, x);
/// x defaults to the solved constraint root.
inline nlohmann::json cmd_potential(const RunConfig& cfg, const ThetaPoint& theta, std::optional<double> x = {}) {
  const double xv = x ? *x : solve_constraint(theta).x;
  const PotentialEval pe = dual_potential(theta, xv, cfg.mode);
  nlohmann::json out = {{"theta", {theta.a(), theta.b()}},
                        {"x", xv},
                        {"mode", to_string(pe.mode)},
                        {"phi", pe.phi},
                        {"phi_integral", potential_integral(theta, xv)},
                        {"eta", {pe.eta1, pe.eta2}},
                        {"psi", pe.psi},
                        {"legendre_residual", pe.legendre_residual}};
  try {
    const LogitInformation info = logit_information(theta, xv, cfg.mode);
    out["hessian"] = {info.hessian.s11, info.hessian.s12, info.hessian.s22};
    out["information"] = {info.information.s11, info.information.s12, info.information.s22};
    out["information_inverse"] = {info.information_inverse.s11, info.information_inverse.s12,
                                  info.information_inverse.s22};
    out["det_a"] = info.det_a;
    out["hessian_positive_definite"] = info.hessian_positive_definite;
  } catch (const SingularityError& e) {
    out["information_error"] = e.what();
  }
  return out;
}

/// CSV with header "t,a,b,phi"; a trailing "# aborted: ..." line marks a partial run.
inline std::string trajectory_csv(const FlowTrajectory& trajectory) {
  std::ostringstream os;
  os << "t,a,b,phi\n";
  for (const auto& s : trajectory.states) {
    os << format_double17(s.t) << ',' << format_double17(s.theta.a()) << ',' << format_double17(s.theta.b()) << ','
       << format_double17(s.phi) << '\n';
  }
  if (trajectory.abort_reason) os << "# aborted: " << *trajectory.abort_reason << '\n';
  return os.str();
}

inline FlowTrajectory run_flow(const RunConfig& cfg, const ThetaPoint& theta0) {
  return integrate_flow(theta0, cfg.flow.x_policy, cfg.flow.sign_mode, cfg.flow.t_end, {cfg.flow.step, 1e-12},
                        cfg.mode);
}

inline std::string cmd_flow(const RunConfig& cfg, const ThetaPoint& theta0) {
  return trajectory_csv(run_flow(cfg, theta0));
}

}  // namespace wbg
