// Command-line front end for the Weibull information-geometry toolkit.
//
//   wbg verify     [--config F] [--out F] [--seed N] [--mode fixed|total]
//   wbg metric     --theta a,b
//   wbg constraint --theta a,b [--window lo,hi] [--tol T]
//   wbg potential  --theta a,b [--x X] [--mode fixed|total]
//   wbg flow       --theta a,b [--sign paper|descent] [--t-end T] [--step H] [--x X | --resolve-root]
//
// JSON goes to --out (or the config's output_path, or stdout); flow writes CSV.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "wbg/report.hpp"

namespace {

std::pair<double, double> parse_pair(const std::string& text, const char* what) {
  std::istringstream is(text);
  double first = 0.0;
  double second = 0.0;
  char comma = 0;
  if (!(is >> first >> comma >> second) || comma != ',' || !(is >> std::ws).eof()) {
    throw CLI::ValidationError(what, "expected two comma-separated numbers, got '" + text + "'");
  }
  return {first, second};
}

void emit(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << text;
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Weibull statistical manifold: formula audits, metrics, potential and gradient flow"};
  app.require_subcommand(1);

  std::string config_path;
  std::string theta_text = "1,1";
  std::string out_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> mode_text;
  std::optional<std::string> sign_text;
  app.add_option("--config", config_path, "JSON run configuration")->check(CLI::ExistingFile);
  app.add_option("--theta", theta_text, "parameter point a,b (scale,shape)");
  app.add_option("--out", out_path, "output file (default: stdout)");
  app.add_option("--seed", seed, "Monte Carlo seed");
  app.add_option("--mode", mode_text, "differentiation mode: fixed|total");
  app.add_option("--sign", sign_text, "flow sign: paper|descent");

  auto* verify = app.add_subcommand("verify", "audit every published formula over the theta grid");
  auto* metric = app.add_subcommand("metric", "closed-form and numeric Fisher metrics at --theta");
  auto* flow = app.add_subcommand("flow", "integrate the gradient system from --theta (CSV t,a,b,phi)");
  auto* constraint = app.add_subcommand("constraint", "solve the constraint on x at --theta");
  auto* potential = app.add_subcommand("potential", "potential, dual coordinates and Legendre residual");

  std::optional<double> flow_t_end;
  std::optional<double> flow_step;
  std::optional<double> flow_x;
  bool resolve_root = false;
  flow->add_option("--t-end", flow_t_end, "integration horizon");
  flow->add_option("--step", flow_step, "RK4 step");
  flow->add_option("--x", flow_x, "pin x to this value");
  flow->add_flag("--resolve-root", resolve_root, "re-solve the constraint for x at every evaluation");

  std::string window_text = "0.001,1000";
  double tol = 1e-12;
  constraint->add_option("--window", window_text, "search window lo,hi");
  constraint->add_option("--tol", tol, "residual tolerance");

  std::optional<double> potential_x;
  potential->add_option("--x", potential_x, "evaluation point x (default: constraint root)");

  for (auto* sub : {verify, metric, flow, constraint, potential}) sub->fallthrough();

  CLI11_PARSE(app, argc, argv);

  try {
    wbg::RunConfig cfg = config_path.empty() ? wbg::RunConfig::defaults() : wbg::load_config(config_path);
    if (seed) cfg.mc.seed = *seed;
    if (mode_text) cfg.mode = wbg::parse_diff_mode(*mode_text);
    if (sign_text) cfg.flow.sign_mode = wbg::parse_sign_mode(*sign_text);
    if (!out_path.empty()) cfg.output_path = out_path;
    const auto [a, b] = parse_pair(theta_text, "--theta");
    const wbg::ThetaPoint theta(a, b);

    if (verify->parsed()) {
      emit(wbg::cmd_verify(cfg).dump(2) + "\n", cfg.output_path);
    } else if (metric->parsed()) {
      emit(wbg::cmd_metric(cfg, theta).dump(2) + "\n", cfg.output_path);
    } else if (constraint->parsed()) {
      const auto [lo, hi] = parse_pair(window_text, "--window");
      const nlohmann::json record = wbg::cmd_constraint(theta, {lo, hi}, tol);
      emit(record.dump(2) + "\n", cfg.output_path);
      if (record.contains("error")) return 2;
    } else if (potential->parsed()) {
      emit(wbg::cmd_potential(cfg, theta, potential_x).dump(2) + "\n", cfg.output_path);
    } else if (flow->parsed()) {
      if (flow_t_end) cfg.flow.t_end = *flow_t_end;
      if (flow_step) cfg.flow.step = *flow_step;
      if (resolve_root) {
        cfg.flow.x_policy = wbg::XPolicy::resolve_root(flow_x.value_or(0.0));
      } else if (flow_x) {
        cfg.flow.x_policy = wbg::XPolicy::fixed(*flow_x);
      }
      const wbg::FlowTrajectory trajectory = wbg::run_flow(cfg, theta);
      emit(wbg::trajectory_csv(trajectory), cfg.output_path);
      if (trajectory.abort_reason) std::cerr << "flow aborted: " << *trajectory.abort_reason << "\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
