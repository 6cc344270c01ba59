// negdro: command-line front end for experiments, identification checks and plots.
//
// Exit codes: 0 success, 1 configuration error, 2 runtime error.

#include "negdro/harness/config.hpp"
#include "negdro/harness/experiment.hpp"
#include "negdro/harness/plot.hpp"
#include "negdro/identify.hpp"

#include "CLI11.hpp"

#include <cstdio>
#include <iostream>
#include <sstream>

namespace {

using namespace negdro;
using namespace negdro::harness;

constexpr int kOk = 0;
constexpr int kConfigError = 1;
constexpr int kRuntimeError = 2;

void emit_table(const ResultTable& table, const std::string& out) {
  if (out.empty() || out == "-") {
    write_csv(table, std::cout);
  } else {
    write_csv(table, std::filesystem::path(out));
  }
}

Json certificate_json(const IdCertificate& c) {
  Json w = Json::array();
  for (Eigen::Index e = 0; e < c.w_hat.size(); ++e) w.push_back(c.w_hat(e));
  return {{"feasible", c.feasible}, {"lambda_hat", c.lambda_hat}, {"w_hat", w}, {"tol", c.tol}};
}

int check_id(const std::string& config_path, double tol) {
  const Scenario sc = load_scenario(config_path).materialize();
  const InterventionMoments im = InterventionMoments::from_scenario(sc);
  Json out;
  out["scenario"] = sc.name;
  out["heterogeneity"] = certificate_json(check_condition_heterogeneity(im, tol));
  try {
    out["relaxed"] = certificate_json(check_condition_relaxed(sc, tol));
  } catch (const Error& e) {
    if (e.code() != ErrorCode::EmptyChildSet) throw;
    out["relaxed"] = {{"feasible", nullptr}, {"error", status_name(e.code())}};
  }
  std::cout << out.dump(2) << '\n';
  return kOk;
}

std::string subset_label(const IndexSet& s) {
  if (s.empty()) return "{}";
  std::string out = "{";
  for (std::size_t i = 0; i < s.size(); ++i) out += (i ? "," : "") + std::to_string(s[i] + 1);
  return out + "}";
}

int probe(const std::string& config_path) {
  const Scenario sc = load_scenario(config_path).materialize();
  std::vector<InterventionSpec> ivs;
  for (const auto& env : sc.environments) ivs.push_back(env.intervention);
  const auto rows = invariance_probe(sc.sem, ivs);

  std::printf("%-16s %-9s %-12s %-12s", "subset", "invariant", "risk_gap", "coef_spread");
  for (std::size_t e = 0; e < ivs.size(); ++e) std::printf(" risk_env%-4zu", e + 1);
  std::printf("\n");
  for (const auto& r : rows) {
    std::printf("%-16s %-9s %-12.4g %-12.4g", subset_label(r.subset).c_str(), r.invariant ? "yes" : "no", r.gap,
                r.coefficient_spread);
    for (Eigen::Index e = 0; e < r.risks.size(); ++e) std::printf(" %-12.6g", r.risks(e));
    std::printf("\n");
  }
  return kOk;
}

std::vector<double> parse_values(const std::string& list) {
  std::vector<double> out;
  std::stringstream ss(list);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(tok, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != tok.size()) {
      throw Error(ErrorCode::ConfigInvalid, "--values: '" + tok + "' is not a number");
    }
    out.push_back(v);
  }
  if (out.empty()) throw Error(ErrorCode::ConfigInvalid, "--values: empty list");
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"NegDRO causal invariance experiments"};
  app.require_subcommand(1);

  std::string config;
  std::string out;
  auto* run_cmd = app.add_subcommand("run", "Run the experiment described by a config file");
  run_cmd->add_option("--config", config, "Experiment config (JSON)")->required();
  run_cmd->add_option("--out", out, "Result CSV path ('-' for stdout)");

  std::string param;
  std::string values;
  auto* sweep_cmd = app.add_subcommand("sweep", "Run a config with its sweep replaced");
  sweep_cmd->add_option("--config", config, "Experiment config (JSON)")->required();
  sweep_cmd->add_option("--param", param, "gamma, n or p")->required();
  sweep_cmd->add_option("--values", values, "Comma-separated, strictly increasing")->required();
  sweep_cmd->add_option("--out", out, "Result CSV path ('-' for stdout)");

  double tol = 1e-6;
  auto* check_cmd = app.add_subcommand("check-id", "Print identification certificates as JSON");
  check_cmd->add_option("--config", config, "Config whose scenario is checked")->required();
  check_cmd->add_option("--tol", tol, "Feasibility tolerance")->capture_default_str();

  auto* probe_cmd = app.add_subcommand("probe", "Population risk-invariance table over all covariate subsets");
  probe_cmd->add_option("--config", config, "Config whose scenario is probed")->required();

  std::string in;
  PlotSpec spec;
  auto* plot_cmd = app.add_subcommand("plot", "Render a result CSV as an SVG line chart");
  plot_cmd->add_option("--in", in, "Result CSV")->required();
  plot_cmd->add_option("--x", spec.x, "x column")->capture_default_str();
  plot_cmd->add_option("--y", spec.y, "y column")->capture_default_str();
  plot_cmd->add_option("--group", spec.group_by, "Series column")->capture_default_str();
  plot_cmd->add_flag("--logx", spec.log_x, "Log-scale x axis");
  plot_cmd->add_flag("--logy", spec.log_y, "Log-scale y axis");
  plot_cmd->add_option("--out", out, "SVG path")->required();

  auto* scenarios_cmd = app.add_subcommand("scenarios", "List builtin scenarios");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (run_cmd->parsed()) {
      emit_table(run(load_config(config)), out);
    } else if (sweep_cmd->parsed()) {
      ExperimentConfig cfg = load_config(config);
      const auto p = sweep_param_from_string(param);
      if (!p) throw Error(ErrorCode::ConfigInvalid, "--param: expected gamma, n or p");
      cfg.sweep = Sweep{*p, parse_values(values)};
      cfg.validate();
      emit_table(run(cfg), out);
    } else if (check_cmd->parsed()) {
      return check_id(config, tol);
    } else if (probe_cmd->parsed()) {
      return probe(config);
    } else if (plot_cmd->parsed()) {
      plot_svg(read_csv(std::filesystem::path(in)), spec, out);
    } else if (scenarios_cmd->parsed()) {
      for (const auto& name : builtin_scenario_names()) std::cout << name << '\n';
    }
  } catch (const Error& e) {
    std::cerr << "negdro: " << e.what() << '\n';
    const bool config_error = e.code() == ErrorCode::ConfigInvalid || e.code() == ErrorCode::UnknownScenario;
    return config_error ? kConfigError : kRuntimeError;
  } catch (const std::exception& e) {
    std::cerr << "negdro: " << e.what() << '\n';
    return kRuntimeError;
  }
  return kOk;
}
