#pragma once

#include "negdro/baselines.hpp"
#include "negdro/simulate.hpp"
#include "negdro/solver.hpp"

#include "json.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace negdro::harness {

using Json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

enum class Method { NegdroPenalized, NegdroSubgradient, Erm, CausalDantzig, Drig, Exhaustive };

const char* to_string(Method method) noexcept;
std::optional<Method> method_from_string(const std::string& name);
const std::vector<Method>& all_methods();

/// Methods whose estimate depends on the sweep's gamma.
bool uses_gamma(Method method);

enum class SweepParam { Gamma, N, P };

const char* to_string(SweepParam param) noexcept;
std::optional<SweepParam> sweep_param_from_string(const std::string& name);

struct Sweep {
  SweepParam param = SweepParam::Gamma;
  std::vector<double> values;
};

/// Either a builtin name with its parameters or a fully spelled-out scenario.
struct ScenarioSource {
  std::optional<std::string> builtin;
  ScenarioParams params;
  std::optional<Scenario> inline_scenario;

  /// Materializes the scenario at the given per-environment n and, for the
  /// section6 family, dimension p (empty keeps the configured values).
  Scenario materialize(std::optional<std::size_t> n = std::nullopt, std::optional<int> p = std::nullopt) const;
};

struct BaselineConfig {
  std::optional<double> drig_gamma;  // follows the solver gamma when empty
  int drig_ref_env = 0;              // 0-based here, 1-based in JSON
  std::optional<std::vector<double>> drig_weights;
  std::optional<std::pair<int, int>> dantzig_pair;  // 0-based here, 1-based in JSON
  double exhaustive_threshold = 0.05;
  int exhaustive_max_p = 20;
};

struct ExperimentConfig {
  ScenarioSource scenario;
  std::vector<Method> methods;
  SolverConfig solver;
  BaselineConfig baselines;
  std::optional<Sweep> sweep;
  std::size_t replicates = 1;
  std::uint64_t seed = 0;
  std::optional<double> time_limit_secs;
  bool oracle_select = false;

  /// Throws ConfigInvalid with a field path.
  void validate() const;
};

/// Matrices are nested row-major arrays. Every parse error is ConfigInvalid
/// with the offending field path, e.g. "solver.T".
ExperimentConfig config_from_json(const Json& j);
Json to_json(const ExperimentConfig& cfg);

Scenario scenario_from_json(const Json& j, const std::string& path = "scenario");
ScenarioSource scenario_source_from_json(const Json& j, const std::string& path = "scenario");
Json to_json(const Scenario& scenario);

Json to_json(const SolverConfig& cfg);

/// Reads and parses a config file. A missing or unreadable file is
/// ConfigInvalid as well.
ExperimentConfig load_config(const std::filesystem::path& path);

/// Only the schema version and the scenario of a config file; other fields
/// are ignored.
ScenarioSource load_scenario(const std::filesystem::path& path);

}  // namespace negdro::harness
