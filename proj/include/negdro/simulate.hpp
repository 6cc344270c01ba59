#pragma once

#include "negdro/model.hpp"

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace negdro {

using Rng = std::mt19937_64;

struct EnvironmentData {
  Mat x;  // n x p
  Vec y;  // n

  std::size_t n() const { return static_cast<std::size_t>(y.size()); }
  int p() const { return static_cast<int>(x.cols()); }
};

struct MultiEnvData {
  std::vector<EnvironmentData> envs;

  std::size_t num_envs() const { return envs.size(); }
  int p() const { return envs.empty() ? 0 : envs.front().p(); }
};

/// SplitMix64 finalizer applied to the master seed and each stream index in
/// turn. Used for per-environment and per-replicate child seeds.
std::uint64_t mix_seed(std::uint64_t master, std::uint64_t index);
std::uint64_t mix_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b);

/// Draws spec.n i.i.d. rows: eta ~ N(0, eta_cov), delta independent,
/// (Y, X) = (I - B)^{-1} (eta + (0, delta)).
EnvironmentData sample_environment(const SemModel& sem, const EnvironmentSpec& spec, Rng& rng);

/// Environment e uses an Rng seeded with mix_seed(scenario.seed, e).
MultiEnvData sample_scenario(const Scenario& scenario);

struct ScenarioParams {
  int p = 5;                         // section6 family
  std::vector<double> sigma{1.0, 2.0};  // example1 per-environment noise scales
  std::size_t n = 1000;              // per-environment sample size
  std::uint64_t seed = 0;
};

/// Known names: example1, example2_limited, example2_weak, example2_strong,
/// section6, section6_limited. Throws UnknownScenario otherwise.
Scenario builtin_scenario(const std::string& name, const ScenarioParams& params = {});

const std::vector<std::string>& builtin_scenario_names();

}  // namespace negdro
