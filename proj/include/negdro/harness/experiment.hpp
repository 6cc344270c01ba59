#pragma once

#include "negdro/harness/config.hpp"
#include "negdro/harness/results.hpp"
#include "negdro/risk.hpp"

#include <optional>
#include <span>
#include <string>

namespace negdro::harness {

/// Row status for a method stopped by an error: snake_case of the code.
std::string status_name(ErrorCode code);

/// Data seed of one (sweep point, replicate) task. Gamma sweeps reuse one
/// data set per replicate across all gamma values, so sweep_index does not
/// enter the hash there.
std::uint64_t replicate_seed(const ExperimentConfig& cfg, std::size_t sweep_index, std::size_t replicate);

struct MethodOutcome {
  std::optional<Vec> b_hat;
  std::string status = "ok";
  double runtime_ms = 0.0;
  IndexSet selected_subset;
};

/// Runs one method on precomputed moments at the given gamma. Method errors
/// become statuses; nothing here throws for a failing estimator.
MethodOutcome run_method(Method method, std::span<const EnvMoments> ms, double gamma, const ExperimentConfig& cfg);

/// Worker count: NEGDRO_THREADS when set to a positive integer, otherwise the
/// hardware concurrency, never more than `tasks`.
unsigned worker_count(std::size_t tasks);

/// Every sweep value x replicate x method, sorted. With oracle_select, each
/// gamma-dependent method also gets one "<method>+oracle" row per replicate
/// holding its best gamma.
ResultTable run(const ExperimentConfig& cfg);

}  // namespace negdro::harness
