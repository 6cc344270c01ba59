#pragma once

#include "negdro/risk.hpp"
#include "negdro/simplex.hpp"

#include <chrono>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>

namespace negdro {

enum class BaselineStatus { Ok, Singular, NonConvex, NotApplicable, Timeout };

const char* to_string(BaselineStatus status) noexcept;

struct BaselineResult {
  std::optional<Vec> b_hat;  // present iff status == Ok
  BaselineStatus status = BaselineStatus::NotApplicable;
  std::map<std::string, double> diagnostics;
  IndexSet selected_subset;  // exhaustive search only
};

/// Least squares on the pooled moments. Singular when the pooled Gram has
/// lambda_min < 1e-10 max(1, lambda_max).
BaselineResult erm(std::span<const EnvMoments> ms);
BaselineResult erm(const MultiEnvData& data);

/// Which two moment sets the Gram/cross differences are taken between.
struct DantzigPairing {
  // Environment 0 against the n-weighted pool of all others.
  static DantzigPairing first_vs_rest() { return {}; }
  static DantzigPairing pair(int e, int f) { return {e, f}; }

  std::optional<int> first;
  std::optional<int> second;
};

/// (G_e - G_f)^{-1} (z_e - z_f). Singular when sigma_min < 1e-8 sigma_max.
BaselineResult causal_dantzig(std::span<const EnvMoments> ms, DantzigPairing pairing = DantzigPairing::first_vs_rest());
BaselineResult causal_dantzig(const MultiEnvData& data, DantzigPairing pairing = DantzigPairing::first_vs_rest());

struct DrigOptions {
  double gamma = 0.0;
  int ref_env = 0;
  // Weights over the non-reference environments in index order; uniform when empty.
  std::optional<SimplexWeight> weights;
};

/// Solves (G_0 + gamma sum_e w_e (G_e - G_0)) b = z_0 + gamma sum_e w_e (z_e - z_0)
/// with 0 the reference environment. NonConvex when the system matrix has
/// lambda_min <= 1e-10.
BaselineResult drig(std::span<const EnvMoments> ms, const DrigOptions& opts);
BaselineResult drig(const MultiEnvData& data, const DrigOptions& opts);

using Deadline = std::chrono::steady_clock::time_point;

struct ExhaustiveOptions {
  double threshold = std::numeric_limits<double>::infinity();
  int max_p = 20;
  std::optional<Deadline> deadline;  // polled between subsets
};

/// Pooled least squares on every subset S; among subsets whose per-environment
/// risk gap is <= threshold, picks the smallest pooled risk (ties: smaller |S|,
/// then lexicographic). Throws DimensionTooLarge and NoInvariantSubset.
/// Returns status Timeout once the deadline passes.
BaselineResult exhaustive_invariance_search(std::span<const EnvMoments> ms, const ExhaustiveOptions& opts);
BaselineResult exhaustive_invariance_search(const MultiEnvData& data, const ExhaustiveOptions& opts);

}  // namespace negdro
