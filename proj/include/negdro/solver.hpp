#pragma once

#include "negdro/objective.hpp"
#include "negdro/simulate.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace negdro {

enum class StepRule {
  Theoretical,  // 1/(2M + 2M^2/mu) for the penalized solver, c_step/sqrt(T+1) for the subgradient solver
  Constant,  // step_size for every iteration
  PieceSmoothness,  // 1 / L, L the gradient Lipschitz constant of the active smooth piece
};

const char* to_string(StepRule rule) noexcept;

enum class InitRule { PooledOls, Zero, Given };

struct SolverConfig {
  double gamma = 0.0;
  std::optional<double> mu;       // default M / sqrt(T)
  std::size_t T = 1000;
  StepRule step_rule = StepRule::Theoretical;
  double step_size = 0.0;         // StepRule::Constant only
  std::optional<double> upsilon;  // default 1 / (2 rho), rho the weak-convexity bound
  std::optional<double> c_step;   // default 1 / M
  std::size_t prox_inner_iters = 500;
  double prox_tol = 1e-10;
  InitRule init = InitRule::PooledOls;
  Vec b0;                         // InitRule::Given
  double stat_tol = 0.0;          // stop early once the selection statistic reaches it
  bool keep_trace = true;

  void validate() const;
};

enum class SolveStatus { Converged, MaxIters };

const char* to_string(SolveStatus status) noexcept;

struct IterationRecord {
  double objective;  // Phi_mu(b^t) or Phi(b^t)
  double stat;       // |grad Phi_mu(b^t)| or |prox(b^t) - b^t|
  Vec weight;        // inner maximizer used at b^t
};

struct SolveResult {
  Vec b_hat;
  std::vector<IterationRecord> trace;  // trace[t] describes b^t, t = 0..T
  std::size_t selected_iter = 0;
  double selected_stat = 0.0;
  SolveStatus status = SolveStatus::MaxIters;
  // Resolved hyperparameters actually used.
  double smoothness = 0.0;
  double mu = 0.0;
  double step = 0.0;
  double upsilon = 0.0;
  std::size_t prox_unconverged = 0;
};

/// Initial point resolved from cfg.init (pooled least squares by default).
Vec initial_point(std::span<const EnvMoments> ms, const SolverConfig& cfg);

/// Gradient descent on the ridge-penalized objective Phi_mu. Returns the
/// iterate among b^1..b^T with the smallest gradient norm.
SolveResult solve_penalized(std::span<const EnvMoments> ms, const SolverConfig& cfg);
SolveResult solve_penalized(const MultiEnvData& data, const SolverConfig& cfg);

/// 2 max_v |gram_v - c sum_e gram_e|_2: Lipschitz constant of the gradient
/// of each smooth piece r_v - c sum_e r_e of Phi. Equals M at gamma = 0.
double piece_smoothness(std::span<const EnvMoments> ms, double gamma);

/// Upper bound 2 gamma/(1 + gamma |E|) lambda_max(sum_e gram_e) on the
/// weak-convexity modulus of Phi.
double weak_convexity_bound(std::span<const EnvMoments> ms, double gamma);

struct ProxResult {
  Vec point;
  Vec weight;               // dual simplex weight at termination
  double objective = 0.0;   // Phi(point) + |point - b|^2 / (2 upsilon)
  double gap = 0.0;         // duality gap certificate
  std::size_t iterations = 0;
  bool converged = false;
};

/// argmin_z Phi(z) + |z - b|^2 / (2 upsilon). Requires upsilon < 1/rho.
/// Solved through its concave dual over the simplex weights; throws
/// UpsilonTooLarge when the precondition fails.
ProxResult prox(const Vec& b, double upsilon, std::span<const EnvMoments> ms, double gamma,
                std::size_t max_iters = 500, double tol = 1e-10);

/// Subgradient descent on Phi with a proximal-distance output rule.
SolveResult solve_subgradient(std::span<const EnvMoments> ms, const SolverConfig& cfg);
SolveResult solve_subgradient(const MultiEnvData& data, const SolverConfig& cfg);

}  // namespace negdro
