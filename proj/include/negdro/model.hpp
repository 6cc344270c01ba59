#pragma once

#include "negdro/common.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace negdro {

/// Linear SEM over (Y, X) with the outcome at index 0:
///
///   (Y, X) = B (Y, X) + eps,   B = [[0, beta_star^T], [b_yx, b_xx]]
///
/// `eta_cov` is the second moment of the shared error eta (outcome first).
/// Edges are defined by exact nonzero coefficients.
struct SemModel {
  Vec beta_star;
  Vec b_yx;
  Mat b_xx;
  Mat eta_cov;

  int p() const { return static_cast<int>(beta_star.size()); }
  double sigma_y_sq() const { return eta_cov(0, 0); }

  /// The assembled (p+1)x(p+1) structural matrix.
  Mat structural_matrix() const;

  /// Checks shapes and eta_cov symmetry/PSD. Acyclicity (which also implies
  /// supp(b_yx) and supp(beta_star) are disjoint) is validate_acyclic()'s job.
  void check_shapes() const;

  bool operator==(const SemModel& other) const;
};

enum class InterventionKind { None, Fixed, Gaussian, Uniform, Mixed };

const char* to_string(InterventionKind kind) noexcept;

/// Additive covariate intervention delta = mean + N(0, gaussian_cov) + U,
/// U_j ~ Unif(-a_j, a_j) independent. Pure forms (fixed / gaussian / uniform)
/// are the common cases; combining them covers environments that intervene
/// different coordinate blocks with different laws.
class InterventionSpec {
 public:
  InterventionSpec() = default;
  explicit InterventionSpec(int p);

  static InterventionSpec none(int p);
  static InterventionSpec fixed(const Vec& shift);
  static InterventionSpec gaussian(const Vec& mean, const Mat& cov);
  static InterventionSpec uniform(const Vec& half_widths);
  /// All three parts at once; they may overlap on the same coordinates.
  static InterventionSpec general(const Vec& mean, const Mat& gaussian_cov, const Vec& half_widths);

  /// Block composition: coordinates with a nonzero entry in `other`
  /// must be untouched here.
  InterventionSpec& combine(const InterventionSpec& other);

  int p() const { return static_cast<int>(mean_.size()); }
  InterventionKind kind() const;

  const Vec& mean() const { return mean_; }
  const Mat& gaussian_cov() const { return gaussian_cov_; }
  const Vec& half_widths() const { return half_widths_; }

  /// Covariance of delta: gaussian_cov + diag(a^2 / 3).
  Mat cov() const;
  /// E[delta delta^T] = cov + mean mean^T.
  Mat second_moment() const;

  bool operator==(const InterventionSpec& other) const;

 private:
  Vec mean_;
  Mat gaussian_cov_;
  Vec half_widths_;
};

struct EnvironmentSpec {
  std::size_t n = 1;
  InterventionSpec intervention;

  bool operator==(const EnvironmentSpec& other) const {
    return n == other.n && intervention == other.intervention;
  }
};

struct Scenario {
  std::string name;
  SemModel sem;
  std::vector<EnvironmentSpec> environments;
  std::uint64_t seed = 0;

  void validate() const;

  bool operator==(const Scenario& other) const {
    return name == other.name && sem == other.sem && environments == other.environments && seed == other.seed;
  }
};

/// Second moment of (Y, X) in one environment; outcome at index 0.
struct JointSecondMoment {
  Mat matrix;

  int p() const { return static_cast<int>(matrix.rows()) - 1; }
  Mat gram() const { return matrix.bottomRightCorner(p(), p()); }
  Vec cross() const { return matrix.col(0).tail(p()); }
  double ysq() const { return matrix(0, 0); }
};

/// Throws CyclicGraph when the nonzero pattern of B has a directed cycle and
/// NearSingular when I - B has smallest singular value <= 1e-10.
void validate_acyclic(const SemModel& sem);

/// (I - B)^{-1} M_eps (I - B)^{-T}, M_eps = eta_cov + blockdiag(0, E[delta delta^T]).
JointSecondMoment population_moments(const SemModel& sem, const InterventionSpec& iv);

/// E[(Y, X)] = (I - B)^{-1} (0, mean(delta)).
Vec population_mean(const SemModel& sem, const InterventionSpec& iv);

/// supp(b_yx): covariates directly caused by the outcome.
IndexSet children_of_outcome(const SemModel& sem);

/// supp(beta_star).
IndexSet causal_parents(const SemModel& sem);

}  // namespace negdro
