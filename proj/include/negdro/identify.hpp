#pragma once

#include "negdro/model.hpp"
#include "negdro/simplex.hpp"

#include <vector>

namespace negdro {

/// E[delta delta^T] for every environment.
struct InterventionMoments {
  std::vector<Mat> d_mats;

  static InterventionMoments from_scenario(const Scenario& scenario);

  Eigen::Index num_envs() const { return static_cast<Eigen::Index>(d_mats.size()); }
  int p() const { return d_mats.empty() ? 0 : static_cast<int>(d_mats.front().rows()); }
  void validate() const;
};

struct IdCertificate {
  bool feasible = false;
  double lambda_hat = 0.0;  // best certified smallest eigenvalue
  SimplexWeight w_hat;
  double tol = 0.0;
};

/// A(w) = sum_e (w_e - 1/|E|) D_e.
Mat a_matrix(const SimplexWeight& w, const InterventionMoments& im);

/// Maximizes the concave g(w) = lambda_min(A(w)) over the simplex by
/// projected supergradient ascent started from every vertex and the
/// barycenter. Feasible iff the best value exceeds tol.
IdCertificate check_condition_heterogeneity(const InterventionMoments& im, double tol = 1e-6,
                                            std::size_t iters = 500);

/// Relaxed condition for limited interventions: some simplex weight w with
///   sum_e w_e eps_cov_e > tol I,   A(w) >= 0,   lambda_min([A(w)]_{D,D}) > tol.
/// A(w) >= 0 is checked up to rounding, 1e-10 max_e |D_e|_2.
/// lambda_hat reports lambda_min([A(w_hat)]_{D,D}). Throws EmptyChildSet for D = {}.
IdCertificate check_condition_relaxed(const InterventionMoments& im, const IndexSet& children,
                                      const std::vector<Mat>& eps_cov, double tol = 1e-6);

/// Scenario convenience: D from the SEM and eps_cov_e = Cov(eta_X) + D_e.
IdCertificate check_condition_relaxed(const Scenario& scenario, double tol = 1e-6);

struct InvarianceRow {
  IndexSet subset;
  std::vector<Vec> coefficients;  // per environment, embedded in R^p
  Vec risks;                      // per environment, at its own coefficients
  double gap = 0.0;               // max_e risk - min_e risk
  double coefficient_spread = 0.0;
  bool invariant = false;
};

/// Population regression of Y on X_S in every environment for all S of
/// [p], ordered by subset size then lexicographically. Requires p <= 20.
std::vector<InvarianceRow> invariance_probe(const SemModel& sem, const std::vector<InterventionSpec>& ivs);

}  // namespace negdro
