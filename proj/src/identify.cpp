#include "negdro/identify.hpp"

#include "negdro/risk.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace negdro {

InterventionMoments InterventionMoments::from_scenario(const Scenario& scenario) {
  InterventionMoments im;
  im.d_mats.reserve(scenario.environments.size());
  for (const auto& env : scenario.environments) im.d_mats.push_back(env.intervention.second_moment());
  return im;
}

void InterventionMoments::validate() const {
  if (d_mats.size() < 2) throw Error(ErrorCode::InvalidArgument, "need at least two environments");
  const auto k = d_mats.front().rows();
  for (const auto& d : d_mats) {
    require_dims(d.rows() == k && d.cols() == k, "intervention moments must share one square shape");
    if (!is_symmetric(d)) throw Error(ErrorCode::InvalidArgument, "intervention moment is not symmetric");
    if (min_eigenvalue(d) < -1e-10) throw Error(ErrorCode::InvalidArgument, "intervention moment is not PSD");
  }
}

Mat a_matrix(const SimplexWeight& w, const InterventionMoments& im) {
  require_dims(w.size() == im.num_envs(), "weight length must equal the number of environments");
  const double base = 1.0 / static_cast<double>(im.num_envs());
  Mat a = Mat::Zero(im.p(), im.p());
  for (Eigen::Index e = 0; e < im.num_envs(); ++e) {
    const auto& d = im.d_mats[static_cast<std::size_t>(e)];
    require_dims(d.rows() == im.p() && d.cols() == im.p(), "intervention moments must share one square shape");
    a += (w(e) - base) * d;
  }
  return a;
}

namespace {

struct EigenMin {
  double value;
  Vec vector;
};

EigenMin smallest_pair(const Mat& sym) {
  Eigen::SelfAdjointEigenSolver<Mat> es(sym);
  return {es.eigenvalues()(0), es.eigenvectors().col(0)};
}

double g_value(const Vec& w, const InterventionMoments& im) {
  return min_eigenvalue(a_matrix(SimplexWeight(w), im));
}

Vec supergradient(const Vec& w, const InterventionMoments& im, double* value) {
  const EigenMin em = smallest_pair(a_matrix(SimplexWeight(w), im));
  *value = em.value;
  Vec s(im.num_envs());
  for (Eigen::Index e = 0; e < im.num_envs(); ++e) {
    s(e) = em.vector.dot(im.d_mats[static_cast<std::size_t>(e)] * em.vector);
  }
  return s;
}

// Projected supergradient ascent with step scale / sqrt(t+1) along the
// normalized supergradient. Returns the best point seen.
void ascend(Vec w, const InterventionMoments& im, std::size_t iters, double scale, Vec& best_w,
            double& best) {
  for (std::size_t t = 0; t < iters; ++t) {
    double value = 0.0;
    Vec s = supergradient(w, im, &value);
    if (value > best) {
      best = value;
      best_w = w;
    }
    s.array() -= s.mean();
    const double norm = s.norm();
    if (norm == 0.0) break;
    w = project_simplex((w + scale / std::sqrt(static_cast<double>(t) + 1.0) * s / norm).eval());
  }
  const double last = g_value(w, im);
  if (last > best) {
    best = last;
    best_w = w;
  }
}

}  // namespace

IdCertificate check_condition_heterogeneity(const InterventionMoments& im, double tol, std::size_t iters) {
  if (!(tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "tol must be positive");
  im.validate();
  const Eigen::Index k = im.num_envs();

  std::vector<Vec> starts;
  for (Eigen::Index e = 0; e < k; ++e) starts.push_back(SimplexWeight::vertex(k, e).values());
  starts.push_back(SimplexWeight::uniform(k).values());

  Vec best_w = starts.back();
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& s : starts) ascend(s, im, iters, 1.0, best_w, best);

  // Polish from the incumbent with geometrically shrinking steps.
  double scale = 0.5;
  for (int round = 0; round < 12; ++round, scale *= 0.5) {
    ascend(best_w, im, std::max<std::size_t>(iters / 5, 20), scale, best_w, best);
  }

  IdCertificate cert;
  cert.w_hat = SimplexWeight::project(best_w);
  cert.lambda_hat = g_value(cert.w_hat.values(), im);
  cert.tol = tol;
  cert.feasible = cert.lambda_hat > tol;
  return cert;
}

namespace {

struct RelaxedScore {
  double noise;     // lambda_min(sum w eps_cov) - tol
  double full;      // lambda_min(A(w)) + rounding slack
  double children;  // lambda_min(A(w)_{D,D}) - tol
  double lambda_children;

  double score() const { return std::min({noise, full, children}); }
  bool feasible() const { return noise > 0.0 && full >= 0.0 && children > 0.0; }
};

RelaxedScore relaxed_score(const Vec& w, const InterventionMoments& im, const IndexSet& children,
                           const std::vector<Mat>& eps_cov, double tol, double slack) {
  Mat noise = Mat::Zero(im.p(), im.p());
  for (std::size_t e = 0; e < eps_cov.size(); ++e) noise += w(static_cast<Eigen::Index>(e)) * eps_cov[e];
  const Mat a = a_matrix(SimplexWeight(w), im);
  const auto d = static_cast<Eigen::Index>(children.size());
  Mat sub(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) sub(i, j) = a(children[i], children[j]);
  }
  const double lc = min_eigenvalue(sub);
  return {min_eigenvalue(noise) - tol, min_eigenvalue(a) + slack, lc - tol, lc};
}

// Every point of the simplex grid with spacing 1/steps.
void grid_points(Eigen::Index k, int steps, std::vector<Vec>& out) {
  std::vector<int> counts(static_cast<std::size_t>(k), 0);
  auto rec = [&](auto&& self, Eigen::Index pos, int remaining) -> void {
    if (pos == k - 1) {
      counts[static_cast<std::size_t>(pos)] = remaining;
      Vec w(k);
      for (Eigen::Index e = 0; e < k; ++e) w(e) = counts[static_cast<std::size_t>(e)] / static_cast<double>(steps);
      out.push_back(w);
      return;
    }
    for (int c = 0; c <= remaining; ++c) {
      counts[static_cast<std::size_t>(pos)] = c;
      self(self, pos + 1, remaining - c);
    }
  };
  rec(rec, 0, steps);
}

int grid_steps(Eigen::Index k) {
  if (k <= 4) return 50;
  if (k <= 6) return 10;
  if (k <= 10) return 4;
  return 2;
}

}  // namespace

IdCertificate check_condition_relaxed(const InterventionMoments& im, const IndexSet& children,
                                      const std::vector<Mat>& eps_cov, double tol) {
  if (!(tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "tol must be positive");
  if (children.empty()) throw Error(ErrorCode::EmptyChildSet, "the outcome has no children; the condition is vacuous");
  im.validate();
  require_dims(eps_cov.size() == im.d_mats.size(), "one noise covariance per environment is required");
  for (const auto& m : eps_cov) require_dims(m.rows() == im.p() && m.cols() == im.p(), "noise covariance has the wrong shape");
  for (int c : children) {
    if (c < 0 || c >= im.p()) throw Error(ErrorCode::InvalidArgument, "child index out of range");
  }
  const Eigen::Index k = im.num_envs();
  double scale = 0.0;
  for (const auto& d : im.d_mats) scale = std::max(scale, max_eigenvalue(d));
  const double slack = 1e-10 * std::max(1.0, scale);

  std::vector<Vec> cands;
  grid_points(k, grid_steps(k), cands);
  cands.push_back(SimplexWeight::uniform(k).values());

  Vec best_w = cands.front();
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& w : cands) {
    const double s = relaxed_score(w, im, children, eps_cov, tol, slack).score();
    if (s > best) {
      best = s;
      best_w = w;
    }
  }

  // Pattern search along the edge directions e_i - e_j.
  double h = 1.0 / grid_steps(k);
  while (h > 1e-9) {
    bool improved = false;
    for (Eigen::Index i = 0; i < k; ++i) {
      for (Eigen::Index j = 0; j < k; ++j) {
        if (i == j) continue;
        const double move = std::min(h, best_w(j));
        if (move <= 0.0) continue;
        Vec w = best_w;
        w(i) += move;
        w(j) -= move;
        const double s = relaxed_score(w, im, children, eps_cov, tol, slack).score();
        if (s > best) {
          best = s;
          best_w = w;
          improved = true;
        }
      }
    }
    if (!improved) h *= 0.5;
  }

  const RelaxedScore final_score = relaxed_score(best_w, im, children, eps_cov, tol, slack);
  IdCertificate cert;
  cert.w_hat = SimplexWeight::project(best_w);
  cert.lambda_hat = final_score.lambda_children;
  cert.tol = tol;
  cert.feasible = final_score.feasible();
  return cert;
}

IdCertificate check_condition_relaxed(const Scenario& scenario, double tol) {
  scenario.validate();
  const InterventionMoments im = InterventionMoments::from_scenario(scenario);
  const int p = scenario.sem.p();
  const Mat eta_x = scenario.sem.eta_cov.bottomRightCorner(p, p);
  std::vector<Mat> eps_cov;
  eps_cov.reserve(im.d_mats.size());
  for (const auto& d : im.d_mats) eps_cov.push_back(eta_x + d);
  return check_condition_relaxed(im, children_of_outcome(scenario.sem), eps_cov, tol);
}

std::vector<InvarianceRow> invariance_probe(const SemModel& sem, const std::vector<InterventionSpec>& ivs) {
  const int p = sem.p();
  if (p > 20) throw Error(ErrorCode::DimensionTooLarge, "invariance probe enumerates 2^p subsets; p must be <= 20");
  if (ivs.empty()) throw Error(ErrorCode::InvalidArgument, "need at least one environment");
  std::vector<EnvMoments> ms;
  ms.reserve(ivs.size());
  for (const auto& iv : ivs) ms.push_back(population_env_moments(sem, iv));

  std::vector<IndexSet> subsets;
  const std::uint32_t count = 1u << p;
  subsets.reserve(count);
  for (std::uint32_t mask = 0; mask < count; ++mask) {
    IndexSet s;
    for (int j = 0; j < p; ++j) {
      if (mask & (1u << j)) s.push_back(j);
    }
    subsets.push_back(std::move(s));
  }
  std::sort(subsets.begin(), subsets.end(), [](const IndexSet& a, const IndexSet& b) {
    return a.size() != b.size() ? a.size() < b.size() : a < b;
  });

  std::vector<InvarianceRow> rows;
  rows.reserve(subsets.size());
  const auto k = static_cast<Eigen::Index>(ms.size());
  for (auto& s : subsets) {
    InvarianceRow row;
    row.risks.resize(k);
    const auto d = static_cast<Eigen::Index>(s.size());
    for (Eigen::Index e = 0; e < k; ++e) {
      const EnvMoments& m = ms[static_cast<std::size_t>(e)];
      Mat g(d, d);
      Vec z(d);
      for (Eigen::Index i = 0; i < d; ++i) {
        z(i) = m.cross(s[i]);
        for (Eigen::Index j = 0; j < d; ++j) g(i, j) = m.gram(s[i], s[j]);
      }
      Vec b = Vec::Zero(p);
      if (d > 0) {
        Eigen::LDLT<Mat> ldlt(g);
        if (ldlt.info() != Eigen::Success || min_eigenvalue(g) <= 1e-12 * std::max(1.0, max_eigenvalue(g))) {
          throw Error(ErrorCode::NearSingular, "population Gram matrix of a subset is singular");
        }
        const Vec bs = ldlt.solve(z);
        for (Eigen::Index i = 0; i < d; ++i) b(s[i]) = bs(i);
      }
      row.risks(e) = risk(m, b);
      row.coefficients.push_back(std::move(b));
    }
    row.gap = row.risks.maxCoeff() - row.risks.minCoeff();
    for (const auto& b : row.coefficients) {
      row.coefficient_spread =
          std::max(row.coefficient_spread, (b - row.coefficients.front()).cwiseAbs().maxCoeff());
    }
    const double scale = std::max(1.0, row.risks.cwiseAbs().maxCoeff());
    row.invariant = row.gap <= 1e-8 * scale && row.coefficient_spread <= 1e-8 * scale;
    row.subset = std::move(s);
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace negdro
