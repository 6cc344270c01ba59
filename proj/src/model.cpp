#include "negdro/model.hpp"

#include <queue>

namespace negdro {

namespace {

constexpr double kPsdTol = 1e-10;
constexpr double kSingularTol = 1e-10;

bool is_psd(const Mat& m) { return m.size() == 0 || min_eigenvalue(m) >= -kPsdTol; }

}  // namespace

Mat SemModel::structural_matrix() const {
  const int k = p();
  Mat b = Mat::Zero(k + 1, k + 1);
  b.block(0, 1, 1, k) = beta_star.transpose();
  b.block(1, 0, k, 1) = b_yx;
  b.bottomRightCorner(k, k) = b_xx;
  return b;
}

void SemModel::check_shapes() const {
  const int k = p();
  require_dims(k >= 1, "SEM needs at least one covariate");
  require_dims(b_yx.size() == k, "b_yx must have length p");
  require_dims(b_xx.rows() == k && b_xx.cols() == k, "b_xx must be p x p");
  require_dims(eta_cov.rows() == k + 1 && eta_cov.cols() == k + 1, "eta_cov must be (p+1) x (p+1)");
  if (!is_symmetric(eta_cov)) throw Error(ErrorCode::InvalidArgument, "eta_cov is not symmetric");
  if (!is_psd(eta_cov)) throw Error(ErrorCode::InvalidArgument, "eta_cov is not positive semidefinite");
}

const char* to_string(InterventionKind kind) noexcept {
  switch (kind) {
    case InterventionKind::None: return "none";
    case InterventionKind::Fixed: return "fixed";
    case InterventionKind::Gaussian: return "gaussian";
    case InterventionKind::Uniform: return "uniform";
    case InterventionKind::Mixed: return "mixed";
  }
  return "unknown";
}

InterventionSpec::InterventionSpec(int p)
    : mean_(Vec::Zero(p)), gaussian_cov_(Mat::Zero(p, p)), half_widths_(Vec::Zero(p)) {}

InterventionSpec InterventionSpec::none(int p) { return InterventionSpec(p); }

InterventionSpec InterventionSpec::fixed(const Vec& shift) {
  InterventionSpec iv(static_cast<int>(shift.size()));
  iv.mean_ = shift;
  return iv;
}

InterventionSpec InterventionSpec::gaussian(const Vec& mean, const Mat& cov) {
  const int p = static_cast<int>(mean.size());
  require_dims(cov.rows() == p && cov.cols() == p, "gaussian intervention covariance must be p x p");
  if (!is_symmetric(cov) || !is_psd(cov)) {
    throw Error(ErrorCode::InvalidArgument, "intervention covariance must be symmetric PSD");
  }
  InterventionSpec iv(p);
  iv.mean_ = mean;
  iv.gaussian_cov_ = cov;
  return iv;
}

InterventionSpec InterventionSpec::uniform(const Vec& half_widths) {
  if ((half_widths.array() < 0.0).any()) {
    throw Error(ErrorCode::InvalidArgument, "uniform half-widths must be nonnegative");
  }
  InterventionSpec iv(static_cast<int>(half_widths.size()));
  iv.half_widths_ = half_widths;
  return iv;
}

InterventionSpec InterventionSpec::general(const Vec& mean, const Mat& gaussian_cov, const Vec& half_widths) {
  require_dims(half_widths.size() == mean.size(), "half-widths must have length p");
  InterventionSpec iv = gaussian(mean, gaussian_cov);
  iv.half_widths_ = uniform(half_widths).half_widths_;
  return iv;
}

InterventionSpec& InterventionSpec::combine(const InterventionSpec& other) {
  require_dims(other.p() == p(), "cannot combine interventions of different dimension");
  for (int j = 0; j < p(); ++j) {
    const bool mine = mean_(j) != 0.0 || half_widths_(j) != 0.0 || gaussian_cov_.row(j).any();
    const bool theirs = other.mean_(j) != 0.0 || other.half_widths_(j) != 0.0 ||
                        other.gaussian_cov_.row(j).any();
    if (mine && theirs) {
      throw Error(ErrorCode::InvalidArgument,
                  "combined interventions overlap at covariate " + std::to_string(j + 1));
    }
  }
  mean_ += other.mean_;
  gaussian_cov_ += other.gaussian_cov_;
  half_widths_ += other.half_widths_;
  return *this;
}

InterventionKind InterventionSpec::kind() const {
  const bool has_mean = mean_.size() > 0 && mean_.any();
  const bool has_gauss = gaussian_cov_.size() > 0 && gaussian_cov_.any();
  const bool has_unif = half_widths_.size() > 0 && half_widths_.any();
  if (has_unif) return (has_mean || has_gauss) ? InterventionKind::Mixed : InterventionKind::Uniform;
  if (has_gauss) return InterventionKind::Gaussian;
  if (has_mean) return InterventionKind::Fixed;
  return InterventionKind::None;
}

Mat InterventionSpec::cov() const {
  Mat c = gaussian_cov_;
  c.diagonal() += half_widths_.array().square().matrix() / 3.0;
  return c;
}

Mat InterventionSpec::second_moment() const { return cov() + mean_ * mean_.transpose(); }

bool SemModel::operator==(const SemModel& other) const {
  auto same = [](const auto& a, const auto& b) {
    return a.rows() == b.rows() && a.cols() == b.cols() && a == b;
  };
  return same(beta_star, other.beta_star) && same(b_yx, other.b_yx) && same(b_xx, other.b_xx) &&
         same(eta_cov, other.eta_cov);
}

bool InterventionSpec::operator==(const InterventionSpec& other) const {
  return p() == other.p() && mean_ == other.mean_ && gaussian_cov_ == other.gaussian_cov_ &&
         half_widths_ == other.half_widths_;
}

void Scenario::validate() const {
  sem.check_shapes();
  validate_acyclic(sem);
  if (environments.size() < 2) {
    throw Error(ErrorCode::InvalidArgument, "a scenario needs at least two environments");
  }
  for (std::size_t e = 0; e < environments.size(); ++e) {
    const auto& env = environments[e];
    if (env.n < 1) throw Error(ErrorCode::InvalidArgument, "environment sample size must be >= 1");
    require_dims(env.intervention.p() == sem.p(),
                 "intervention of environment " + std::to_string(e + 1) + " has wrong dimension");
  }
}

void validate_acyclic(const SemModel& sem) {
  sem.check_shapes();
  const Mat b = sem.structural_matrix();
  const int nodes = static_cast<int>(b.rows());

  // Kahn's algorithm on the pattern: edge j -> i whenever B(i, j) != 0.
  std::vector<int> indegree(nodes, 0);
  for (int i = 0; i < nodes; ++i) {
    for (int j = 0; j < nodes; ++j) {
      if (b(i, j) != 0.0) ++indegree[i];
    }
  }
  std::queue<int> ready;
  for (int i = 0; i < nodes; ++i) {
    if (indegree[i] == 0) ready.push(i);
  }
  int visited = 0;
  while (!ready.empty()) {
    const int j = ready.front();
    ready.pop();
    ++visited;
    for (int i = 0; i < nodes; ++i) {
      if (i != j && b(i, j) != 0.0 && --indegree[i] == 0) ready.push(i);
    }
  }
  if (visited != nodes) {
    throw Error(ErrorCode::CyclicGraph, "the structural matrix contains a directed cycle");
  }

  const Mat i_minus_b = Mat::Identity(nodes, nodes) - b;
  Eigen::JacobiSVD<Mat> svd(i_minus_b);
  const double smin = svd.singularValues()(nodes - 1);
  if (!(smin > kSingularTol)) {
    throw Error(ErrorCode::NearSingular,
                "I - B is numerically singular (smallest singular value " + std::to_string(smin) + ")");
  }
}

JointSecondMoment population_moments(const SemModel& sem, const InterventionSpec& iv) {
  validate_acyclic(sem);
  const int p = sem.p();
  require_dims(iv.p() == p, "intervention dimension must match the SEM");

  Mat noise = sem.eta_cov;
  noise.bottomRightCorner(p, p) += iv.second_moment();

  const Mat i_minus_b = Mat::Identity(p + 1, p + 1) - sem.structural_matrix();
  const Mat mix = i_minus_b.partialPivLu().inverse();
  Mat m = mix * noise * mix.transpose();
  m = 0.5 * (m + m.transpose());
  return JointSecondMoment{std::move(m)};
}

Vec population_mean(const SemModel& sem, const InterventionSpec& iv) {
  validate_acyclic(sem);
  const int p = sem.p();
  require_dims(iv.p() == p, "intervention dimension must match the SEM");
  Vec shift = Vec::Zero(p + 1);
  shift.tail(p) = iv.mean();
  const Mat i_minus_b = Mat::Identity(p + 1, p + 1) - sem.structural_matrix();
  return i_minus_b.partialPivLu().solve(shift);
}

IndexSet children_of_outcome(const SemModel& sem) {
  IndexSet d;
  for (int j = 0; j < sem.b_yx.size(); ++j) {
    if (sem.b_yx(j) != 0.0) d.push_back(j);
  }
  return d;
}

IndexSet causal_parents(const SemModel& sem) {
  IndexSet s;
  for (int j = 0; j < sem.beta_star.size(); ++j) {
    if (sem.beta_star(j) != 0.0) s.push_back(j);
  }
  return s;
}

}  // namespace negdro
