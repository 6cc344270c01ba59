#include "negdro/simulate.hpp"

#include <algorithm>
#include <cmath>

namespace negdro {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Symmetric square root factor L with L L^T = cov; tolerates singular PSD input.
Mat psd_factor(const Mat& cov) {
  if (cov.size() == 0) return cov;
  Eigen::SelfAdjointEigenSolver<Mat> es(cov);
  const Vec root = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * root.asDiagonal();
}

Mat standard_normal(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Mat z(rows, cols);
  // Row-major fill order keeps one sample's draws contiguous in the stream.
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) z(i, j) = normal(rng);
  }
  return z;
}

}  // namespace

std::uint64_t mix_seed(std::uint64_t master, std::uint64_t index) {
  return splitmix64(splitmix64(master) ^ (index + 0x632be59bd9b4e019ULL));
}

std::uint64_t mix_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b) {
  return mix_seed(mix_seed(master, a), b);
}

EnvironmentData sample_environment(const SemModel& sem, const EnvironmentSpec& spec, Rng& rng) {
  validate_acyclic(sem);
  const int p = sem.p();
  const auto n = static_cast<Eigen::Index>(spec.n);
  const InterventionSpec& iv = spec.intervention;
  require_dims(iv.p() == p, "intervention dimension must match the SEM");
  if (spec.n < 1) throw Error(ErrorCode::InvalidArgument, "sample size must be >= 1");

  // Rows are samples of eps = eta + (0, delta).
  Mat eps = standard_normal(n, p + 1, rng) * psd_factor(sem.eta_cov).transpose();

  const InterventionKind kind = iv.kind();
  if (kind != InterventionKind::None) {
    auto delta = eps.rightCols(p);
    delta.rowwise() += iv.mean().transpose();
    if (iv.gaussian_cov().any()) {
      delta += standard_normal(n, p, rng) * psd_factor(iv.gaussian_cov()).transpose();
    }
    if (iv.half_widths().any()) {
      std::uniform_real_distribution<double> unit(-1.0, 1.0);
      for (Eigen::Index i = 0; i < n; ++i) {
        for (int j = 0; j < p; ++j) {
          const double a = iv.half_widths()(j);
          if (a != 0.0) delta(i, j) += a * unit(rng);
        }
      }
    }
  }

  // (Y, X)^T = (I - B)^{-1} eps^T, applied row-wise.
  const Mat i_minus_b = Mat::Identity(p + 1, p + 1) - sem.structural_matrix();
  const Mat mix_t = i_minus_b.partialPivLu().inverse().transpose();
  const Mat z = eps * mix_t;

  EnvironmentData out;
  out.y = z.col(0);
  out.x = z.rightCols(p);
  return out;
}

MultiEnvData sample_scenario(const Scenario& scenario) {
  scenario.validate();
  MultiEnvData data;
  data.envs.reserve(scenario.environments.size());
  for (std::size_t e = 0; e < scenario.environments.size(); ++e) {
    Rng rng(mix_seed(scenario.seed, e));
    data.envs.push_back(sample_environment(scenario.sem, scenario.environments[e], rng));
  }
  return data;
}

namespace {

Scenario example1(const ScenarioParams& params) {
  if (params.sigma.size() < 2) {
    throw Error(ErrorCode::InvalidArgument, "example1 needs at least two sigma values");
  }
  for (double s : params.sigma) {
    if (!(s > 0.0)) throw Error(ErrorCode::InvalidArgument, "example1 sigma values must be positive");
  }
  Scenario sc;
  sc.name = "example1";
  sc.seed = params.seed;
  sc.sem.beta_star = Vec::Zero(2);
  sc.sem.beta_star << 1.0, 0.0;
  sc.sem.b_yx = Vec::Zero(2);
  sc.sem.b_yx << 0.0, 1.0;
  sc.sem.b_xx = Mat::Zero(2, 2);

  // Covariate noise variance sigma_e^2 is split into a shared part at the
  // smallest level and a Gaussian intervention carrying the excess.
  const double s_min = *std::min_element(params.sigma.begin(), params.sigma.end());
  sc.sem.eta_cov = Mat::Identity(3, 3);
  sc.sem.eta_cov(1, 1) = sc.sem.eta_cov(2, 2) = s_min * s_min;
  for (double s : params.sigma) {
    const double excess = s * s - s_min * s_min;
    EnvironmentSpec env;
    env.n = params.n;
    env.intervention = excess > 0.0
                           ? InterventionSpec::gaussian(Vec::Zero(2), excess * Mat::Identity(2, 2))
                           : InterventionSpec::none(2);
    sc.environments.push_back(env);
  }
  return sc;
}

Scenario example2(const std::string& variant, const ScenarioParams& params) {
  Scenario sc;
  sc.name = "example2_" + variant;
  sc.seed = params.seed;
  auto& sem = sc.sem;
  sem.beta_star = Vec::Zero(4);
  sem.beta_star(1) = 2.0;
  sem.b_yx = Vec::Zero(4);
  sem.b_yx(2) = -1.0;
  sem.b_xx = Mat::Zero(4, 4);
  sem.b_xx(1, 0) = 1.0;
  sem.b_xx(2, 0) = 0.5;
  sem.eta_cov = Mat::Identity(5, 5);

  double off_child = 0.0;
  if (variant == "weak") off_child = 0.01;
  if (variant == "strong") off_child = 0.25;

  Mat cov2 = off_child * Mat::Identity(4, 4);
  cov2(2, 2) = 2.0;  // the outcome's only child, X3
  sc.environments.push_back({params.n, InterventionSpec::none(4)});
  sc.environments.push_back({params.n, InterventionSpec::gaussian(Vec::Zero(4), cov2)});
  return sc;
}

Scenario section6(bool limited, const ScenarioParams& params) {
  const int p = params.p;
  if (p < 5) throw Error(ErrorCode::InvalidArgument, "section6 scenarios need p >= 5");
  Scenario sc;
  sc.name = limited ? "section6_limited" : "section6";
  sc.seed = params.seed;
  auto& sem = sc.sem;
  sem.beta_star = Vec::Zero(p);
  sem.beta_star(0) = 1.0;
  sem.beta_star(2) = 1.0;
  sem.b_yx = Vec::Zero(p);
  sem.b_yx(3) = 1.0;
  sem.b_yx(4) = -1.0;
  sem.b_xx = Mat::Zero(p, p);
  sem.b_xx(1, 0) = 1.0;
  sem.b_xx(2, 1) = 1.0;
  sem.eta_cov = Mat::Identity(p + 1, p + 1);

  const int tail = p - 5;
  auto head_block = [p](const Vec& mean, const Mat& cov) {
    Vec m = Vec::Zero(p);
    Mat c = Mat::Zero(p, p);
    m.head(5) = mean;
    c.topLeftCorner(5, 5) = cov;
    return InterventionSpec::gaussian(m, c);
  };

  std::vector<InterventionSpec> heads;
  heads.push_back(InterventionSpec::none(p));
  heads.push_back(head_block(Vec::Zero(5), 9.0 * Mat::Identity(5, 5)));
  Vec shift = Vec::Zero(p);
  shift.head(5) << 1.0, 1.5, 2.0, 2.5, 3.0;
  heads.push_back(InterventionSpec::fixed(shift));
  Vec widths = Vec::Zero(p);
  widths.head(5).setConstant(0.5);
  heads.push_back(InterventionSpec::uniform(widths));

  for (int e = 1; e <= 4; ++e) {
    InterventionSpec iv = heads[e - 1];
    if (!limited && tail > 0) {
      Mat c = Mat::Zero(p, p);
      c.bottomRightCorner(tail, tail) = (e * e / 4.0) * Mat::Identity(tail, tail);
      iv.combine(InterventionSpec::gaussian(Vec::Zero(p), c));
    }
    sc.environments.push_back({params.n, iv});
  }
  return sc;
}

}  // namespace

const std::vector<std::string>& builtin_scenario_names() {
  static const std::vector<std::string> names{"example1",        "example2_limited",
                                              "example2_weak",   "example2_strong",
                                              "section6",        "section6_limited"};
  return names;
}

Scenario builtin_scenario(const std::string& name, const ScenarioParams& params) {
  Scenario sc;
  if (name == "example1") {
    sc = example1(params);
  } else if (name == "example2_limited") {
    sc = example2("limited", params);
  } else if (name == "example2_weak") {
    sc = example2("weak", params);
  } else if (name == "example2_strong") {
    sc = example2("strong", params);
  } else if (name == "section6") {
    sc = section6(false, params);
  } else if (name == "section6_limited") {
    sc = section6(true, params);
  } else {
    throw Error(ErrorCode::UnknownScenario, "no builtin scenario named '" + name + "'");
  }
  sc.validate();
  return sc;
}

}  // namespace negdro
