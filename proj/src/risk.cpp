#include "negdro/risk.hpp"

#include <algorithm>

namespace negdro {

std::vector<EnvMoments> env_moments(const MultiEnvData& data) {
  std::vector<EnvMoments> out;
  out.reserve(data.envs.size());
  for (const auto& env : data.envs) out.push_back(env_moments(env));
  return out;
}

EnvMoments population_env_moments(const SemModel& sem, const InterventionSpec& iv) {
  const JointSecondMoment joint = population_moments(sem, iv);
  EnvMoments m;
  m.gram = joint.gram();
  m.cross = joint.cross();
  m.ysq = joint.ysq();
  return m;
}

std::vector<EnvMoments> population_env_moments(const Scenario& scenario) {
  std::vector<EnvMoments> out;
  out.reserve(scenario.environments.size());
  for (const auto& env : scenario.environments) {
    out.push_back(population_env_moments(scenario.sem, env.intervention));
  }
  return out;
}

EnvMoments pooled_moments(std::span<const EnvMoments> ms) {
  if (ms.empty()) throw Error(ErrorCode::InvalidArgument, "cannot pool an empty list of moments");
  const bool population = ms.front().is_population();
  const int p = ms.front().p();
  double total = 0.0;
  for (const auto& m : ms) {
    require_dims(m.p() == p, "pooled environments must share the dimension");
    if (m.is_population() != population) {
      throw Error(ErrorCode::InvalidArgument, "cannot pool population and empirical moments");
    }
    if (!population && *m.n < 1) throw Error(ErrorCode::InvalidArgument, "every environment needs n >= 1");
    total += population ? 1.0 : static_cast<double>(*m.n);
  }

  EnvMoments pooled;
  pooled.gram = Mat::Zero(p, p);
  pooled.cross = Vec::Zero(p);
  pooled.ysq = 0.0;
  for (const auto& m : ms) {
    const double w = (population ? 1.0 : static_cast<double>(*m.n)) / total;
    pooled.gram += w * m.gram;
    pooled.cross += w * m.cross;
    pooled.ysq += w * m.ysq;
  }
  if (!population) pooled.n = static_cast<std::size_t>(total);
  return pooled;
}

double smoothness_constant(std::span<const EnvMoments> ms) {
  double top = 0.0;
  for (const auto& m : ms) top = std::max(top, max_eigenvalue(m.gram));
  return 2.0 * top;
}

Vec ols(const EnvMoments& m) {
  const double scale = std::max(1.0, max_eigenvalue(m.gram));
  if (min_eigenvalue(m.gram) < 1e-10 * scale) {
    throw Error(ErrorCode::NearSingular, "Gram matrix is singular; least squares is not identified");
  }
  return m.gram.ldlt().solve(m.cross);
}

}  // namespace negdro
