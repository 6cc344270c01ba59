#pragma once

#include "negdro/common.hpp"
#include "negdro/model.hpp"
#include "negdro/simulate.hpp"

#include <optional>
#include <span>
#include <vector>

namespace negdro {

/// Sufficient statistics of one environment for the squared loss:
/// gram = E[X X^T], cross = E[X Y], ysq = E[Y^2]. `n` is empty for
/// population moments.
template <typename Scalar>
struct BasicEnvMoments {
  Matrix<Scalar> gram;
  Vector<Scalar> cross;
  Scalar ysq{0};
  std::optional<std::size_t> n;

  int p() const { return static_cast<int>(cross.size()); }
  bool is_population() const { return !n.has_value(); }

  /// The bordered (p+1)x(p+1) matrix [[ysq, cross^T], [cross, gram]].
  Matrix<Scalar> bordered() const {
    const int k = p();
    Matrix<Scalar> m(k + 1, k + 1);
    m(0, 0) = ysq;
    m.block(1, 0, k, 1) = cross;
    m.block(0, 1, 1, k) = cross.transpose();
    m.bottomRightCorner(k, k) = gram;
    return m;
  }
};

using EnvMoments = BasicEnvMoments<double>;

template <typename Scalar>
BasicEnvMoments<Scalar> env_moments(const Matrix<Scalar>& x, const Vector<Scalar>& y) {
  require_dims(x.rows() == y.size(), "x and y must have the same number of rows");
  if (y.size() < 1) throw Error(ErrorCode::InvalidArgument, "moments need at least one sample");
  const Scalar inv_n = Scalar(1) / static_cast<Scalar>(y.size());
  BasicEnvMoments<Scalar> m;
  m.gram = Matrix<Scalar>::Zero(x.cols(), x.cols());
  m.gram.template selfadjointView<Eigen::Lower>().rankUpdate(x.transpose(), inv_n);
  m.gram.template triangularView<Eigen::StrictlyUpper>() = m.gram.transpose();
  m.cross = x.transpose() * y * inv_n;
  m.ysq = y.squaredNorm() * inv_n;
  m.n = static_cast<std::size_t>(y.size());
  return m;
}

inline EnvMoments env_moments(const EnvironmentData& data) { return env_moments<double>(data.x, data.y); }

std::vector<EnvMoments> env_moments(const MultiEnvData& data);

/// Population moments of one environment from the SEM.
EnvMoments population_env_moments(const SemModel& sem, const InterventionSpec& iv);
std::vector<EnvMoments> population_env_moments(const Scenario& scenario);

/// ysq - 2 b^T cross + b^T gram b.
template <typename Scalar, typename Derived>
Scalar risk(const BasicEnvMoments<Scalar>& m, const Eigen::MatrixBase<Derived>& b) {
  require_dims(b.size() == m.p(), "coefficient vector has the wrong length");
  return m.ysq - Scalar(2) * b.dot(m.cross) + b.dot(m.gram * b);
}

/// 2 (gram b - cross).
template <typename Scalar, typename Derived>
Vector<Scalar> risk_gradient(const BasicEnvMoments<Scalar>& m, const Eigen::MatrixBase<Derived>& b) {
  require_dims(b.size() == m.p(), "coefficient vector has the wrong length");
  return Scalar(2) * (m.gram * b - m.cross);
}

/// Risks of b in every environment.
template <typename Scalar, typename Derived>
Vector<Scalar> risks(std::span<const BasicEnvMoments<Scalar>> ms, const Eigen::MatrixBase<Derived>& b) {
  Vector<Scalar> r(static_cast<Eigen::Index>(ms.size()));
  for (std::size_t e = 0; e < ms.size(); ++e) r(static_cast<Eigen::Index>(e)) = risk(ms[e], b);
  return r;
}

/// Sample-size-weighted average. Population moments count with weight one
/// each; mixing population and empirical moments is rejected.
EnvMoments pooled_moments(std::span<const EnvMoments> ms);

/// M = 2 max_e lambda_max(gram_e): Lipschitz constant of every risk gradient.
double smoothness_constant(std::span<const EnvMoments> ms);

/// Least-squares coefficients gram^{-1} cross (LDLT; throws NearSingular
/// when gram has lambda_min < 1e-10 relative to its scale).
Vec ols(const EnvMoments& m);

}  // namespace negdro
