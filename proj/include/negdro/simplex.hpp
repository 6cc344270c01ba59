#pragma once

#include "negdro/common.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

namespace negdro {

/// Euclidean projection onto the probability simplex (sort and threshold).
template <typename Derived>
Vector<typename Derived::Scalar> project_simplex(const Eigen::MatrixBase<Derived>& v) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index k = v.size();
  if (k == 0) throw Error(ErrorCode::InvalidArgument, "cannot project an empty vector");
  if (!v.allFinite()) throw Error(ErrorCode::NonFinite, "simplex projection of a non-finite vector");

  std::vector<Scalar> sorted(static_cast<std::size_t>(k));
  for (Eigen::Index i = 0; i < k; ++i) sorted[static_cast<std::size_t>(i)] = v(i);
  std::sort(sorted.begin(), sorted.end(), std::greater<Scalar>());

  Scalar cumulative(0);
  Scalar theta(0);
  for (Eigen::Index j = 0; j < k; ++j) {
    cumulative += sorted[static_cast<std::size_t>(j)];
    const Scalar candidate = (cumulative - Scalar(1)) / static_cast<Scalar>(j + 1);
    if (sorted[static_cast<std::size_t>(j)] - candidate > Scalar(0)) theta = candidate;
  }
  return (v.array() - theta).cwiseMax(Scalar(0)).matrix();
}

/// A point of the probability simplex over environments.
class SimplexWeight {
 public:
  SimplexWeight() = default;
  explicit SimplexWeight(Vec w) : w_(std::move(w)) {
    if (w_.size() == 0 || std::abs(w_.sum() - 1.0) > 1e-10 || w_.minCoeff() < -1e-12) {
      throw Error(ErrorCode::InvalidArgument, "weights are not on the simplex");
    }
  }

  static SimplexWeight uniform(Eigen::Index k) { return SimplexWeight(Vec::Constant(k, 1.0 / k)); }
  static SimplexWeight vertex(Eigen::Index k, Eigen::Index e) {
    Vec w = Vec::Zero(k);
    w(e) = 1.0;
    return SimplexWeight(std::move(w));
  }
  static SimplexWeight project(const Vec& v) { return SimplexWeight(project_simplex(v)); }

  const Vec& values() const { return w_; }
  Eigen::Index size() const { return w_.size(); }
  double operator()(Eigen::Index e) const { return w_(e); }

  /// Weights in the negative-weight set {sum = 1, min >= -gamma}:
  /// (1 + gamma |E|) w - gamma.
  Vec signed_weights(double gamma) const {
    return (1.0 + gamma * static_cast<double>(w_.size())) * w_.array() - gamma;
  }

 private:
  Vec w_;
};

}  // namespace negdro
