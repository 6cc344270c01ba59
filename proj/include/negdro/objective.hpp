#pragma once

#include "negdro/risk.hpp"
#include "negdro/simplex.hpp"

#include <limits>
#include <span>

namespace negdro {

// Reparameterized NegDRO objective over the simplex:
//
//   Phi(b)    = max_{w in simplex} sum_e (w_e - c) r_e(b),          c = gamma / (1 + gamma |E|)
//   Phi_mu(b) = max_{w in simplex} sum_e (w_e - c) r_e(b) - mu |w|^2
//
// Phi is the negative-weight minimax objective divided by (1 + gamma |E|).

inline double negative_weight_shift(double gamma, Eigen::Index num_envs) {
  if (!(gamma >= 0.0)) throw Error(ErrorCode::InvalidArgument, "gamma must be nonnegative");
  return gamma / (1.0 + gamma * static_cast<double>(num_envs));
}

template <typename Scalar>
struct PenalizedInnerMax {
  Vector<Scalar> w;
  Scalar value;
};

/// Unique maximizer of the penalized inner problem: w = P_simplex(r / (2 mu)).
template <typename Derived>
PenalizedInnerMax<typename Derived::Scalar> inner_max_penalized(const Eigen::MatrixBase<Derived>& r,
                                                                double gamma, double mu) {
  using Scalar = typename Derived::Scalar;
  if (!(mu > 0.0)) throw Error(ErrorCode::InvalidArgument, "mu must be positive");
  const Scalar c = negative_weight_shift(gamma, r.size());
  Vector<Scalar> w = project_simplex((r / Scalar(2 * mu)).eval());
  const Scalar value = w.dot(r) - Scalar(mu) * w.squaredNorm() - c * r.sum();
  return {std::move(w), value};
}

struct VertexInnerMax {
  Eigen::Index vertex = 0;  // lowest-index maximizer
  IndexSet argmax;          // every environment attaining the maximum
  double value = 0.0;
};

/// Unpenalized inner maximum: the vertex of the largest risk,
/// Phi = max_e r_e - c sum_e r_e.
template <typename Derived>
VertexInnerMax inner_max(const Eigen::MatrixBase<Derived>& r, double gamma) {
  if (r.size() == 0) throw Error(ErrorCode::InvalidArgument, "no environments");
  const double c = negative_weight_shift(gamma, r.size());
  VertexInnerMax out;
  const double top = r.maxCoeff(&out.vertex);
  for (Eigen::Index e = 0; e < r.size(); ++e) {
    if (r(e) == top) out.argmax.push_back(static_cast<int>(e));
  }
  out.vertex = out.argmax.front();
  out.value = top - c * r.sum();
  return out;
}

inline double phi(std::span<const EnvMoments> ms, const Vec& b, double gamma) {
  return inner_max(risks(ms, b), gamma).value;
}

inline double phi_mu(std::span<const EnvMoments> ms, const Vec& b, double gamma, double mu) {
  return inner_max_penalized(risks(ms, b), gamma, mu).value;
}

/// Danskin gradient sum_e (wbar_e - c) grad r_e(b).
inline Vec phi_mu_gradient(std::span<const EnvMoments> ms, const Vec& b, double gamma, double mu) {
  const Vec r = risks(ms, b);
  const auto inner = inner_max_penalized(r, gamma, mu);
  const double c = negative_weight_shift(gamma, r.size());
  Vec g = Vec::Zero(b.size());
  for (std::size_t e = 0; e < ms.size(); ++e) {
    g += (inner.w(static_cast<Eigen::Index>(e)) - c) * risk_gradient(ms[e], b);
  }
  return g;
}

/// Subgradient of Phi at b using the lowest-index maximizing vertex.
inline Vec phi_subgradient(std::span<const EnvMoments> ms, const Vec& b, double gamma) {
  const Vec r = risks(ms, b);
  const auto inner = inner_max(r, gamma);
  const double c = negative_weight_shift(gamma, r.size());
  Vec g = Vec::Zero(b.size());
  for (std::size_t e = 0; e < ms.size(); ++e) {
    const double coef = (static_cast<Eigen::Index>(e) == inner.vertex ? 1.0 : 0.0) - c;
    g += coef * risk_gradient(ms[e], b);
  }
  return g;
}

struct ObjectiveForms {
  double minimax;       // max over the negative-weight set of sum_e w_e r_e
  double penalty_form;  // max_e r_e + gamma |E| (max_e r_e - mean_e r_e)
};

/// Both unscaled forms of the NegDRO objective for one risk vector. The
/// minimax value enumerates every vertex of {sum w = 1, w >= -gamma}.
template <typename Derived>
ObjectiveForms objective_forms_agree(const Eigen::MatrixBase<Derived>& r, double gamma) {
  const Eigen::Index k = r.size();
  if (k == 0) throw Error(ErrorCode::InvalidArgument, "no environments");
  if (!(gamma >= 0.0)) throw Error(ErrorCode::InvalidArgument, "gamma must be nonnegative");
  const double kd = static_cast<double>(k);

  double minimax = -std::numeric_limits<double>::infinity();
  for (Eigen::Index v = 0; v < k; ++v) {
    double total = 0.0;
    for (Eigen::Index e = 0; e < k; ++e) total += (e == v ? 1.0 + gamma * (kd - 1.0) : -gamma) * r(e);
    minimax = std::max(minimax, total);
  }
  const double top = r.maxCoeff();
  const double penalty = top + gamma * kd * (top - r.mean());
  return {minimax, penalty};
}

inline ObjectiveForms objective_forms_agree(std::span<const EnvMoments> ms, const Vec& b, double gamma) {
  return objective_forms_agree(risks(ms, b), gamma);
}

}  // namespace negdro
