#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace negdro {

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using Vec = Vector<double>;
using Mat = Matrix<double>;

/// Covariate indices are 0-based throughout the library.
using IndexSet = std::vector<int>;

enum class ErrorCode {
  InvalidArgument,
  DimensionMismatch,
  CyclicGraph,
  NearSingular,
  UnknownScenario,
  UpsilonTooLarge,
  NonFinite,
  EmptyChildSet,
  DimensionTooLarge,
  NoInvariantSubset,
  ConfigInvalid,
  ParseError,
  EmptySelection,
};

const char* to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline void require_dims(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorCode::DimensionMismatch, what);
}

/// Smallest eigenvalue of a symmetric matrix (0 for an empty matrix).
template <typename Derived>
typename Derived::Scalar min_eigenvalue(const Eigen::MatrixBase<Derived>& sym) {
  using Scalar = typename Derived::Scalar;
  if (sym.rows() == 0) return Scalar(0);
  Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> es(sym.eval(), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

template <typename Derived>
typename Derived::Scalar max_eigenvalue(const Eigen::MatrixBase<Derived>& sym) {
  using Scalar = typename Derived::Scalar;
  if (sym.rows() == 0) return Scalar(0);
  Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> es(sym.eval(), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(es.eigenvalues().size() - 1);
}

template <typename Derived>
bool is_symmetric(const Eigen::MatrixBase<Derived>& m, double tol = 1e-10) {
  if (m.rows() != m.cols()) return false;
  if (m.size() == 0) return true;
  const double scale = std::max(1.0, static_cast<double>(m.cwiseAbs().maxCoeff()));
  return (m - m.transpose()).cwiseAbs().maxCoeff() <= tol * scale;
}

}  // namespace negdro
