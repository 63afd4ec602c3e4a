#include "aggsim/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

#include "aggsim/errors.hpp"

namespace aggsim {

SymMatrix SymMatrix::from_dense(const Eigen::MatrixXd& a) {
  if (a.rows() < 1 || a.rows() != a.cols())
    raise(ErrorCode::invalid_input, "symmetric matrix must be square, n >= 1");
  if (!a.allFinite())
    raise(ErrorCode::invalid_input, "symmetric matrix has non-finite entries");
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = i + 1; j < a.cols(); ++j)
      if (a(i, j) != a(j, i))
        raise(ErrorCode::invalid_input, "matrix is not symmetric as stored");
  return SymMatrix(a);
}

SymMatrix SymMatrix::identity(int n) {
  return SymMatrix(Eigen::MatrixXd::Identity(n, n));
}

SymMatrix SymMatrix::scaled_identity(int n, double s) {
  return SymMatrix(s * Eigen::MatrixXd::Identity(n, n));
}

SymMatrix SymMatrix::diagonal(const Eigen::VectorXd& d) {
  if (d.size() < 1) raise(ErrorCode::invalid_input, "empty diagonal");
  return SymMatrix(Eigen::MatrixXd(d.asDiagonal()));
}

SymMatrix SymMatrix::plus(const SymMatrix& other) const {
  if (dim() != other.dim())
    raise(ErrorCode::invalid_input, "dimension mismatch in matrix sum");
  return SymMatrix(m_ + other.m_);
}

Eigen::VectorXd sym_eigenvalues(const Eigen::MatrixXd& a) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a,
                                                    Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    raise(ErrorCode::internal, "eigendecomposition failed");
  return es.eigenvalues();
}

double SymMatrix::spectral_norm() const {
  Eigen::VectorXd ev = sym_eigenvalues(m_);
  return std::max(std::abs(ev[0]), std::abs(ev[ev.size() - 1]));
}

double SymMatrix::min_eigenvalue() const { return sym_eigenvalues(m_)[0]; }

double MetricP::norm(const Eigen::VectorXd& a) const {
  double s = squared_norm(a);
  return s > 0.0 ? std::sqrt(s) : 0.0;
}

}  // namespace aggsim
