#pragma once

#include <Eigen/Dense>

namespace aggsim {

// Dense symmetric matrix with the symmetry enforced at construction.
// Holds the aggregate-influence weight C and the coordinator gain K; sizes
// stay small (n <= 32) so everything is dense and eigendecompositions are
// exact enough to act as spectral oracles.
class SymMatrix {
 public:
  static SymMatrix from_dense(const Eigen::MatrixXd& a);
  static SymMatrix identity(int n);
  static SymMatrix scaled_identity(int n, double s);
  static SymMatrix diagonal(const Eigen::VectorXd& d);

  int dim() const { return static_cast<int>(m_.rows()); }
  const Eigen::MatrixXd& dense() const { return m_; }
  double operator()(int i, int j) const { return m_(i, j); }

  SymMatrix plus(const SymMatrix& other) const;
  Eigen::VectorXd apply(const Eigen::VectorXd& x) const { return m_ * x; }

  // Largest absolute eigenvalue.
  double spectral_norm() const;
  double min_eigenvalue() const;

 private:
  explicit SymMatrix(Eigen::MatrixXd m) : m_(std::move(m)) {}
  Eigen::MatrixXd m_;
};

// The 2n x 2n metric P = [C+2K, -K; -K, K] together with its spectral data.
// All monotonicity and rate computations happen in the Hilbert space weighted
// by this matrix.
class MetricP {
 public:
  MetricP(Eigen::MatrixXd p, double norm, double min_eig)
      : p_(std::move(p)), spectral_norm_(norm), min_eigenvalue_(min_eig) {}

  const Eigen::MatrixXd& dense() const { return p_; }
  int dim() const { return static_cast<int>(p_.rows()); }
  double spectral_norm() const { return spectral_norm_; }
  double min_eigenvalue() const { return min_eigenvalue_; }

  double inner(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const {
    return a.dot(p_ * b);
  }
  double squared_norm(const Eigen::VectorXd& a) const { return inner(a, a); }
  double norm(const Eigen::VectorXd& a) const;

 private:
  Eigen::MatrixXd p_;
  double spectral_norm_;
  double min_eigenvalue_;
};

// Eigenvalues of a symmetric matrix, ascending.
Eigen::VectorXd sym_eigenvalues(const Eigen::MatrixXd& a);

}  // namespace aggsim
