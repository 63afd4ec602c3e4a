#include "aggsim/operator_core.hpp"

#include <cmath>

#include "aggsim/errors.hpp"

namespace aggsim {

bool is_positive_definite(const SymMatrix& m) {
  Eigen::VectorXd ev = sym_eigenvalues(m.dense());
  double largest = std::max(std::abs(ev[0]), std::abs(ev[ev.size() - 1]));
  return ev[0] > kPdTolerance * largest;
}

namespace {

Eigen::MatrixXd assemble_p(const SymMatrix& c_weight,
                           const SymMatrix& k_gain) {
  int n = c_weight.dim();
  Eigen::MatrixXd p(2 * n, 2 * n);
  p.topLeftCorner(n, n) = c_weight.dense() + 2.0 * k_gain.dense();
  p.topRightCorner(n, n) = -k_gain.dense();
  p.bottomLeftCorner(n, n) = -k_gain.dense();
  p.bottomRightCorner(n, n) = k_gain.dense();
  return p;
}

}  // namespace

MetricP build_metric(const SymMatrix& c_weight, const SymMatrix& k_gain) {
  if (c_weight.dim() != k_gain.dim())
    raise(ErrorCode::invalid_input, "C and K must have the same dimension");
  if (!is_positive_definite(k_gain))
    raise(ErrorCode::design_violation, "K is not positive definite");
  if (!is_positive_definite(c_weight.plus(k_gain)))
    raise(ErrorCode::design_violation, "C+K is not positive definite");

  Eigen::MatrixXd p = assemble_p(c_weight, k_gain);
  Eigen::VectorXd ev = sym_eigenvalues(p);
  double min_eig = ev[0];
  double max_abs = std::max(std::abs(ev[0]), std::abs(ev[ev.size() - 1]));
  if (!(min_eig > kPdTolerance * max_abs))
    raise(ErrorCode::design_violation, "P is not positive definite");
  return MetricP(std::move(p), max_abs, min_eig);
}

double cocoercivity_constant(double ell, const MetricP& p, bool tight) {
  if (!(ell > 0.0))
    raise(ErrorCode::invalid_input, "strong-convexity modulus must be > 0");
  double denom = tight ? (3.0 + 2.0 * std::sqrt(2.0)) : 6.0;
  return ell / (denom * p.spectral_norm());
}

DesignReport validate_design(const SymMatrix& c_weight,
                             const SymMatrix& k_gain, double ell,
                             double epsilon, const StepSchedule& schedule,
                             bool tight_beta) {
  if (c_weight.dim() != k_gain.dim())
    raise(ErrorCode::invalid_input, "C and K must have the same dimension");
  if (!std::isfinite(ell) || !std::isfinite(epsilon))
    raise(ErrorCode::invalid_input, "non-finite design constants");

  DesignReport rep;
  rep.ell = ell;
  rep.epsilon = epsilon;
  rep.k_pd = is_positive_definite(k_gain);
  rep.c_plus_k_pd = is_positive_definite(c_weight.plus(k_gain));

  // Each clause is evaluated independently, so beta is reported from the
  // spectral norm of P even when a block check already failed.
  Eigen::MatrixXd p = assemble_p(c_weight, k_gain);
  Eigen::VectorXd ev = sym_eigenvalues(p);
  rep.p_min_eigenvalue = ev[0];
  rep.p_norm = std::max(std::abs(ev[0]), std::abs(ev[ev.size() - 1]));
  double denom = tight_beta ? (3.0 + 2.0 * std::sqrt(2.0)) : 6.0;
  rep.beta = ell > 0.0 && rep.p_norm > 0.0 ? ell / (denom * rep.p_norm) : 0.0;
  rep.epsilon_ok = epsilon > 0.0 && epsilon < rep.beta;

  constexpr long kProbeHorizon = 1000;
  bool alphas_ok = true;
  for (long t = 0; t < kProbeHorizon; ++t) {
    double a = schedule.alpha(t);
    if (!(a > 0.0 && a < 1.5)) {
      alphas_ok = false;
      break;
    }
  }
  rep.alpha_schedule_valid = alphas_ok && schedule.divergent_sum();

  if (!rep.k_pd)
    rep.failure = "K is not positive definite";
  else if (!rep.c_plus_k_pd)
    rep.failure = "C+K is not positive definite";
  else if (!rep.alpha_schedule_valid)
    rep.failure = "step-size schedule violates the averaging condition";
  else if (!rep.epsilon_ok)
    rep.failure = "epsilon outside the open interval (0, beta)";
  return rep;
}

Eigen::VectorXd apply_M(const Eigen::VectorXd& z) {
  if (z.size() % 2 != 0)
    raise(ErrorCode::invalid_input, "state vector must have even length");
  Eigen::Index n = z.size() / 2;
  Eigen::VectorXd out(z.size());
  out.head(n) = z.head(n);
  out.tail(n) = z.head(n);
  return out;
}

Eigen::VectorXd resolvent_M(double epsilon, const Eigen::VectorXd& z) {
  if (!(epsilon > 0.0))
    raise(ErrorCode::invalid_input, "resolvent requires epsilon > 0");
  if (z.size() % 2 != 0)
    raise(ErrorCode::invalid_input, "state vector must have even length");
  Eigen::Index n = z.size() / 2;
  Eigen::VectorXd out(z.size());
  out.head(n) = z.head(n) / (1.0 + epsilon);
  out.tail(n) = z.tail(n) - epsilon * out.head(n);
  return out;
}

Eigen::MatrixXd m_monotonicity_matrix(const MetricP& p) {
  Eigen::Index m = p.dim();
  Eigen::Index n = m / 2;
  Eigen::MatrixXd mm = Eigen::MatrixXd::Zero(m, m);
  mm.topLeftCorner(n, n) = Eigen::MatrixXd::Identity(n, n);
  mm.bottomLeftCorner(n, n) = Eigen::MatrixXd::Identity(n, n);
  return mm.transpose() * p.dense() + p.dense() * mm;
}

}  // namespace aggsim
