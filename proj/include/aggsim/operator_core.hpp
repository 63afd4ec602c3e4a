#pragma once

#include <string>

#include "aggsim/linalg.hpp"
#include "aggsim/schedule.hpp"

namespace aggsim {

// Positive-definiteness cutoff, relative to the largest |eigenvalue|.
inline constexpr double kPdTolerance = 1e-10;

// Probe tolerance for operator-inequality checks, relative to the squared
// metric distance of the probed pair.
inline constexpr double kProbeTolerance = 1e-9;

// Result of checking the three design conditions that guarantee global
// convergence of the control law:
//   1. every alpha_t in (0, 3/2) with divergent sum alpha_t(3/2 - alpha_t)
//   2. K > 0 and C + K > 0 (which makes P = [C+2K, -K; -K, K] > 0)
//   3. epsilon in (0, beta) with beta = ell / (6 ||P||)
struct DesignReport {
  bool k_pd = false;
  bool c_plus_k_pd = false;
  bool alpha_schedule_valid = false;
  bool epsilon_ok = false;
  double ell = 0.0;
  double beta = 0.0;
  double epsilon = 0.0;
  double p_norm = 0.0;
  double p_min_eigenvalue = 0.0;
  std::string failure;  // first failed clause, empty when all pass

  bool pass() const {
    return k_pd && c_plus_k_pd && alpha_schedule_valid && epsilon_ok;
  }
};

bool is_positive_definite(const SymMatrix& m);

// Assembles P = [C+2K, -K; -K, K] and its spectral data. Raises a
// design-violation error naming the block check that failed when the
// preconditions K > 0, C+K > 0 (equivalently P > 0) do not hold.
MetricP build_metric(const SymMatrix& c_weight, const SymMatrix& k_gain);

// beta = ell / (6 ||P||). The averaged-operator analysis actually yields the
// sharper ell / ((3 + 2 sqrt 2) ||P||); pass tight = true to use it.
double cocoercivity_constant(double ell, const MetricP& p, bool tight = false);

DesignReport validate_design(const SymMatrix& c_weight,
                             const SymMatrix& k_gain, double ell,
                             double epsilon, const StepSchedule& schedule,
                             bool tight_beta = false);

// M = [I, 0; I, 0] acting on z = [sigma; lambda].
Eigen::VectorXd apply_M(const Eigen::VectorXd& z);

// Closed-form (I + eps M)^{-1} z. M is idempotent, so the inverse is
// I - (eps/(1+eps)) M: sigma' = sigma/(1+eps), lambda' = lambda - eps*sigma'.
Eigen::VectorXd resolvent_M(double epsilon, const Eigen::VectorXd& z);

// M^T P + P M, which equals diag(2(C+K), 0); PSD under the design conditions.
Eigen::MatrixXd m_monotonicity_matrix(const MetricP& p);

}  // namespace aggsim
