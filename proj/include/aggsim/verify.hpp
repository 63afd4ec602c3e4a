#pragma once

#include <functional>
#include <vector>

#include "aggsim/coordinator.hpp"
#include "aggsim/population.hpp"

namespace aggsim {

// Certifies a strategy profile against the equilibrium definition: each
// strategy must be a best response to the signal built from the profile
// average and the control vector, and the average must lie in the coupling
// set.
struct EquilibriumCertificate {
  Eigen::VectorXd residuals;  // per-agent best-response distances
  double max_residual = 0.0;
  double feasibility_distance = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

EquilibriumCertificate check_equilibrium(const GamePopulation& pop,
                                         const Eigen::MatrixXd& strategies,
                                         const Eigen::VectorXd& lambda_bar,
                                         double tol, int workers = 1);

// Diminishing or constant dual step for the decomposition oracle. The
// classic 1/(1+t) decay is the default; a constant step sized from the dual
// gradient's Lipschitz bound converges much faster on well-behaved instances
// and is what the cross-validation suites use.
struct DualStepRule {
  enum class Kind { diminishing, diminishing_sqrt, constant };
  Kind kind = Kind::diminishing;
  double eps0 = 0.0;  // <= 0 means: pick 0.1/||K|| (diminishing variants) or
                      // 1/L_dual (constant)

  static DualStepRule diminishing(double eps0 = 0.0) {
    return {Kind::diminishing, eps0};
  }
  static DualStepRule diminishing_sqrt(double eps0 = 0.0) {
    return {Kind::diminishing_sqrt, eps0};
  }
  static DualStepRule constant(double eps0 = 0.0) {
    return {Kind::constant, eps0};
  }
};

struct DualOracleResult {
  Eigen::VectorXd coordinator_point;  // the aggregate-side primal block
  Eigen::MatrixXd strategies;         // one column per agent
  Eigen::VectorXd lambda;             // dual iterate at termination
  long iterations = 0;
  double gap = 0.0;  // || x0 - (1/N) sum x^i || at termination
};

// Independent equilibrium generator: dual decomposition on the coupled
// program with the average frozen at sigma_fixed inside the agent costs.
// Three blocks per sweep: coordinator primal (projection of N K lambda onto
// S), agent primals (optimal responses to C sigma_fixed + K lambda), dual
// ascent on the averaging constraint.
DualOracleResult dual_decomposition_oracle(const GamePopulation& pop,
                                           const Eigen::VectorXd& sigma_fixed,
                                           const DualStepRule& rule,
                                           long max_iter, double gap_tol);

// Decay of the distance between equilibrium strategies and exact Nash best
// responses (own contribution included in the average) as the population
// grows; bounded by c/N.
struct EpsNReport {
  std::vector<long> sizes;
  std::vector<double> eps_values;
  std::vector<double> cost_gaps;
  double slope = 0.0;      // least-squares slope of log eps vs log N
  double envelope = 0.0;   // max over sizes of N * eps_N
  bool all_zero = false;   // no aggregative coupling in the cost
};

using PopulationFamily =
    std::function<GamePopulation(long n_agents, std::uint64_t seed)>;

EpsNReport measure_eps_N(const PopulationFamily& family,
                         const Eigen::VectorXd& lambda_init,
                         const std::vector<long>& sizes, std::uint64_t seed,
                         double run_tol = 1e-10, long run_max_iter = 200000);

// Audits the logarithmic rate bound
//   ||z_{t+1} - z_t||_P^2 <= ((3/abar - 1)/(t+1)) ||z_0 - z_bar||_P^2
// at every recorded iteration of a constant-step trajectory.
struct RateCheck {
  bool pass = false;
  double worst_violation = 0.0;  // max over t of (lhs-rhs)/||z0-zbar||_P^2
};

RateCheck rate_bound_check(const Trajectory& traj, const MetricP& metric,
                           double alpha_bar, const Eigen::VectorXd& z_bar);

}  // namespace aggsim
