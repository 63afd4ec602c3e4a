#pragma once

#include <vector>

#include "aggsim/operator_core.hpp"
#include "aggsim/population.hpp"
#include "aggsim/schedule.hpp"

namespace aggsim {

// The pair iterated by the control law: sigma estimates the average strategy,
// lambda is the coupling-constraint control vector.
struct CoordinatorState {
  Eigen::VectorXd sigma;
  Eigen::VectorXd lambda;
  long t = 0;
};

struct TrajectoryRecord {
  long t = 0;
  Eigen::VectorXd sigma;
  Eigen::VectorXd lambda;
  Eigen::VectorXd aggregate;
  double residual = 0.0;  // Euclidean norm of Theta at this iterate
  double alpha = 0.0;
  double wall_seconds = 0.0;
};

enum class RunStatus { converged, max_iterations, diverged };

struct Trajectory {
  std::vector<TrajectoryRecord> records;
  RunStatus status = RunStatus::max_iterations;

  // First iteration with residual <= threshold, -1 if never reached.
  long iterations_to(double threshold) const;
  const TrajectoryRecord& back() const { return records.back(); }
};

struct RunConfig {
  double epsilon = 0.0;
  StepSchedule schedule = StepSchedule::constant(1.0);
  double tol = 1e-4;
  long max_iter = 100000;
  int workers = 1;
  double divergence_factor = 1e8;
};

// All N optimal responses to the broadcast signal C sigma + K lambda, one
// column per agent. Responses may be evaluated by several workers; the
// columns are written by index so the layout does not depend on scheduling.
Eigen::MatrixXd all_responses(const GamePopulation& pop,
                              const Eigen::VectorXd& sigma,
                              const Eigen::VectorXd& lambda, int workers = 1);

// (1/N) sum of the optimal responses. The reduction is a fixed pairwise tree
// over agent indices, so the result is bit-stable for any worker count.
Eigen::VectorXd aggregate(const GamePopulation& pop,
                          const Eigen::VectorXd& sigma,
                          const Eigen::VectorXd& lambda, int workers = 1);

// argmin over S of (1/2) y^T y + (K(sigma-lambda))^T y, i.e. the projection
// of -K(sigma-lambda) onto S.
Eigen::VectorXd coordinator_response(const Eigen::VectorXd& sigma,
                                     const Eigen::VectorXd& lambda,
                                     const SymMatrix& k_gain,
                                     const ConstraintSet& coupling);

// Gamma(z) = -[A; 2A - x0] with A the aggregate and x0 the coordinator
// response, both at (sigma, lambda).
Eigen::VectorXd gamma(const GamePopulation& pop, const Eigen::VectorXd& sigma,
                      const Eigen::VectorXd& lambda, int workers = 1);

// Theta(z) = M z + Gamma(z) = [sigma - A; sigma - 2A + x0]; its zero is the
// control target.
Eigen::VectorXd theta(const GamePopulation& pop, const Eigen::VectorXd& sigma,
                      const Eigen::VectorXd& lambda, int workers = 1);

// One forward-backward update:
//   z+ = (1-alpha) z + alpha (I + eps M)^{-1} (z - eps Gamma(z)).
CoordinatorState step(const GamePopulation& pop, const CoordinatorState& state,
                      double epsilon, double alpha, int workers = 1);

// The fixed-point map T(z) = (I + eps M)^{-1} (z - eps Gamma(z)); 2/3-averaged
// in the P-metric under the design conditions.
Eigen::VectorXd fb_map(const GamePopulation& pop, const Eigen::VectorXd& z,
                       double epsilon, int workers = 1);

// Iterates the control law until the Euclidean residual ||Theta|| falls below
// tol, recording every iteration. Never silent: the terminal status reports
// convergence, iteration exhaustion, or divergence (which the theory forbids,
// so it flags implementation bugs).
Trajectory run(const GamePopulation& pop, const RunConfig& config,
               const CoordinatorState& init);

inline Eigen::VectorXd join_state(const Eigen::VectorXd& sigma,
                                  const Eigen::VectorXd& lambda) {
  Eigen::VectorXd z(sigma.size() + lambda.size());
  z << sigma, lambda;
  return z;
}

}  // namespace aggsim
