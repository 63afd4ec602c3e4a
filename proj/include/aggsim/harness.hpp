#pragma once

#include <string>
#include <vector>

#include "aggsim/config.hpp"
#include "aggsim/coordinator.hpp"
#include "aggsim/verify.hpp"

namespace aggsim {

// Outcome of one seeded experiment: build, validate the design, iterate,
// read off the strategies, certify.
struct ExperimentOutcome {
  std::string id;
  std::string scenario;
  long size = 0;
  int replicate = 0;
  std::uint64_t seed = 0;
  DesignReport design;
  double epsilon = 0.0;
  Trajectory trajectory;
  Eigen::VectorXd sigma_final;
  Eigen::VectorXd lambda_final;
  Eigen::MatrixXd strategies;
  Eigen::VectorXd aggregate_profile;
  EquilibriumCertificate certificate;
  double wall_seconds = 0.0;

  bool converged() const {
    return trajectory.status == RunStatus::converged;
  }
};

struct BatchResult {
  ExperimentConfig config;
  std::vector<ExperimentOutcome> experiments;
  bool all_converged = false;
  bool all_certified = false;
};

// Seed for (size, replicate) derived from the base seed with a stable mix, so
// extending the size list never changes existing replicates.
std::uint64_t experiment_seed(std::uint64_t base, long size, int replicate);

// Runs a single experiment at the given size and derived seed. inner_workers
// parallelizes the per-iteration agent responses.
ExperimentOutcome run_single(const ExperimentConfig& cfg, long size,
                             int replicate, int inner_workers);

// The full sweep: every (size, replicate) pair, replicates distributed over
// the worker pool, deterministic regardless of scheduling. Diverged runs are
// recorded, not fatal.
BatchResult run_experiments(const ExperimentConfig& cfg);

// Emits result files into out_dir:
//   trace_<id>.{csv,json}      per-iteration t, residual, alpha, sigma, lambda
//   aggregate_<id>.{csv,json}  equilibrium aggregate profile per slot
//   profile_<id>.json          strategies + control vector (certify input)
//   summary.{csv,json}         iterations-to-threshold per (N, threshold)
//   manifest.json              config echo, seeds, statuses, versions, time
// Timestamps appear only in the manifest; everything else is a pure function
// of the config.
void emit(const BatchResult& result, const std::string& out_dir);

std::string outcome_profile_json(const ExperimentOutcome& outcome);

// Re-checks a saved strategy profile against a freshly built population.
EquilibriumCertificate certify_profile_json(const ExperimentConfig& cfg,
                                            const std::string& profile_json,
                                            double tol);

}  // namespace aggsim
