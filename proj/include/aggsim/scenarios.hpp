#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "aggsim/population.hpp"
#include "aggsim/schedule.hpp"

namespace aggsim {

// Coordinator tuning attached to a scenario. epsilon defaults to a fraction
// of beta (any value in (0, beta) is admissible; larger is empirically
// faster), overridable with an absolute value.
struct CoordinatorSettings {
  double eps_factor = 0.9;
  std::optional<double> eps_abs;
  bool tight_beta = false;
  bool mann_schedule = false;
  double alpha_bar = 1.0;
  double tol = 1e-4;
  long max_iter = 100000;
  double cert_tol = 1e-3;

  StepSchedule schedule() const {
    return mann_schedule ? StepSchedule::mann()
                         : StepSchedule::constant(alpha_bar);
  }
};

// A reproducible experiment description: same (name, seed, parameters) must
// rebuild a bit-identical population.
struct Scenario {
  std::string name;
  std::uint64_t seed = 0;
  long n_agents = 0;
  int dim = 0;
  std::string params_json;
  CoordinatorSettings coordinator;
};

// Network congestion control: n edges with linearized delay, users with log
// disutility routing a scalar demand along a fixed simplex direction, caps on
// the average edge load.
struct CongestionParams {
  int n = 5;
  double beta_e = 20.0;
  std::vector<double> caps = {2.0, 4.0, 4.0, 4.0, 2.0};
  double xi_max = 10.0;
  double w = 20.0;
  double k_gain = 1.0;
};

std::pair<GamePopulation, Scenario> build_congestion(
    long n_agents, std::uint64_t seed, const CongestionParams& params = {});

// Plug-in electric vehicle charging over a discretized horizon: quadratic
// battery-degradation costs, per-slot charging bounds with an energy budget,
// optional vehicle-to-grid lower bounds, transmission caps on the average.
struct PevParams {
  int n = 14;
  double q_center = 0.004, q_halfwidth = 0.002;
  double c_center = 0.075, c_halfwidth = 0.02;
  double gamma_center = 0.8, gamma_halfwidth = 0.2;
  double price_slope = 0.038;     // a: inverse price elasticity of demand
  double price_base = 0.06;       // b: baseline price
  std::vector<double> d_profile;  // normalized inflexible demand; empty =
                                  // built-in default (non-authoritative)
  std::vector<double> caps;       // empty = 0.04 on slots {1,2,12,13,14},
                                  // 0.1 elsewhere
  double v2g_frac = 0.2;
  double zero_slot_prob = 0.2;
  double slot_level = 0.25;
  double k_gain = 0.05;
};

std::vector<double> default_pev_demand(int n);
std::vector<double> default_pev_caps(int n);

std::pair<GamePopulation, Scenario> build_pev(long n_agents,
                                              std::uint64_t seed,
                                              const PevParams& params = {});

// The two-agent scalar toy game with C = -1 and unit boxes; its control
// target is the known zero at the origin, which anchors the solver tests.
// Requires k_gain > 1 so that C + K stays positive definite.
std::pair<GamePopulation, Scenario> build_remark1(double k_gain);

}  // namespace aggsim
