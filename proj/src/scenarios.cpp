#include "aggsim/scenarios.hpp"

#include <cmath>
#include <json.hpp>

#include "aggsim/errors.hpp"
#include "aggsim/rng.hpp"

namespace aggsim {

namespace {

Eigen::VectorXd to_vec(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(),
                                           static_cast<Eigen::Index>(v.size()));
}

constexpr std::uint64_t kCongestionSalt = 0x636f6e67ull;
constexpr std::uint64_t kPevSalt = 0x70657600ull;

}  // namespace

std::pair<GamePopulation, Scenario> build_congestion(
    long n_agents, std::uint64_t seed, const CongestionParams& params) {
  if (n_agents < 1) raise(ErrorCode::invalid_input, "need at least one agent");
  if (static_cast<int>(params.caps.size()) != params.n)
    raise(ErrorCode::invalid_input, "capacity vector length mismatch");

  const int n = params.n;
  // First-order expansion of the per-edge delay 1/(beta_e - s) around the
  // origin: slope 1/beta_e^2 weights the average, offset 1/beta_e is folded
  // into each user's linear cost.
  SymMatrix c_weight =
      SymMatrix::scaled_identity(n, 1.0 / (params.beta_e * params.beta_e));
  Eigen::VectorXd offset =
      Eigen::VectorXd::Constant(n, 1.0 / params.beta_e);
  SymMatrix k_gain = SymMatrix::scaled_identity(n, params.k_gain);
  ConstraintSet coupling =
      ConstraintSet::box(Eigen::VectorXd::Zero(n), to_vec(params.caps));

  std::vector<Agent> agents;
  agents.reserve(static_cast<std::size_t>(n_agents));
  for (long i = 0; i < n_agents; ++i) {
    // Per-agent stream keyed by index, so draws are independent of build
    // order and population size.
    Rng rng(seed_mix(seed, static_cast<std::uint64_t>(i), kCongestionSalt));
    Eigen::VectorXd direction = rng.simplex(n);
    ConstraintSet set = ConstraintSet::ray(direction, 0.0, params.xi_max);
    double linear = direction.dot(offset);
    CostFunction cost = CostFunction::log_disutility(params.w, linear);
    agents.push_back(make_agent(static_cast<int>(i), std::move(cost),
                                std::move(set)));
  }

  GamePopulation pop =
      make_population(std::move(agents), std::move(c_weight),
                      std::move(k_gain), std::move(coupling), offset);

  nlohmann::json pj;
  pj["n"] = params.n;
  pj["beta_e"] = params.beta_e;
  pj["caps"] = params.caps;
  pj["xi_max"] = params.xi_max;
  pj["w"] = params.w;
  pj["k_gain"] = params.k_gain;

  Scenario sc;
  sc.name = "congestion";
  sc.seed = seed;
  sc.n_agents = n_agents;
  sc.dim = n;
  sc.params_json = pj.dump();
  sc.coordinator.alpha_bar = 1.0;
  return {std::move(pop), std::move(sc)};
}

std::vector<double> default_pev_demand(int n) {
  // Placeholder inflexible-demand shape (valley at the horizon ends, peak in
  // the middle); a config input, not a calibrated profile.
  constexpr double pi = 3.14159265358979323846;
  std::vector<double> d(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j)
    d[static_cast<std::size_t>(j)] =
        0.5 + 0.3 * std::sin(pi * j / static_cast<double>(n - 1));
  return d;
}

std::vector<double> default_pev_caps(int n) {
  std::vector<double> caps(static_cast<std::size_t>(n), 0.1);
  for (int j : {1, 2, 12, 13, 14})
    if (j <= n) caps[static_cast<std::size_t>(j - 1)] = 0.04;
  return caps;
}

std::pair<GamePopulation, Scenario> build_pev(long n_agents,
                                              std::uint64_t seed,
                                              const PevParams& params) {
  if (n_agents < 1) raise(ErrorCode::invalid_input, "need at least one agent");
  const int n = params.n;
  std::vector<double> d =
      params.d_profile.empty() ? default_pev_demand(n) : params.d_profile;
  std::vector<double> caps =
      params.caps.empty() ? default_pev_caps(n) : params.caps;
  if (static_cast<int>(d.size()) != n)
    raise(ErrorCode::invalid_input, "demand profile length mismatch");
  if (static_cast<int>(caps.size()) != n)
    raise(ErrorCode::invalid_input, "capacity vector length mismatch");

  SymMatrix c_weight = SymMatrix::scaled_identity(n, params.price_slope);
  SymMatrix k_gain = SymMatrix::scaled_identity(n, params.k_gain);
  ConstraintSet coupling =
      ConstraintSet::box(Eigen::VectorXd::Zero(n), to_vec(caps));
  // Pricing terms common to all agents: a*d + b*1.
  Eigen::VectorXd offset = params.price_slope * to_vec(d) +
                           Eigen::VectorXd::Constant(n, params.price_base);

  std::vector<Agent> agents;
  agents.reserve(static_cast<std::size_t>(n_agents));
  for (long i = 0; i < n_agents; ++i) {
    std::uint64_t agent_seed =
        seed_mix(seed, static_cast<std::uint64_t>(i), kPevSalt);
    bool built = false;
    for (int attempt = 0; attempt < 100 && !built; ++attempt) {
      Rng rng(seed_mix(agent_seed, static_cast<std::uint64_t>(attempt)));
      double q = rng.uniform(params.q_center - params.q_halfwidth,
                             params.q_center + params.q_halfwidth);
      double c = rng.uniform(params.c_center - params.c_halfwidth,
                             params.c_center + params.c_halfwidth);
      double gamma = rng.uniform(params.gamma_center - params.gamma_halfwidth,
                                 params.gamma_center + params.gamma_halfwidth);
      Eigen::VectorXd hi(n);
      for (int j = 0; j < n; ++j)
        hi[j] = rng.uniform01() < params.zero_slot_prob ? 0.0
                                                        : params.slot_level;
      bool v2g = rng.uniform01() < params.v2g_frac;
      Eigen::VectorXd lo = v2g ? Eigen::VectorXd(-0.5 * hi)
                               : Eigen::VectorXd(Eigen::VectorXd::Zero(n));
      if (gamma < lo.sum() || gamma > hi.sum()) continue;  // resample

      // Degradation cost q x^T x + c 1^T x has no 1/2 factor, hence Q = 2q I.
      Eigen::MatrixXd big_q =
          2.0 * q * Eigen::MatrixXd::Identity(n, n);
      Eigen::VectorXd lin = Eigen::VectorXd::Constant(n, c) + offset;
      CostFunction cost = CostFunction::quadratic(std::move(big_q), lin);
      ConstraintSet set =
          ConstraintSet::box_with_budget(std::move(lo), std::move(hi), gamma);
      agents.push_back(make_agent(static_cast<int>(i), std::move(cost),
                                  std::move(set)));
      built = true;
    }
    if (!built)
      raise(ErrorCode::infeasible_set,
            "agent " + std::to_string(i) +
                ": no feasible charging budget after 100 resamples");
  }

  GamePopulation pop =
      make_population(std::move(agents), std::move(c_weight),
                      std::move(k_gain), std::move(coupling), offset);

  nlohmann::json pj;
  pj["n"] = params.n;
  pj["q_center"] = params.q_center;
  pj["q_halfwidth"] = params.q_halfwidth;
  pj["c_center"] = params.c_center;
  pj["c_halfwidth"] = params.c_halfwidth;
  pj["gamma_center"] = params.gamma_center;
  pj["gamma_halfwidth"] = params.gamma_halfwidth;
  pj["a"] = params.price_slope;
  pj["b"] = params.price_base;
  pj["d_profile"] = d;
  pj["caps"] = caps;
  pj["v2g_frac"] = params.v2g_frac;
  pj["zero_slot_prob"] = params.zero_slot_prob;
  pj["slot_level"] = params.slot_level;
  pj["k_gain"] = params.k_gain;

  Scenario sc;
  sc.name = "pev";
  sc.seed = seed;
  sc.n_agents = n_agents;
  sc.dim = n;
  sc.params_json = pj.dump();
  sc.coordinator.alpha_bar = 1.0;
  return {std::move(pop), std::move(sc)};
}

std::pair<GamePopulation, Scenario> build_remark1(double k_gain) {
  if (!(k_gain > 1.0))
    raise(ErrorCode::design_violation,
          "remark1 needs k_gain > 1 so that C + K stays positive definite");

  Eigen::VectorXd lo = Eigen::VectorXd::Constant(1, -1.0);
  Eigen::VectorXd hi = Eigen::VectorXd::Constant(1, 1.0);
  std::vector<Agent> agents;
  for (int i = 0; i < 2; ++i) {
    CostFunction cost = CostFunction::quadratic(
        Eigen::MatrixXd::Identity(1, 1), Eigen::VectorXd::Zero(1));
    agents.push_back(make_agent(i, std::move(cost), ConstraintSet::box(lo, hi)));
  }

  GamePopulation pop = make_population(
      std::move(agents), SymMatrix::scaled_identity(1, -1.0),
      SymMatrix::scaled_identity(1, k_gain), ConstraintSet::box(lo, hi),
      Eigen::VectorXd::Zero(1));

  nlohmann::json pj;
  pj["k_gain"] = k_gain;

  Scenario sc;
  sc.name = "remark1";
  sc.seed = 0;
  sc.n_agents = 2;
  sc.dim = 1;
  sc.params_json = pj.dump();
  return {std::move(pop), std::move(sc)};
}

}  // namespace aggsim
