#include "aggsim/verify.hpp"

#include <cmath>

#include "aggsim/errors.hpp"
#include "aggsim/operator_core.hpp"
#include "aggsim/rng.hpp"

namespace aggsim {

EquilibriumCertificate check_equilibrium(const GamePopulation& pop,
                                         const Eigen::MatrixXd& strategies,
                                         const Eigen::VectorXd& lambda_bar,
                                         double tol, int workers) {
  if (strategies.rows() != pop.dim() || strategies.cols() != pop.count())
    raise(ErrorCode::invalid_input, "strategy profile dimension mismatch");
  (void)workers;

  Eigen::VectorXd sigma_bar = strategies.rowwise().mean();
  Eigen::VectorXd u = pop.signal(sigma_bar, lambda_bar);

  EquilibriumCertificate cert;
  cert.tolerance = tol;
  cert.residuals.resize(pop.count());
  for (int i = 0; i < pop.count(); ++i) {
    Eigen::VectorXd br = optimal_response(pop.agents[i], u);
    cert.residuals[i] = (strategies.col(i) - br).norm();
  }
  cert.max_residual = cert.residuals.maxCoeff();
  cert.feasibility_distance = distance(pop.coupling, sigma_bar);
  cert.pass = cert.max_residual <= tol && cert.feasibility_distance <= tol;
  return cert;
}

namespace {

// Lipschitz bound for the dual gradient lambda -> K(-N x0 + sum x^i):
// the coordinator block is (N ||K||)-Lipschitz, each agent block ||K||/ell_i.
double dual_gradient_lipschitz(const GamePopulation& pop) {
  double k_norm = pop.k_gain.spectral_norm();
  double sum_inv = 0.0;
  for (const auto& a : pop.agents) sum_inv += 1.0 / a.modulus;
  return k_norm * k_norm * (static_cast<double>(pop.count()) + sum_inv);
}

}  // namespace

DualOracleResult dual_decomposition_oracle(const GamePopulation& pop,
                                           const Eigen::VectorXd& sigma_fixed,
                                           const DualStepRule& rule,
                                           long max_iter, double gap_tol) {
  if (sigma_fixed.size() != pop.dim())
    raise(ErrorCode::invalid_input, "frozen average dimension mismatch");

  const int n = pop.dim();
  const double count = static_cast<double>(pop.count());
  const double k_norm = pop.k_gain.spectral_norm();

  double eps0 = rule.eps0;
  if (eps0 <= 0.0) {
    eps0 = rule.kind == DualStepRule::Kind::constant
               ? 1.0 / dual_gradient_lipschitz(pop)
               : 0.1 / k_norm;
  }

  Eigen::VectorXd lambda = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd base = pop.c_weight.apply(sigma_fixed);
  Eigen::MatrixXd strategies(n, pop.count());
  Eigen::VectorXd x0(n);
  double gap = 0.0;

  for (long t = 0; t < max_iter; ++t) {
    // Coordinator primal: argmin over S of (1/2)||y||^2 - N (K lambda)^T y.
    x0 = project(pop.coupling, count * pop.k_gain.apply(lambda));
    // Agent primals: optimal responses to the frozen-average signal.
    Eigen::VectorXd u = base + pop.k_gain.apply(lambda);
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < pop.count(); ++i) {
      strategies.col(i) = optimal_response(pop.agents[i], u);
      sum += strategies.col(i);
    }
    gap = (x0 - sum / count).norm();
    if (gap <= gap_tol)
      return DualOracleResult{x0, strategies, lambda, t, gap};

    double step = eps0;
    if (rule.kind == DualStepRule::Kind::diminishing)
      step = eps0 / static_cast<double>(1 + t);
    else if (rule.kind == DualStepRule::Kind::diminishing_sqrt)
      step = eps0 / std::sqrt(static_cast<double>(1 + t));
    lambda += step * pop.k_gain.apply(-count * x0 + sum);
  }
  raise(ErrorCode::oracle_stall,
        "dual decomposition did not close the primal gap (" +
            std::to_string(gap) + ") within " + std::to_string(max_iter) +
            " iterations");
}

namespace {

// Exact best response with the agent's own contribution inside the average:
//   argmin over X^i of f^i(y) + (1/N) y^T C y + ((1/N) C s + K lambda)^T y,
// with s the sum of the other strategies. For quadratic f^i this is again a
// quadratic program with Q' = Q + (2/N) C.
Eigen::VectorXd own_inclusive_best_response(const GamePopulation& pop,
                                            const Agent& agent,
                                            const Eigen::VectorXd& others_sum,
                                            const Eigen::VectorXd& lambda_bar) {
  if (!agent.cost.is_quadratic())
    raise(ErrorCode::invalid_input,
          "own-inclusive best response needs quadratic-augmentable costs");
  const auto& qc = agent.cost.quadratic_form();
  const double count = static_cast<double>(pop.count());
  Eigen::MatrixXd q_aug =
      qc.q + (2.0 / count) * pop.c_weight.dense();
  Eigen::VectorXd c_aug = qc.c +
                          pop.c_weight.apply(others_sum) / count +
                          pop.k_gain.apply(lambda_bar);
  CostFunction aug = CostFunction::quadratic(std::move(q_aug), std::move(c_aug));
  Agent aug_agent = make_agent(agent.id, std::move(aug), agent.feasible);
  return optimal_response(aug_agent, Eigen::VectorXd::Zero(pop.dim()));
}

double own_inclusive_value(const GamePopulation& pop, const Agent& agent,
                           const Eigen::VectorXd& y,
                           const Eigen::VectorXd& others_sum,
                           const Eigen::VectorXd& lambda_bar) {
  const double count = static_cast<double>(pop.count());
  Eigen::VectorXd sigma = (y + others_sum) / count;
  return cost_value(agent, y) +
         (pop.c_weight.apply(sigma) + pop.k_gain.apply(lambda_bar)).dot(y);
}

}  // namespace

EpsNReport measure_eps_N(const PopulationFamily& family,
                         const Eigen::VectorXd& lambda_init,
                         const std::vector<long>& sizes, std::uint64_t seed,
                         double run_tol, long run_max_iter) {
  if (sizes.size() < 2)
    raise(ErrorCode::invalid_input, "need at least two population sizes");
  for (std::size_t k = 1; k < sizes.size(); ++k)
    if (sizes[k] <= sizes[k - 1])
      raise(ErrorCode::invalid_input, "sizes must be strictly increasing");

  EpsNReport rep;
  rep.sizes = sizes;

  for (long size : sizes) {
    GamePopulation pop = family(size, seed_mix(seed, size));
    DesignReport design =
        validate_design(pop.c_weight, pop.k_gain, pop.ell, 0.0,
                        StepSchedule::constant(1.0));
    double epsilon = 0.9 * design.beta;

    RunConfig cfg;
    cfg.epsilon = epsilon;
    cfg.schedule = StepSchedule::constant(1.0);
    cfg.tol = run_tol;
    cfg.max_iter = run_max_iter;

    CoordinatorState init;
    init.sigma = project(pop.coupling, Eigen::VectorXd::Zero(pop.dim()));
    init.lambda = lambda_init;
    Trajectory traj = run(pop, cfg, init);
    if (traj.status != RunStatus::converged)
      raise(ErrorCode::oracle_stall,
            "equilibrium run did not converge at size " + std::to_string(size));

    const auto& last = traj.back();
    Eigen::MatrixXd strategies =
        all_responses(pop, last.sigma, last.lambda, 1);
    Eigen::VectorXd total = strategies.rowwise().sum();
    Eigen::VectorXd sigma_bar = total / static_cast<double>(pop.count());

    double worst = 0.0, worst_gap = 0.0;
    for (int i = 0; i < pop.count(); ++i) {
      Eigen::VectorXd others = total - strategies.col(i);
      Eigen::VectorXd best = own_inclusive_best_response(
          pop, pop.agents[i], others, last.lambda);
      worst = std::max(worst, (strategies.col(i) - best).norm());

      double at_eq = cost_value(pop.agents[i], strategies.col(i)) +
                     pop.signal(sigma_bar, last.lambda).dot(strategies.col(i));
      double at_best =
          own_inclusive_value(pop, pop.agents[i], best, others, last.lambda);
      worst_gap = std::max(worst_gap, std::abs(at_eq - at_best));
    }
    rep.eps_values.push_back(worst);
    rep.cost_gaps.push_back(worst_gap);
  }

  rep.all_zero = true;
  for (double e : rep.eps_values)
    if (e > 1e-12) rep.all_zero = false;

  rep.envelope = 0.0;
  for (std::size_t k = 0; k < sizes.size(); ++k)
    rep.envelope = std::max(
        rep.envelope, static_cast<double>(sizes[k]) * rep.eps_values[k]);

  if (!rep.all_zero) {
    // Least-squares fit of log eps against log N.
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    double m = static_cast<double>(sizes.size());
    for (std::size_t k = 0; k < sizes.size(); ++k) {
      double x = std::log(static_cast<double>(sizes[k]));
      double y = std::log(std::max(rep.eps_values[k], 1e-300));
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    rep.slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  }
  return rep;
}

RateCheck rate_bound_check(const Trajectory& traj, const MetricP& metric,
                           double alpha_bar, const Eigen::VectorXd& z_bar) {
  if (!(alpha_bar > 0.0 && alpha_bar <= 1.0))
    raise(ErrorCode::invalid_input, "rate bound needs a constant step in (0,1]");
  if (traj.records.size() < 2) return RateCheck{true, 0.0};

  Eigen::VectorXd z0 =
      join_state(traj.records.front().sigma, traj.records.front().lambda);
  double denom = metric.squared_norm(z0 - z_bar);
  double factor = 3.0 / alpha_bar - 1.0;
  double worst = 0.0;
  for (std::size_t k = 0; k + 1 < traj.records.size(); ++k) {
    Eigen::VectorXd dz =
        join_state(traj.records[k + 1].sigma, traj.records[k + 1].lambda) -
        join_state(traj.records[k].sigma, traj.records[k].lambda);
    double lhs = metric.squared_norm(dz);
    double rhs = factor / static_cast<double>(k + 1) * denom;
    worst = std::max(worst, (lhs - rhs) / std::max(denom, 1e-300));
  }
  return RateCheck{worst <= kProbeTolerance, worst};
}

}  // namespace aggsim
