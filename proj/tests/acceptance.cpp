// Acceptance suite. Each criterion prints one [PASS]/[FAIL] line; the
// process exits nonzero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <thread>
#include <vector>

#include "aggsim/harness.hpp"
#include "aggsim/rng.hpp"
#include "aggsim/scenarios.hpp"
#include "aggsim/verify.hpp"

using namespace aggsim;

namespace {

int g_failures = 0;

void report(int idx, const char* name, bool pass, const std::string& detail,
            double seconds) {
  std::printf("[%s] criterion %d: %s (%s, %.1fs)\n", pass ? "PASS" : "FAIL",
              idx, name, detail.c_str(), seconds);
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

double median(std::vector<long> v) {
  std::sort(v.begin(), v.end());
  std::size_t m = v.size() / 2;
  return v.size() % 2 == 1 ? static_cast<double>(v[m])
                           : 0.5 * static_cast<double>(v[m - 1] + v[m]);
}

int pool_workers() {
  unsigned hw = std::thread::hardware_concurrency();
  return static_cast<int>(std::clamp(hw, 1u, 8u));
}

struct Family {
  const char* name;
  GamePopulation pop;
  double sigma_range;
  double lambda_range;
};

std::vector<Family> operator_families() {
  std::vector<Family> fams;
  fams.push_back({"remark1", build_remark1(2.0).first, 2.0, 2.0});
  fams.push_back({"congestion", build_congestion(50, 1001).first, 5.0, 8.0});
  fams.push_back({"pev", build_pev(50, 2002).first, 0.2, 3.0});
  return fams;
}

double resolve_eps(const GamePopulation& pop) {
  DesignReport rep = validate_design(pop.c_weight, pop.k_gain, pop.ell, 0.0,
                                     StepSchedule::constant(1.0));
  return 0.9 * rep.beta;
}

// --- criterion 1: cocoercivity of Gamma and 2/3-averagedness of T ----------

void criterion_operator_properties() {
  auto t0 = std::chrono::steady_clock::now();
  double worst_coco = -1e300, worst_avg = -1e300;
  bool ok = true;

  for (auto& fam : operator_families()) {
    const GamePopulation& pop = fam.pop;
    const int n = pop.dim();
    MetricP p = build_metric(pop.c_weight, pop.k_gain);
    double beta = cocoercivity_constant(pop.ell, p);
    double eps = 0.9 * beta;
    Rng rng(seed_mix(99, std::hash<std::string>{}(fam.name)));

    for (int k = 0; k < 500; ++k) {
      Eigen::VectorXd zs = rng.uniform_vec(n, -fam.sigma_range, fam.sigma_range);
      Eigen::VectorXd zl = rng.uniform_vec(n, -fam.lambda_range, fam.lambda_range);
      Eigen::VectorXd ws = rng.uniform_vec(n, -fam.sigma_range, fam.sigma_range);
      Eigen::VectorXd wl = rng.uniform_vec(n, -fam.lambda_range, fam.lambda_range);
      Eigen::VectorXd z = join_state(zs, zl);
      Eigen::VectorXd w = join_state(ws, wl);
      double dz2 = p.squared_norm(z - w);
      if (dz2 < 1e-20) continue;

      Eigen::VectorXd gz = gamma(pop, zs, zl);
      Eigen::VectorXd gw = gamma(pop, ws, wl);
      double coco_violation =
          (beta * p.squared_norm(gz - gw) - p.inner(gz - gw, z - w)) / dz2;
      worst_coco = std::max(worst_coco, coco_violation);

      Eigen::VectorXd tz = resolvent_M(eps, z - eps * gz);
      Eigen::VectorXd tw = resolvent_M(eps, w - eps * gw);
      double avg_violation =
          (p.squared_norm(tz - tw) - dz2 +
           0.5 * p.squared_norm((tz - z) - (tw - w))) /
          dz2;
      worst_avg = std::max(worst_avg, avg_violation);
    }
  }
  ok = worst_coco <= 1e-7 && worst_avg <= 1e-7;
  report(1, "operator properties (cocoercivity, 2/3-averagedness)", ok,
         "worst relative violation: cocoercivity " +
             std::to_string(worst_coco) + ", averagedness " +
             std::to_string(worst_avg),
         std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
             .count());
}

// --- criterion 2: known zero of the anchor game + rate bound ---------------

void criterion_known_zero() {
  auto t0 = std::chrono::steady_clock::now();
  GamePopulation pop = build_remark1(2.0).first;
  MetricP p = build_metric(pop.c_weight, pop.k_gain);
  double eps = 0.9 * cocoercivity_constant(pop.ell, p);

  RunConfig rc;
  rc.epsilon = eps;
  rc.schedule = StepSchedule::constant(1.0);
  rc.tol = 1e-9;
  rc.max_iter = 100000;

  Rng rng(4242);
  bool ok = true;
  double worst_dist = 0.0, worst_rate = -1e300;
  Eigen::VectorXd zero2 = Eigen::VectorXd::Zero(2);
  for (int k = 0; k < 20; ++k) {
    CoordinatorState init{Eigen::VectorXd::Constant(1, rng.uniform(-1, 1)),
                          Eigen::VectorXd::Constant(1, rng.uniform(-2, 2)), 0};
    Trajectory traj = run(pop, rc, init);
    ok = ok && traj.status == RunStatus::converged;
    double dist =
        join_state(traj.back().sigma, traj.back().lambda).norm();
    worst_dist = std::max(worst_dist, dist);
    ok = ok && dist <= 1e-6;
    RateCheck rate = rate_bound_check(traj, p, 1.0, zero2);
    worst_rate = std::max(worst_rate, rate.worst_violation);
    ok = ok && rate.pass;
  }
  report(2, "known-zero anchor with logarithmic rate bound", ok,
         "max |z_final|: " + std::to_string(worst_dist) +
             ", worst rate violation: " + std::to_string(worst_rate),
         std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
             .count());
}

// --- criterion 3: uniqueness of the limit across initializations -----------

void criterion_uniqueness() {
  auto t0 = std::chrono::steady_clock::now();
  struct Small {
    const char* name;
    GamePopulation pop;
  };
  std::vector<Small> fams;
  fams.push_back({"remark1", build_remark1(2.0).first});
  fams.push_back({"congestion", build_congestion(20, 3003).first});
  fams.push_back({"pev", build_pev(20, 4004).first});

  bool ok = true;
  double worst = 0.0;
  for (auto& fam : fams) {
    const GamePopulation& pop = fam.pop;
    MetricP p = build_metric(pop.c_weight, pop.k_gain);
    RunConfig rc;
    rc.epsilon = resolve_eps(pop);
    rc.tol = 1e-9;
    rc.max_iter = 400000;

    Rng rng(seed_mix(55, std::hash<std::string>{}(fam.name)));
    auto [lo, hi] = pop.coupling.bounding_box();
    Eigen::VectorXd first_limit;
    for (int k = 0; k < 10; ++k) {
      CoordinatorState init;
      init.sigma.resize(pop.dim());
      for (int j = 0; j < pop.dim(); ++j)
        init.sigma[j] = rng.uniform(lo[j], hi[j]);
      init.sigma = project(pop.coupling, init.sigma);
      init.lambda = rng.uniform_vec(pop.dim(), -2.0, 2.0);
      Trajectory traj = run(pop, rc, init);
      ok = ok && traj.status == RunStatus::converged;
      Eigen::VectorXd limit = join_state(traj.back().sigma, traj.back().lambda);
      if (k == 0) {
        first_limit = limit;
      } else {
        double d = p.norm(limit - first_limit);
        worst = std::max(worst, d);
        ok = ok && d <= 1e-5;
      }
    }
  }
  report(3, "uniqueness of the limit over random initializations", ok,
         "max pairwise distance in the P metric: " + std::to_string(worst),
         std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
             .count());
}

// --- criterion 4: dual-decomposition oracle agreement ----------------------

void criterion_oracle_agreement() {
  auto t0 = std::chrono::steady_clock::now();
  bool ok = true;
  double worst_lambda = 0.0, worst_strat = 0.0;

  Rng rng(7007);
  for (int inst = 0; inst < 10; ++inst) {
    int n = 1 + inst % 3;
    int count = 2 + static_cast<int>(rng.next() % 9);

    // Strong pulls against small caps keep every coupling component active,
    // the regime where the decomposition multiplier coincides with the
    // control vector.
    std::vector<Agent> agents;
    for (int i = 0; i < count; ++i) {
      Eigen::VectorXd diag = rng.uniform_vec(n, 0.5, 2.0);
      Eigen::VectorXd c = rng.uniform_vec(n, -9.0, -5.0);
      agents.push_back(make_agent(
          i, CostFunction::quadratic(Eigen::MatrixXd(diag.asDiagonal()), c),
          ConstraintSet::box(Eigen::VectorXd::Constant(n, -20.0),
                             Eigen::VectorXd::Constant(n, 20.0))));
    }
    SymMatrix c_weight = SymMatrix::diagonal(rng.uniform_vec(n, 0.0, 0.3));
    SymMatrix k_gain = SymMatrix::diagonal(rng.uniform_vec(n, 0.5, 1.5));
    Eigen::VectorXd caps = rng.uniform_vec(n, 0.3, 1.0);
    GamePopulation pop = make_population(
        std::move(agents), c_weight, k_gain,
        ConstraintSet::box(Eigen::VectorXd::Zero(n), caps),
        Eigen::VectorXd::Zero(n));

    RunConfig rc;
    rc.epsilon = resolve_eps(pop);
    rc.tol = 1e-9;
    rc.max_iter = 400000;
    CoordinatorState init{Eigen::VectorXd::Zero(n), Eigen::VectorXd::Zero(n),
                          0};
    Trajectory traj = run(pop, rc, init);
    ok = ok && traj.status == RunStatus::converged;

    Eigen::MatrixXd strategies =
        all_responses(pop, traj.back().sigma, traj.back().lambda);
    Eigen::VectorXd sigma_bar = strategies.rowwise().mean();
    // Instance sanity: the caps bind everywhere.
    ok = ok && ((caps - sigma_bar).cwiseAbs().maxCoeff() <= 1e-6);

    DualOracleResult oracle = dual_decomposition_oracle(
        pop, sigma_bar, DualStepRule::constant(), 500000, 1e-9);
    double dl = (oracle.lambda - traj.back().lambda).cwiseAbs().maxCoeff();
    double ds = (oracle.strategies - strategies).cwiseAbs().maxCoeff();
    worst_lambda = std::max(worst_lambda, dl);
    worst_strat = std::max(worst_strat, ds);
    ok = ok && dl <= 1e-4 && ds <= 1e-4;
  }
  report(4, "dual-decomposition oracle agreement", ok,
         "max |lambda diff| " + std::to_string(worst_lambda) +
             ", max |strategy diff| " + std::to_string(worst_strat),
         std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
             .count());
}

// --- criterion 5: population-size independence of the convergence speed ----

void criterion_size_independence() {
  auto t0 = std::chrono::steady_clock::now();
  bool ok = true;
  std::string detail;

  for (const char* scen : {"congestion", "pev"}) {
    ExperimentConfig cfg;
    cfg.scenario = std::string(scen) == "congestion" ? ScenarioKind::congestion
                                                     : ScenarioKind::pev;
    cfg.sizes = {100, 1000, 10000};
    cfg.replicates = 10;
    cfg.thresholds = {1e-2, 1e-3};
    cfg.base_seed = 20240101;
    cfg.workers = pool_workers();
    cfg.coordinator.tol = 1e-3;
    cfg.coordinator.max_iter = 100000;

    BatchResult batch = run_experiments(cfg);
    ok = ok && batch.all_converged;

    std::vector<double> medians;
    for (long size : cfg.sizes) {
      std::vector<long> iters;
      for (const auto& e : batch.experiments)
        if (e.size == size) iters.push_back(e.trajectory.iterations_to(1e-3));
      for (long it : iters) ok = ok && it >= 0;
      medians.push_back(median(iters));
    }
    double smallest = medians.front(), largest = medians.back();
    double rel = std::abs(largest - smallest) /
                 std::max(1.0, std::min(smallest, largest));
    ok = ok && rel <= 0.25;
    detail += std::string(scen) + " medians " + std::to_string(medians[0]) +
              "/" + std::to_string(medians[1]) + "/" +
              std::to_string(medians[2]) + " (rel " + std::to_string(rel) +
              ") ";
  }
  report(5, "population-size independence of iterations to 1e-3", ok, detail,
         std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
             .count());
}

// --- criterion 6: certification of converged runs --------------------------

void criterion_certification() {
  auto t0 = std::chrono::steady_clock::now();
  bool ok = true;
  double worst_res = 0.0, worst_feas = 0.0, worst_caps = -1e300;

  for (const char* scen : {"remark1", "congestion", "pev"}) {
    ExperimentConfig cfg;
    cfg.scenario = std::string(scen) == "remark1" ? ScenarioKind::remark1
                   : std::string(scen) == "congestion"
                       ? ScenarioKind::congestion
                       : ScenarioKind::pev;
    cfg.sizes = {std::string(scen) == "remark1" ? 2L : 100L};
    cfg.replicates = 3;
    cfg.base_seed = 60606;
    cfg.workers = pool_workers();
    cfg.coordinator.tol = 1e-7;
    cfg.coordinator.max_iter = 400000;
    cfg.coordinator.cert_tol = 1e-5;

    BatchResult batch = run_experiments(cfg);
    ok = ok && batch.all_converged;
    for (const auto& e : batch.experiments) {
      ok = ok && e.certificate.pass;
      worst_res = std::max(worst_res, e.certificate.max_residual);
      worst_feas = std::max(worst_feas, e.certificate.feasibility_distance);
    }
    if (cfg.scenario == ScenarioKind::pev) {
      Eigen::VectorXd caps = Eigen::Map<const Eigen::VectorXd>(
          default_pev_caps(cfg.pev.n).data(), cfg.pev.n);
      for (const auto& e : batch.experiments) {
        Eigen::VectorXd avg = e.strategies.rowwise().mean();
        double low_violation = (-avg).maxCoeff();
        double high_violation = (avg - caps).maxCoeff();
        worst_caps = std::max(worst_caps,
                              std::max(low_violation, high_violation));
        ok = ok && low_violation <= 1e-6 && high_violation <= 1e-6;
      }
    }
  }
  report(6, "equilibrium certification at 1e-5 with feasible aggregates", ok,
         "max residual " + std::to_string(worst_res) + ", max feasibility " +
             std::to_string(worst_feas) + ", worst cap violation " +
             std::to_string(worst_caps),
         std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
             .count());
}

// --- criterion 7: eps_N decay on the symmetric quadratic family ------------

void criterion_eps_decay() {
  auto t0 = std::chrono::steady_clock::now();
  auto family = [](long n_agents, std::uint64_t) {
    std::vector<Agent> agents;
    for (long i = 0; i < n_agents; ++i)
      agents.push_back(make_agent(
          static_cast<int>(i),
          CostFunction::quadratic(Eigen::MatrixXd::Identity(1, 1),
                                  Eigen::VectorXd::Constant(1, -2.0)),
          ConstraintSet::box(Eigen::VectorXd::Constant(1, -10.0),
                             Eigen::VectorXd::Constant(1, 10.0))));
    return make_population(std::move(agents),
                           SymMatrix::scaled_identity(1, 0.5),
                           SymMatrix::scaled_identity(1, 1.0),
                           ConstraintSet::box(Eigen::VectorXd::Constant(1, -5.0),
                                              Eigen::VectorXd::Constant(1, 5.0)),
                           Eigen::VectorXd::Zero(1));
  };

  EpsNReport rep = measure_eps_N(family, Eigen::VectorXd::Zero(1),
                                 {10, 20, 40, 80, 160}, 808);
  double base = 10.0 * rep.eps_values.front();
  bool ok = true;
  for (std::size_t k = 0; k < rep.sizes.size(); ++k) {
    double scaled = static_cast<double>(rep.sizes[k]) * rep.eps_values[k];
    ok = ok && scaled <= 3.0 * base;
  }
  ok = ok && rep.slope <= -0.8;
  report(7, "eps_N decay bounded by c/N", ok,
         "slope " + std::to_string(rep.slope) + ", envelope " +
             std::to_string(rep.envelope) + ", N*eps at 10: " +
             std::to_string(base),
         std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
             .count());
}

// --- criterion 8: solver audit against brute-force grids -------------------

void criterion_solver_audit() {
  auto t0 = std::chrono::steady_clock::now();
  const double pitch = 1e-5;
  bool ok = true;
  double worst = 0.0;
  Rng rng(909);

  auto grid_argmin = [&](double lo, double hi,
                         const std::function<double(double)>& f) {
    double best_x = lo, best_v = f(lo);
    long steps = static_cast<long>((hi - lo) / pitch);
    for (long k = 1; k <= steps; ++k) {
      double x = std::min(lo + static_cast<double>(k) * pitch, hi);
      double v = f(x);
      if (v < best_v) {
        best_v = v;
        best_x = x;
      }
    }
    return best_x;
  };

  for (int k = 0; k < 100; ++k) {
    double q = rng.uniform(0.5, 3.0);
    double c = rng.uniform(-5.0, 5.0);
    double lo = rng.uniform(-5.0, 0.0);
    double hi = rng.uniform(0.5, 5.0);
    double u = rng.uniform(-5.0, 5.0);
    Agent a = make_agent(
        0,
        CostFunction::quadratic(Eigen::MatrixXd::Constant(1, 1, q),
                                Eigen::VectorXd::Constant(1, c)),
        ConstraintSet::box(Eigen::VectorXd::Constant(1, lo),
                           Eigen::VectorXd::Constant(1, hi)));
    double solver = optimal_response(a, Eigen::VectorXd::Constant(1, u))[0];
    double grid = grid_argmin(
        lo, hi, [&](double y) { return 0.5 * q * y * y + (c + u) * y; });
    worst = std::max(worst, std::abs(solver - grid));
    ok = ok && std::abs(solver - grid) <= 1e-4;
  }

  for (int k = 0; k < 100; ++k) {
    double w = rng.uniform(5.0, 30.0);
    double hi = rng.uniform(2.0, 15.0);
    double lin = rng.uniform(0.0, 0.2);
    double u = rng.uniform(-2.0, 6.0);
    Agent a = make_agent(0, CostFunction::log_disutility(w, lin),
                         ConstraintSet::ray(Eigen::VectorXd::Constant(1, 1.0),
                                            0.0, hi));
    double solver = optimal_response(a, Eigen::VectorXd::Constant(1, u))[0];
    double grid = grid_argmin(0.0, hi, [&](double xi) {
      return -w * std::log1p(xi) + (lin + u) * xi;
    });
    worst = std::max(worst, std::abs(solver - grid));
    ok = ok && std::abs(solver - grid) <= 1e-4;
  }

  report(8, "agent responses match brute-force grid oracles", ok,
         "max |solver - grid| " + std::to_string(worst),
         std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
             .count());
}

}  // namespace

int main() {
  std::printf("acceptance suite (%d workers available)\n", pool_workers());
  criterion_operator_properties();
  criterion_known_zero();
  criterion_uniqueness();
  criterion_oracle_agreement();
  criterion_size_independence();
  criterion_certification();
  criterion_eps_decay();
  criterion_solver_audit();
  if (g_failures == 0)
    std::printf("all criteria passed\n");
  else
    std::printf("%d criteria FAILED\n", g_failures);
  return g_failures == 0 ? 0 : 1;
}
