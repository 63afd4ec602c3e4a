#include "aggsim/harness.hpp"

#include <atomic>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <thread>

#include "aggsim/errors.hpp"
#include "aggsim/rng.hpp"

namespace aggsim {

namespace {

constexpr const char* kVersion = "0.1.0";

// Repeatable text rendering of a double (round-trip exact).
std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

double resolve_epsilon(const CoordinatorSettings& co,
                       const DesignReport& design) {
  return co.eps_abs ? *co.eps_abs : co.eps_factor * design.beta;
}

}  // namespace

std::uint64_t experiment_seed(std::uint64_t base, long size, int replicate) {
  return seed_mix(base, static_cast<std::uint64_t>(size),
                  static_cast<std::uint64_t>(replicate));
}

ExperimentOutcome run_single(const ExperimentConfig& cfg, long size,
                             int replicate, int inner_workers) {
  auto t0 = std::chrono::steady_clock::now();
  std::uint64_t seed = experiment_seed(cfg.base_seed, size, replicate);
  auto [pop, scenario] = cfg.build(size, seed);
  const auto& co = scenario.coordinator;

  DesignReport design =
      validate_design(pop.c_weight, pop.k_gain, pop.ell, 0.0, co.schedule(),
                      co.tight_beta);
  double epsilon = resolve_epsilon(co, design);
  design = validate_design(pop.c_weight, pop.k_gain, pop.ell, epsilon,
                           co.schedule(), co.tight_beta);
  if (!design.pass())
    raise(ErrorCode::design_violation,
          "design validation failed: " + design.failure);

  // Initial condition: sigma uniform in the coupling box, lambda at zero.
  Rng init_rng(seed_mix(seed, 0x696e6974ull));
  auto [s_lo, s_hi] = pop.coupling.bounding_box();
  CoordinatorState init;
  init.sigma.resize(pop.dim());
  for (int j = 0; j < pop.dim(); ++j)
    init.sigma[j] = init_rng.uniform(s_lo[j], s_hi[j]);
  init.sigma = project(pop.coupling, init.sigma);
  init.lambda = Eigen::VectorXd::Zero(pop.dim());

  RunConfig rc;
  rc.epsilon = epsilon;
  rc.schedule = co.schedule();
  rc.tol = co.tol;
  rc.max_iter = co.max_iter;
  rc.workers = inner_workers;

  ExperimentOutcome out;
  out.scenario = scenario.name;
  out.size = size;
  out.replicate = replicate;
  out.seed = seed;
  out.design = design;
  out.epsilon = epsilon;
  out.id = scenario.name + "_N" + std::to_string(size) + "_r" +
           std::to_string(replicate);
  out.trajectory = run(pop, rc, init);

  const auto& last = out.trajectory.back();
  out.sigma_final = last.sigma;
  out.lambda_final = last.lambda;
  out.aggregate_profile = last.aggregate;
  out.strategies = all_responses(pop, last.sigma, last.lambda, inner_workers);
  out.certificate = check_equilibrium(pop, out.strategies, out.lambda_final,
                                      co.cert_tol, inner_workers);
  out.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return out;
}

BatchResult run_experiments(const ExperimentConfig& cfg) {
  struct Job {
    long size;
    int replicate;
  };
  std::vector<Job> jobs;
  for (long size : cfg.sizes)
    for (int r = 0; r < cfg.replicates; ++r) jobs.push_back({size, r});

  BatchResult result;
  result.config = cfg;
  result.experiments.resize(jobs.size());

  // Replicates across the pool; the inner response loops stay sequential so
  // results do not depend on how jobs land on workers.
  int pool = std::min<int>(cfg.workers, static_cast<int>(jobs.size()));
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(pool));
  auto worker = [&](int w) {
    try {
      for (;;) {
        std::size_t k = next.fetch_add(1);
        if (k >= jobs.size()) return;
        result.experiments[k] =
            run_single(cfg, jobs[k].size, jobs[k].replicate, 1);
      }
    } catch (...) {
      errors[static_cast<std::size_t>(w)] = std::current_exception();
    }
  };
  if (pool <= 1) {
    for (std::size_t k = 0; k < jobs.size(); ++k)
      result.experiments[k] =
          run_single(cfg, jobs[k].size, jobs[k].replicate, cfg.workers);
  } else {
    std::vector<std::thread> threads;
    for (int w = 0; w < pool; ++w) threads.emplace_back(worker, w);
    for (auto& t : threads) t.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }

  result.all_converged = true;
  result.all_certified = true;
  for (const auto& e : result.experiments) {
    result.all_converged = result.all_converged && e.converged();
    result.all_certified = result.all_certified && e.certificate.pass;
  }
  return result;
}

namespace {

void write_file(const std::filesystem::path& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) raise(ErrorCode::io, "cannot write " + path.string());
  out << body;
  if (!out) raise(ErrorCode::io, "short write to " + path.string());
}

std::string trace_csv(const ExperimentOutcome& e) {
  std::string s = "t,residual,alpha";
  int n = static_cast<int>(e.sigma_final.size());
  for (int j = 0; j < n; ++j) s += ",sigma_" + std::to_string(j);
  for (int j = 0; j < n; ++j) s += ",lambda_" + std::to_string(j);
  s += "\n";
  for (const auto& r : e.trajectory.records) {
    s += std::to_string(r.t) + "," + fmt(r.residual) + "," + fmt(r.alpha);
    for (int j = 0; j < n; ++j) s += "," + fmt(r.sigma[j]);
    for (int j = 0; j < n; ++j) s += "," + fmt(r.lambda[j]);
    s += "\n";
  }
  return s;
}

nlohmann::json trace_json(const ExperimentOutcome& e) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : e.trajectory.records) {
    nlohmann::json row;
    row["t"] = r.t;
    row["residual"] = r.residual;
    row["alpha"] = r.alpha;
    row["sigma"] = std::vector<double>(r.sigma.data(),
                                       r.sigma.data() + r.sigma.size());
    row["lambda"] = std::vector<double>(r.lambda.data(),
                                        r.lambda.data() + r.lambda.size());
    rows.push_back(std::move(row));
  }
  return rows;
}

// Aggregate profile: slot, capacity, inflexible demand (zero outside the
// charging scenario), equilibrium aggregate, their sum.
std::string aggregate_csv(const ExperimentOutcome& e,
                          const std::vector<double>& demand,
                          const Eigen::VectorXd& caps) {
  std::string s = "slot,cap,inflexible,aggregate,total\n";
  for (int j = 0; j < e.aggregate_profile.size(); ++j) {
    double d = j < static_cast<int>(demand.size()) ? demand[j] : 0.0;
    s += std::to_string(j + 1) + "," + fmt(caps[j]) + "," + fmt(d) + "," +
         fmt(e.aggregate_profile[j]) + "," + fmt(d + e.aggregate_profile[j]) +
         "\n";
  }
  return s;
}

nlohmann::json aggregate_json(const ExperimentOutcome& e,
                              const std::vector<double>& demand,
                              const Eigen::VectorXd& caps) {
  nlohmann::json rows = nlohmann::json::array();
  for (int j = 0; j < e.aggregate_profile.size(); ++j) {
    double d = j < static_cast<int>(demand.size()) ? demand[j] : 0.0;
    rows.push_back({{"slot", j + 1},
                    {"cap", caps[j]},
                    {"inflexible", d},
                    {"aggregate", e.aggregate_profile[j]},
                    {"total", d + e.aggregate_profile[j]}});
  }
  return rows;
}

const char* status_name(RunStatus s) {
  switch (s) {
    case RunStatus::converged:
      return "converged";
    case RunStatus::max_iterations:
      return "max-iterations";
    case RunStatus::diverged:
      return "diverged";
  }
  return "unknown";
}

}  // namespace

std::string outcome_profile_json(const ExperimentOutcome& e) {
  nlohmann::json j;
  j["kind"] = "aggsim-profile";
  j["version"] = 1;
  j["scenario"] = e.scenario;
  j["seed"] = e.seed;
  j["size"] = e.size;
  j["replicate"] = e.replicate;
  j["dim"] = e.sigma_final.size();
  j["sigma"] = std::vector<double>(e.sigma_final.data(),
                                   e.sigma_final.data() + e.sigma_final.size());
  j["lambda"] = std::vector<double>(
      e.lambda_final.data(), e.lambda_final.data() + e.lambda_final.size());
  nlohmann::json strat = nlohmann::json::array();
  for (Eigen::Index i = 0; i < e.strategies.cols(); ++i)
    strat.push_back(std::vector<double>(
        e.strategies.col(i).data(),
        e.strategies.col(i).data() + e.strategies.rows()));
  j["strategies"] = std::move(strat);
  return j.dump(2);
}

void emit(const BatchResult& result, const std::string& out_dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) raise(ErrorCode::io, "cannot create output directory " + out_dir);
  const bool csv = result.config.format == OutputFormat::csv;

  // Scenario context for the aggregate profiles.
  std::vector<double> demand;
  if (result.config.scenario == ScenarioKind::pev)
    demand = result.config.pev.d_profile.empty()
                 ? default_pev_demand(result.config.pev.n)
                 : result.config.pev.d_profile;

  for (const auto& e : result.experiments) {
    auto [pop_lo, caps] = [&]() {
      // Rebuild only the coupling box bounds for reporting.
      switch (result.config.scenario) {
        case ScenarioKind::congestion: {
          Eigen::VectorXd c = Eigen::Map<const Eigen::VectorXd>(
              result.config.congestion.caps.data(),
              static_cast<Eigen::Index>(result.config.congestion.caps.size()));
          return std::pair(Eigen::VectorXd(Eigen::VectorXd::Zero(c.size())), c);
        }
        case ScenarioKind::pev: {
          std::vector<double> caps_v = result.config.pev.caps.empty()
                                           ? default_pev_caps(result.config.pev.n)
                                           : result.config.pev.caps;
          Eigen::VectorXd c = Eigen::Map<const Eigen::VectorXd>(
              caps_v.data(), static_cast<Eigen::Index>(caps_v.size()));
          return std::pair(Eigen::VectorXd(Eigen::VectorXd::Zero(c.size())), c);
        }
        case ScenarioKind::remark1:
        default:
          return std::pair(Eigen::VectorXd(Eigen::VectorXd::Constant(1, -1.0)),
                           Eigen::VectorXd(Eigen::VectorXd::Constant(1, 1.0)));
      }
    }();
    (void)pop_lo;

    if (csv) {
      write_file(fs::path(out_dir) / ("trace_" + e.id + ".csv"),
                 trace_csv(e));
      write_file(fs::path(out_dir) / ("aggregate_" + e.id + ".csv"),
                 aggregate_csv(e, demand, caps));
    } else {
      write_file(fs::path(out_dir) / ("trace_" + e.id + ".json"),
                 trace_json(e).dump(2) + "\n");
      write_file(fs::path(out_dir) / ("aggregate_" + e.id + ".json"),
                 aggregate_json(e, demand, caps).dump(2) + "\n");
    }
    write_file(fs::path(out_dir) / ("profile_" + e.id + ".json"),
               outcome_profile_json(e) + "\n");
  }

  // Iterations-to-threshold summary with mean and min-max band.
  struct Cell {
    long count = 0, reached = 0, min = 0, max = 0;
    double mean = 0.0;
  };
  std::string scsv = "scenario,N,threshold,replicates,reached,mean_iterations,"
                     "min_iterations,max_iterations\n";
  nlohmann::json sjson = nlohmann::json::array();
  for (long size : result.config.sizes) {
    for (double thr : result.config.thresholds) {
      Cell cell;
      for (const auto& e : result.experiments) {
        if (e.size != size) continue;
        ++cell.count;
        long it = e.trajectory.iterations_to(thr);
        if (it < 0) continue;
        if (cell.reached == 0) {
          cell.min = cell.max = it;
        } else {
          cell.min = std::min(cell.min, it);
          cell.max = std::max(cell.max, it);
        }
        ++cell.reached;
        cell.mean += static_cast<double>(it);
      }
      if (cell.reached > 0) cell.mean /= static_cast<double>(cell.reached);
      scsv += result.config.scenario_name() + "," + std::to_string(size) +
              "," + fmt(thr) + "," + std::to_string(cell.count) + "," +
              std::to_string(cell.reached) + "," + fmt(cell.mean) + "," +
              std::to_string(cell.min) + "," + std::to_string(cell.max) + "\n";
      sjson.push_back({{"scenario", result.config.scenario_name()},
                       {"N", size},
                       {"threshold", thr},
                       {"replicates", cell.count},
                       {"reached", cell.reached},
                       {"mean_iterations", cell.mean},
                       {"min_iterations", cell.min},
                       {"max_iterations", cell.max}});
    }
  }
  if (csv)
    write_file(fs::path(out_dir) / "summary.csv", scsv);
  else
    write_file(fs::path(out_dir) / "summary.json", sjson.dump(2) + "\n");

  // Machine-readable manifest; the only file carrying wall-clock data.
  nlohmann::json manifest;
  manifest["version"] = kVersion;
  std::time_t now = std::time(nullptr);
  char tbuf[64];
  std::strftime(tbuf, sizeof(tbuf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  manifest["created"] = tbuf;
  manifest["config"] = nlohmann::json::parse(result.config.to_json());
  nlohmann::json runs = nlohmann::json::array();
  for (const auto& e : result.experiments) {
    nlohmann::json r;
    r["id"] = e.id;
    r["scenario"] = e.scenario;
    r["size"] = e.size;
    r["replicate"] = e.replicate;
    r["seed"] = e.seed;
    r["status"] = status_name(e.trajectory.status);
    r["iterations"] = e.trajectory.back().t;
    r["final_residual"] = e.trajectory.back().residual;
    r["epsilon"] = e.epsilon;
    r["beta"] = e.design.beta;
    r["certified"] = e.certificate.pass;
    r["cert_max_residual"] = e.certificate.max_residual;
    r["cert_feasibility"] = e.certificate.feasibility_distance;
    r["wall_seconds"] = e.wall_seconds;
    nlohmann::json reach;
    for (double thr : result.config.thresholds)
      reach[fmt(thr)] = e.trajectory.iterations_to(thr);
    r["iterations_to"] = std::move(reach);
    runs.push_back(std::move(r));
  }
  manifest["experiments"] = std::move(runs);
  write_file(fs::path(out_dir) / "manifest.json", manifest.dump(2) + "\n");
}

EquilibriumCertificate certify_profile_json(const ExperimentConfig& cfg,
                                            const std::string& profile_json,
                                            double tol) {
  nlohmann::json j = nlohmann::json::parse(profile_json, nullptr, false);
  if (j.is_discarded() || j.value("kind", "") != "aggsim-profile")
    raise(ErrorCode::parse, "not an aggsim profile");
  std::string scenario = j.at("scenario").get<std::string>();
  if (scenario != cfg.scenario_name())
    raise(ErrorCode::invalid_input,
          "profile scenario '" + scenario + "' does not match the config");
  std::uint64_t seed = j.at("seed").get<std::uint64_t>();
  long size = j.at("size").get<long>();

  auto [pop, sc] = cfg.build(size, seed);
  int n = pop.dim();
  if (j.at("dim").get<int>() != n)
    raise(ErrorCode::invalid_input, "profile dimension mismatch");

  auto lambda_v = j.at("lambda").get<std::vector<double>>();
  if (static_cast<int>(lambda_v.size()) != n)
    raise(ErrorCode::invalid_input, "profile lambda length mismatch");
  Eigen::VectorXd lambda =
      Eigen::Map<const Eigen::VectorXd>(lambda_v.data(), n);

  auto strat = j.at("strategies");
  if (static_cast<int>(strat.size()) != pop.count())
    raise(ErrorCode::invalid_input, "profile strategy count mismatch");
  Eigen::MatrixXd strategies(n, pop.count());
  for (int i = 0; i < pop.count(); ++i) {
    auto col = strat.at(i).get<std::vector<double>>();
    if (static_cast<int>(col.size()) != n)
      raise(ErrorCode::invalid_input, "profile strategy length mismatch");
    strategies.col(i) = Eigen::Map<const Eigen::VectorXd>(col.data(), n);
  }
  return check_equilibrium(pop, strategies, lambda, tol);
}

}  // namespace aggsim
