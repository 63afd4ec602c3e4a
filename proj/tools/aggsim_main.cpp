// Command-line front end. Talks to the simulator exclusively through the
// shared-library C interface.

#include <CLI11.hpp>
#include <cstdint>
#include <cstdio>
#include <memory>
#include <string>
#include <vector>

#include "aggsim.h"

namespace {

struct ConfigDeleter {
  void operator()(aggsim_config* c) const { aggsim_config_free(c); }
};
using ConfigPtr = std::unique_ptr<aggsim_config, ConfigDeleter>;

int fail(const char* what, aggsim_status rc) {
  std::fprintf(stderr, "error: %s: %s (code %d)\n", what, aggsim_last_error(),
               static_cast<int>(rc));
  return 2;
}

struct CommonFlags {
  std::string config_path;
  std::uint64_t seed = 0;
  bool seed_set = false;
  int workers = 0;
  std::string out_dir;
  double tol = 0.0;
  bool tol_set = false;
  long max_iter = 0;
  std::string format;
  long size = 0;
};

void add_common(CLI::App* cmd, CommonFlags& f, bool needs_out) {
  cmd->add_option("--config", f.config_path, "experiment config file")
      ->required();
  cmd->add_option("--seed", f.seed, "base seed override")
      ->each([&f](const std::string&) { f.seed_set = true; });
  cmd->add_option("--workers", f.workers, "worker count override");
  if (needs_out) cmd->add_option("--out", f.out_dir, "output directory");
  cmd->add_option("--tol", f.tol, "stopping tolerance override")
      ->each([&f](const std::string&) { f.tol_set = true; });
  cmd->add_option("--max-iter", f.max_iter, "iteration cap override");
  cmd->add_option("--format", f.format, "table format: csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--size", f.size, "population size override");
}

ConfigPtr load_config(const CommonFlags& f, int& err) {
  aggsim_config* raw = nullptr;
  aggsim_status rc = aggsim_config_load(f.config_path.c_str(), &raw);
  if (rc != AGGSIM_OK) {
    err = fail("loading config", rc);
    return nullptr;
  }
  ConfigPtr cfg(raw);

  auto set = [&](const char* key, const std::string& value) -> bool {
    aggsim_status r = aggsim_config_set(cfg.get(), key, value.c_str());
    if (r != AGGSIM_OK) {
      err = fail("applying flag", r);
      return false;
    }
    return true;
  };
  if (f.seed_set && !set("experiment.base_seed", std::to_string(f.seed)))
    return nullptr;
  if (f.workers > 0 && !set("experiment.workers", std::to_string(f.workers)))
    return nullptr;
  if (!f.out_dir.empty() && !set("experiment.out", f.out_dir)) return nullptr;
  if (f.tol_set && !set("coordinator.tol", std::to_string(f.tol)))
    return nullptr;
  if (f.max_iter > 0 && !set("coordinator.max_iter", std::to_string(f.max_iter)))
    return nullptr;
  if (!f.format.empty() && !set("experiment.format", f.format)) return nullptr;
  if (f.size > 0 && !set("experiment.run_size", std::to_string(f.size)))
    return nullptr;
  err = 0;
  return cfg;
}

int cmd_validate(const CommonFlags& f) {
  int err = 0;
  ConfigPtr cfg = load_config(f, err);
  if (!cfg) return err;

  aggsim_design_report rep{};
  aggsim_status rc = aggsim_validate(cfg.get(), &rep);
  if (rc != AGGSIM_OK) return fail("validating design", rc);

  std::printf("design report\n");
  std::printf("  K positive definite      %s\n", rep.k_pd ? "yes" : "no");
  std::printf("  C+K positive definite    %s\n", rep.c_plus_k_pd ? "yes" : "no");
  std::printf("  step schedule valid      %s\n",
              rep.alpha_schedule_valid ? "yes" : "no");
  std::printf("  ell                      %.6g\n", rep.ell);
  std::printf("  ||P||                    %.6g\n", rep.p_norm);
  std::printf("  min eig P                %.6g\n", rep.p_min_eigenvalue);
  std::printf("  beta                     %.6g\n", rep.beta);
  std::printf("  epsilon                  %.6g (in (0,beta): %s)\n",
              rep.epsilon, rep.epsilon_ok ? "yes" : "no");
  std::printf("  overall                  %s\n", rep.pass ? "PASS" : "FAIL");
  if (!rep.pass) std::printf("  reason: %s\n", rep.failure);
  return rep.pass ? 0 : 1;
}

int cmd_run(const CommonFlags& f) {
  int err = 0;
  ConfigPtr cfg = load_config(f, err);
  if (!cfg) return err;

  aggsim_run* run = nullptr;
  aggsim_status rc = aggsim_run_single(cfg.get(), &run);
  if (rc != AGGSIM_OK) return fail("running experiment", rc);
  std::unique_ptr<aggsim_run, decltype(&aggsim_run_free)> guard(
      run, &aggsim_run_free);

  std::printf("status          %s\n", aggsim_run_status(run));
  std::printf("iterations      %ld\n", aggsim_run_iterations(run));
  std::printf("final residual  %.6g\n", aggsim_run_final_residual(run));
  std::printf("certified       %s (max residual %.3g, feasibility %.3g)\n",
              aggsim_run_certified(run) ? "yes" : "no",
              aggsim_run_cert_max_residual(run),
              aggsim_run_cert_feasibility(run));

  if (!f.out_dir.empty()) {
    rc = aggsim_run_emit(run, f.out_dir.c_str());
    if (rc != AGGSIM_OK) return fail("writing results", rc);
    std::printf("results written to %s\n", f.out_dir.c_str());
  }
  return aggsim_run_converged(run) && aggsim_run_certified(run) ? 0 : 1;
}

int cmd_batch(const CommonFlags& f) {
  int err = 0;
  ConfigPtr cfg = load_config(f, err);
  if (!cfg) return err;

  aggsim_batch* batch = nullptr;
  aggsim_status rc = aggsim_batch_run(cfg.get(), &batch);
  if (rc != AGGSIM_OK) return fail("running batch", rc);
  std::unique_ptr<aggsim_batch, decltype(&aggsim_batch_free)> guard(
      batch, &aggsim_batch_free);

  long count = aggsim_batch_count(batch);
  std::printf("experiments     %ld\n", count);
  std::printf("all converged   %s\n",
              aggsim_batch_all_converged(batch) ? "yes" : "no");
  std::printf("all certified   %s\n",
              aggsim_batch_all_certified(batch) ? "yes" : "no");

  if (!f.out_dir.empty()) {
    rc = aggsim_batch_emit(batch, f.out_dir.c_str());
    if (rc != AGGSIM_OK) return fail("writing results", rc);
    std::printf("results written to %s\n", f.out_dir.c_str());
  }
  return aggsim_batch_all_converged(batch) && aggsim_batch_all_certified(batch)
             ? 0
             : 1;
}

int cmd_certify(const CommonFlags& f, const std::string& profile,
                double cert_tol) {
  int err = 0;
  ConfigPtr cfg = load_config(f, err);
  if (!cfg) return err;

  int pass = 0;
  double max_res = 0.0, feas = 0.0;
  aggsim_status rc = aggsim_certify_file(cfg.get(), profile.c_str(), cert_tol,
                                         &pass, &max_res, &feas);
  if (rc != AGGSIM_OK) return fail("certifying profile", rc);
  std::printf("certificate     %s\n", pass ? "PASS" : "FAIL");
  std::printf("max residual    %.6g\n", max_res);
  std::printf("feasibility     %.6g\n", feas);
  std::printf("tolerance       %.6g\n", cert_tol);
  return pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"aggregative-game equilibrium simulator"};
  app.require_subcommand(1);

  CommonFlags vf, rf, bf, cf;
  std::string profile;
  double cert_tol = 1e-5;

  CLI::App* validate =
      app.add_subcommand("validate", "check the convergence design conditions");
  add_common(validate, vf, false);

  CLI::App* run = app.add_subcommand("run", "run a single experiment");
  add_common(run, rf, true);

  CLI::App* batch = app.add_subcommand("batch", "run the full sweep");
  add_common(batch, bf, true);

  CLI::App* certify =
      app.add_subcommand("certify", "check a saved strategy profile");
  add_common(certify, cf, false);
  certify->add_option("--profile", profile, "profile json written by run")
      ->required();
  certify->add_option("--cert-tol", cert_tol, "certificate tolerance");

  CLI11_PARSE(app, argc, argv);

  if (validate->parsed()) return cmd_validate(vf);
  if (run->parsed()) return cmd_run(rf);
  if (batch->parsed()) return cmd_batch(bf);
  if (certify->parsed()) return cmd_certify(cf, profile, cert_tol);
  return 2;
}
