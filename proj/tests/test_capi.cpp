#include <doctest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <string>

#include "aggsim.h"

namespace {

const char* kConfig = R"(
[experiment]
scenario = remark1
sizes = 2
replicates = 1
thresholds = 1e-2,1e-3,1e-4
base_seed = 11
workers = 1

[coordinator]
tol = 1e-8
cert_tol = 1e-5
)";

struct ConfigGuard {
  aggsim_config* cfg = nullptr;
  ~ConfigGuard() { aggsim_config_free(cfg); }
};

}  // namespace

TEST_CASE("version and error text") {
  CHECK(std::string(aggsim_version()) == "0.1.0");
  CHECK(aggsim_last_error() != nullptr);
}

TEST_CASE("config lifecycle and errors") {
  ConfigGuard g;
  CHECK(aggsim_config_parse(kConfig, &g.cfg) == AGGSIM_OK);
  REQUIRE(g.cfg != nullptr);

  CHECK(aggsim_config_set(g.cfg, "experiment.workers", "2") == AGGSIM_OK);
  CHECK(aggsim_config_set(g.cfg, "experiment.bogus", "2") == AGGSIM_ERR_PARSE);
  CHECK(std::strlen(aggsim_last_error()) > 0);

  aggsim_config* bad = nullptr;
  CHECK(aggsim_config_parse("[experiment]\nbogus = 1\n", &bad) ==
        AGGSIM_ERR_PARSE);
  CHECK(bad == nullptr);

  CHECK(aggsim_config_load("/nonexistent/path.ini", &bad) == AGGSIM_ERR_IO);
  CHECK(aggsim_config_parse(nullptr, &bad) == AGGSIM_ERR_INVALID_ARGUMENT);
}

TEST_CASE("design validation through the C interface") {
  ConfigGuard g;
  REQUIRE(aggsim_config_parse(kConfig, &g.cfg) == AGGSIM_OK);

  aggsim_design_report rep{};
  REQUIRE(aggsim_validate(g.cfg, &rep) == AGGSIM_OK);
  CHECK(rep.k_pd == 1);
  CHECK(rep.c_plus_k_pd == 1);
  CHECK(rep.alpha_schedule_valid == 1);
  CHECK(rep.epsilon_ok == 1);
  CHECK(rep.pass == 1);
  CHECK(rep.beta == doctest::Approx(1.0 / (3.0 * (5.0 + std::sqrt(17.0)))));
  CHECK(rep.epsilon == doctest::Approx(0.9 * rep.beta));

  // k_gain = 1 violates the C+K condition; the report carries the reason.
  ConfigGuard h;
  REQUIRE(aggsim_config_parse(kConfig, &h.cfg) == AGGSIM_OK);
  REQUIRE(aggsim_config_set(h.cfg, "remark1.k_gain", "1.0") == AGGSIM_OK);
  aggsim_design_report bad{};
  CHECK(aggsim_validate(h.cfg, &bad) == AGGSIM_ERR_DESIGN);
}

TEST_CASE("running and certifying through the C interface") {
  namespace fs = std::filesystem;
  ConfigGuard g;
  REQUIRE(aggsim_config_parse(kConfig, &g.cfg) == AGGSIM_OK);

  aggsim_run* run = nullptr;
  REQUIRE(aggsim_run_single(g.cfg, &run) == AGGSIM_OK);
  REQUIRE(run != nullptr);

  CHECK(aggsim_run_converged(run) == 1);
  CHECK(std::string(aggsim_run_status(run)) == "converged");
  CHECK(aggsim_run_final_residual(run) <= 1e-8);
  CHECK(aggsim_run_certified(run) == 1);
  CHECK(aggsim_run_cert_max_residual(run) <= 1e-5);
  CHECK(aggsim_run_cert_feasibility(run) <= 1e-5);

  long iters = aggsim_run_iterations(run);
  CHECK(iters > 0);
  CHECK(aggsim_run_residual_at(run, 0) > aggsim_run_final_residual(run));
  CHECK(aggsim_run_residual_at(run, iters + 5) == -1.0);
  CHECK(aggsim_run_iterations_to(run, 1e-2) <=
        aggsim_run_iterations_to(run, 1e-4));

  fs::path dir = fs::temp_directory_path() / "aggsim_capi_out";
  fs::remove_all(dir);
  REQUIRE(aggsim_run_emit(run, dir.string().c_str()) == AGGSIM_OK);
  CHECK(fs::exists(dir / "manifest.json"));
  CHECK(fs::exists(dir / "summary.csv"));

  fs::path profile = dir / "profile_remark1_N2_r0.json";
  REQUIRE(fs::exists(profile));
  int pass = 0;
  double max_res = 0.0, feas = 0.0;
  REQUIRE(aggsim_certify_file(g.cfg, profile.string().c_str(), 1e-5, &pass,
                              &max_res, &feas) == AGGSIM_OK);
  CHECK(pass == 1);
  CHECK(max_res <= 1e-5);

  aggsim_run_free(run);
  fs::remove_all(dir);
}

TEST_CASE("batch through the C interface") {
  ConfigGuard g;
  REQUIRE(aggsim_config_parse(kConfig, &g.cfg) == AGGSIM_OK);
  REQUIRE(aggsim_config_set(g.cfg, "experiment.replicates", "2") == AGGSIM_OK);

  aggsim_batch* batch = nullptr;
  REQUIRE(aggsim_batch_run(g.cfg, &batch) == AGGSIM_OK);
  CHECK(aggsim_batch_count(batch) == 2);
  CHECK(aggsim_batch_all_converged(batch) == 1);
  CHECK(aggsim_batch_all_certified(batch) == 1);
  CHECK(std::string(aggsim_batch_experiment_id(batch, 0)) ==
        "remark1_N2_r0");
  CHECK(aggsim_batch_iterations_to(batch, 0, 1e-3) >= 0);
  CHECK(aggsim_batch_iterations_to(batch, 99, 1e-3) == -1);
  aggsim_batch_free(batch);
}
