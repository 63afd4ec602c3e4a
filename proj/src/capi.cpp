#include "aggsim.h"

#include <cstring>
#include <fstream>
#include <sstream>
#include <string>

#include "aggsim/errors.hpp"
#include "aggsim/harness.hpp"

namespace {

thread_local std::string g_last_error;

aggsim_status status_of(const aggsim::Error& e) {
  using aggsim::ErrorCode;
  switch (e.code()) {
    case ErrorCode::invalid_input:
      return AGGSIM_ERR_INVALID_ARGUMENT;
    case ErrorCode::parse:
      return AGGSIM_ERR_PARSE;
    case ErrorCode::design_violation:
      return AGGSIM_ERR_DESIGN;
    case ErrorCode::infeasible_set:
      return AGGSIM_ERR_INFEASIBLE;
    case ErrorCode::solver_stall:
      return AGGSIM_ERR_SOLVER_STALL;
    case ErrorCode::oracle_stall:
      return AGGSIM_ERR_ORACLE_STALL;
    case ErrorCode::diverged:
      return AGGSIM_ERR_DIVERGED;
    case ErrorCode::io:
      return AGGSIM_ERR_IO;
    case ErrorCode::internal:
      return AGGSIM_ERR_INTERNAL;
  }
  return AGGSIM_ERR_INTERNAL;
}

template <typename Fn>
aggsim_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return AGGSIM_OK;
  } catch (const aggsim::Error& e) {
    g_last_error = e.what();
    return status_of(e);
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return AGGSIM_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return AGGSIM_ERR_INTERNAL;
  }
}

}  // namespace

struct aggsim_config {
  aggsim::ExperimentConfig cfg;
};

struct aggsim_run {
  aggsim::BatchResult batch;  // single-experiment batch, reuses the emitters
  const aggsim::ExperimentOutcome& outcome() const {
    return batch.experiments.front();
  }
};

struct aggsim_batch {
  aggsim::BatchResult batch;
};

extern "C" {

const char* aggsim_version(void) { return "0.1.0"; }

const char* aggsim_last_error(void) { return g_last_error.c_str(); }

aggsim_status aggsim_config_load(const char* path, aggsim_config** out) {
  if (path == nullptr || out == nullptr) {
    g_last_error = "null argument";
    return AGGSIM_ERR_INVALID_ARGUMENT;
  }
  return guarded([&] {
    auto* c = new aggsim_config{aggsim::load_config_file(path)};
    *out = c;
  });
}

aggsim_status aggsim_config_parse(const char* text, aggsim_config** out) {
  if (text == nullptr || out == nullptr) {
    g_last_error = "null argument";
    return AGGSIM_ERR_INVALID_ARGUMENT;
  }
  return guarded([&] {
    auto* c = new aggsim_config{aggsim::parse_config_text(text)};
    *out = c;
  });
}

aggsim_status aggsim_config_set(aggsim_config* cfg, const char* key,
                                const char* value) {
  if (cfg == nullptr || key == nullptr || value == nullptr) {
    g_last_error = "null argument";
    return AGGSIM_ERR_INVALID_ARGUMENT;
  }
  return guarded([&] { aggsim::apply_override(cfg->cfg, key, value); });
}

void aggsim_config_free(aggsim_config* cfg) { delete cfg; }

aggsim_status aggsim_validate(const aggsim_config* cfg,
                              aggsim_design_report* out) {
  if (cfg == nullptr || out == nullptr) {
    g_last_error = "null argument";
    return AGGSIM_ERR_INVALID_ARGUMENT;
  }
  return guarded([&] {
    const auto& c = cfg->cfg;
    long size = c.single_run_size();
    std::uint64_t seed = aggsim::experiment_seed(c.base_seed, size, 0);
    auto [pop, scenario] = c.build(size, seed);
    const auto& co = scenario.coordinator;
    aggsim::DesignReport first = aggsim::validate_design(
        pop.c_weight, pop.k_gain, pop.ell, 0.0, co.schedule(), co.tight_beta);
    double epsilon =
        co.eps_abs ? *co.eps_abs : co.eps_factor * first.beta;
    aggsim::DesignReport rep =
        aggsim::validate_design(pop.c_weight, pop.k_gain, pop.ell, epsilon,
                                co.schedule(), co.tight_beta);
    out->k_pd = rep.k_pd ? 1 : 0;
    out->c_plus_k_pd = rep.c_plus_k_pd ? 1 : 0;
    out->alpha_schedule_valid = rep.alpha_schedule_valid ? 1 : 0;
    out->epsilon_ok = rep.epsilon_ok ? 1 : 0;
    out->pass = rep.pass() ? 1 : 0;
    out->ell = rep.ell;
    out->beta = rep.beta;
    out->epsilon = rep.epsilon;
    out->p_norm = rep.p_norm;
    out->p_min_eigenvalue = rep.p_min_eigenvalue;
    std::snprintf(out->failure, sizeof(out->failure), "%s",
                  rep.failure.c_str());
  });
}

aggsim_status aggsim_run_single(const aggsim_config* cfg, aggsim_run** out) {
  if (cfg == nullptr || out == nullptr) {
    g_last_error = "null argument";
    return AGGSIM_ERR_INVALID_ARGUMENT;
  }
  return guarded([&] {
    const auto& c = cfg->cfg;
    auto* r = new aggsim_run();
    try {
      r->batch.config = c;
      r->batch.experiments.push_back(
          aggsim::run_single(c, c.single_run_size(), 0, c.workers));
      const auto& e = r->batch.experiments.front();
      r->batch.all_converged = e.converged();
      r->batch.all_certified = e.certificate.pass;
    } catch (...) {
      delete r;
      throw;
    }
    *out = r;
  });
}

void aggsim_run_free(aggsim_run* run) { delete run; }

int aggsim_run_converged(const aggsim_run* run) {
  return run != nullptr && run->outcome().converged() ? 1 : 0;
}

const char* aggsim_run_status(const aggsim_run* run) {
  if (run == nullptr) return "invalid";
  switch (run->outcome().trajectory.status) {
    case aggsim::RunStatus::converged:
      return "converged";
    case aggsim::RunStatus::max_iterations:
      return "max-iterations";
    case aggsim::RunStatus::diverged:
      return "diverged";
  }
  return "unknown";
}

long aggsim_run_iterations(const aggsim_run* run) {
  return run == nullptr ? -1 : run->outcome().trajectory.back().t;
}

double aggsim_run_final_residual(const aggsim_run* run) {
  return run == nullptr ? -1.0 : run->outcome().trajectory.back().residual;
}

double aggsim_run_residual_at(const aggsim_run* run, long t) {
  if (run == nullptr) return -1.0;
  const auto& rec = run->outcome().trajectory.records;
  if (t < 0 || t >= static_cast<long>(rec.size())) return -1.0;
  return rec[static_cast<std::size_t>(t)].residual;
}

long aggsim_run_iterations_to(const aggsim_run* run, double threshold) {
  return run == nullptr ? -1
                        : run->outcome().trajectory.iterations_to(threshold);
}

int aggsim_run_certified(const aggsim_run* run) {
  return run != nullptr && run->outcome().certificate.pass ? 1 : 0;
}

double aggsim_run_cert_max_residual(const aggsim_run* run) {
  return run == nullptr ? -1.0 : run->outcome().certificate.max_residual;
}

double aggsim_run_cert_feasibility(const aggsim_run* run) {
  return run == nullptr ? -1.0
                        : run->outcome().certificate.feasibility_distance;
}

aggsim_status aggsim_run_emit(const aggsim_run* run, const char* out_dir) {
  if (run == nullptr || out_dir == nullptr) {
    g_last_error = "null argument";
    return AGGSIM_ERR_INVALID_ARGUMENT;
  }
  return guarded([&] { aggsim::emit(run->batch, out_dir); });
}

aggsim_status aggsim_batch_run(const aggsim_config* cfg, aggsim_batch** out) {
  if (cfg == nullptr || out == nullptr) {
    g_last_error = "null argument";
    return AGGSIM_ERR_INVALID_ARGUMENT;
  }
  return guarded([&] {
    auto* b = new aggsim_batch();
    try {
      b->batch = aggsim::run_experiments(cfg->cfg);
    } catch (...) {
      delete b;
      throw;
    }
    *out = b;
  });
}

void aggsim_batch_free(aggsim_batch* batch) { delete batch; }

long aggsim_batch_count(const aggsim_batch* batch) {
  return batch == nullptr ? 0
                          : static_cast<long>(batch->batch.experiments.size());
}

int aggsim_batch_all_converged(const aggsim_batch* batch) {
  return batch != nullptr && batch->batch.all_converged ? 1 : 0;
}

int aggsim_batch_all_certified(const aggsim_batch* batch) {
  return batch != nullptr && batch->batch.all_certified ? 1 : 0;
}

const char* aggsim_batch_experiment_id(const aggsim_batch* batch, long index) {
  if (batch == nullptr || index < 0 ||
      index >= static_cast<long>(batch->batch.experiments.size()))
    return "";
  return batch->batch.experiments[static_cast<std::size_t>(index)].id.c_str();
}

long aggsim_batch_iterations_to(const aggsim_batch* batch, long index,
                                double threshold) {
  if (batch == nullptr || index < 0 ||
      index >= static_cast<long>(batch->batch.experiments.size()))
    return -1;
  return batch->batch.experiments[static_cast<std::size_t>(index)]
      .trajectory.iterations_to(threshold);
}

aggsim_status aggsim_batch_emit(const aggsim_batch* batch,
                                const char* out_dir) {
  if (batch == nullptr || out_dir == nullptr) {
    g_last_error = "null argument";
    return AGGSIM_ERR_INVALID_ARGUMENT;
  }
  return guarded([&] { aggsim::emit(batch->batch, out_dir); });
}

aggsim_status aggsim_certify_file(const aggsim_config* cfg,
                                  const char* profile_path, double tol,
                                  int* pass, double* max_residual,
                                  double* feasibility_distance) {
  if (cfg == nullptr || profile_path == nullptr || pass == nullptr) {
    g_last_error = "null argument";
    return AGGSIM_ERR_INVALID_ARGUMENT;
  }
  return guarded([&] {
    std::ifstream in(profile_path);
    if (!in)
      aggsim::raise(aggsim::ErrorCode::io,
                    std::string("cannot open profile: ") + profile_path);
    std::stringstream ss;
    ss << in.rdbuf();
    aggsim::EquilibriumCertificate cert =
        aggsim::certify_profile_json(cfg->cfg, ss.str(), tol);
    *pass = cert.pass ? 1 : 0;
    if (max_residual != nullptr) *max_residual = cert.max_residual;
    if (feasibility_distance != nullptr)
      *feasibility_distance = cert.feasibility_distance;
  });
}

}  // extern "C"
