/* C interface to the aggregative-game simulator. All entry points return a
 * status code; aggsim_last_error() describes the most recent failure on the
 * calling thread. Handles are opaque and freed with their matching *_free.
 */
#ifndef AGGSIM_H
#define AGGSIM_H

#include <stdint.h>

#if defined(_WIN32)
#define AGGSIM_API __declspec(dllexport)
#else
#define AGGSIM_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum aggsim_status {
  AGGSIM_OK = 0,
  AGGSIM_ERR_INVALID_ARGUMENT = 1,
  AGGSIM_ERR_PARSE = 2,
  AGGSIM_ERR_DESIGN = 3,
  AGGSIM_ERR_INFEASIBLE = 4,
  AGGSIM_ERR_SOLVER_STALL = 5,
  AGGSIM_ERR_ORACLE_STALL = 6,
  AGGSIM_ERR_DIVERGED = 7,
  AGGSIM_ERR_IO = 8,
  AGGSIM_ERR_INTERNAL = 9
} aggsim_status;

typedef struct aggsim_config aggsim_config;
typedef struct aggsim_run aggsim_run;
typedef struct aggsim_batch aggsim_batch;

AGGSIM_API const char* aggsim_version(void);

/* Message for the last error on this thread; empty string if none. */
AGGSIM_API const char* aggsim_last_error(void);

/* --- configuration ----------------------------------------------------- */

AGGSIM_API aggsim_status aggsim_config_load(const char* path,
                                            aggsim_config** out);
AGGSIM_API aggsim_status aggsim_config_parse(const char* text,
                                             aggsim_config** out);
/* "section.key" override, e.g. ("experiment.workers", "4"). */
AGGSIM_API aggsim_status aggsim_config_set(aggsim_config* cfg, const char* key,
                                           const char* value);
AGGSIM_API void aggsim_config_free(aggsim_config* cfg);

/* --- design validation -------------------------------------------------- */

typedef struct aggsim_design_report {
  int k_pd;
  int c_plus_k_pd;
  int alpha_schedule_valid;
  int epsilon_ok;
  int pass;
  double ell;
  double beta;
  double epsilon;
  double p_norm;
  double p_min_eigenvalue;
  char failure[128];
} aggsim_design_report;

/* Builds the configured scenario at the derived seed for (size, replicate 0)
 * and checks the convergence design conditions. */
AGGSIM_API aggsim_status aggsim_validate(const aggsim_config* cfg,
                                         aggsim_design_report* out);

/* --- single experiment --------------------------------------------------- */

AGGSIM_API aggsim_status aggsim_run_single(const aggsim_config* cfg,
                                           aggsim_run** out);
AGGSIM_API void aggsim_run_free(aggsim_run* run);

/* 1 converged, 0 otherwise. */
AGGSIM_API int aggsim_run_converged(const aggsim_run* run);
/* "converged" | "max-iterations" | "diverged" */
AGGSIM_API const char* aggsim_run_status(const aggsim_run* run);
AGGSIM_API long aggsim_run_iterations(const aggsim_run* run);
AGGSIM_API double aggsim_run_final_residual(const aggsim_run* run);
AGGSIM_API double aggsim_run_residual_at(const aggsim_run* run, long t);
/* First iteration with residual <= threshold, -1 if never reached. */
AGGSIM_API long aggsim_run_iterations_to(const aggsim_run* run,
                                         double threshold);
AGGSIM_API int aggsim_run_certified(const aggsim_run* run);
AGGSIM_API double aggsim_run_cert_max_residual(const aggsim_run* run);
AGGSIM_API double aggsim_run_cert_feasibility(const aggsim_run* run);
/* Writes trace/aggregate/profile/summary/manifest files. */
AGGSIM_API aggsim_status aggsim_run_emit(const aggsim_run* run,
                                         const char* out_dir);

/* --- batch sweep ---------------------------------------------------------- */

AGGSIM_API aggsim_status aggsim_batch_run(const aggsim_config* cfg,
                                          aggsim_batch** out);
AGGSIM_API void aggsim_batch_free(aggsim_batch* batch);
AGGSIM_API long aggsim_batch_count(const aggsim_batch* batch);
AGGSIM_API int aggsim_batch_all_converged(const aggsim_batch* batch);
AGGSIM_API int aggsim_batch_all_certified(const aggsim_batch* batch);
AGGSIM_API const char* aggsim_batch_experiment_id(const aggsim_batch* batch,
                                                  long index);
AGGSIM_API long aggsim_batch_iterations_to(const aggsim_batch* batch,
                                           long index, double threshold);
AGGSIM_API aggsim_status aggsim_batch_emit(const aggsim_batch* batch,
                                           const char* out_dir);

/* --- certification of a saved profile ------------------------------------- */

AGGSIM_API aggsim_status aggsim_certify_file(const aggsim_config* cfg,
                                             const char* profile_path,
                                             double tol, int* pass,
                                             double* max_residual,
                                             double* feasibility_distance);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* AGGSIM_H */
