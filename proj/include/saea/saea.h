#ifndef SAEA_SAEA_H
#define SAEA_SAEA_H

/* C interface to the SAEA/ME library. Every function returns a saea_status;
 * on failure a message is available from saea_last_error() on the calling
 * thread. Handles are opaque and must be released with their destroy call. */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(SAEA_BUILDING_LIBRARY)
#define SAEA_API __declspec(dllexport)
#else
#define SAEA_API __declspec(dllimport)
#endif
#else
#define SAEA_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum saea_status {
  SAEA_OK = 0,
  SAEA_INVALID_ARGUMENT = 1,
  SAEA_UNSUPPORTED = 2,
  SAEA_NUMERICAL_FAILURE = 3,
  SAEA_BUDGET_EXCEEDED = 4,
  SAEA_IO = 5,
  SAEA_CONFIG = 6,
  SAEA_INTERNAL = 7
} saea_status;

typedef struct saea_problem saea_problem;
typedef struct saea_config saea_config;
typedef struct saea_run saea_run;

SAEA_API const char* saea_status_string(saea_status status);
/* Message of the last failure on this thread; "" when none. */
SAEA_API const char* saea_last_error(void);

/* Benchmark problems. m = 0 selects the default objective count. */
SAEA_API saea_status saea_problem_create(const char* id, size_t n, size_t m, saea_problem** out);
SAEA_API void saea_problem_destroy(saea_problem* problem);
SAEA_API saea_status saea_problem_info(const saea_problem* problem, size_t* n, size_t* m);
/* lower and upper each receive n values. */
SAEA_API saea_status saea_problem_bounds(const saea_problem* problem, double* lower, double* upper);
/* x has n values, f receives m values. */
SAEA_API saea_status saea_problem_evaluate(const saea_problem* problem, const double* x, double* f);
/* Fixed-seed reference front, row-major count x m. */
SAEA_API saea_status saea_problem_sample_front(const saea_problem* problem, size_t count, double* points);

/* Experiment configuration (flat key-value). */
SAEA_API saea_status saea_config_create(saea_config** out);
SAEA_API saea_status saea_config_set(saea_config* config, const char* key, const char* value);
/* Replaces the configuration with the contents of a file; SAEA_SEED applies. */
SAEA_API saea_status saea_config_load(saea_config* config, const char* path);
SAEA_API void saea_config_destroy(saea_config* config);

/* One replication. algorithm is "saeame", "nsga2-budget" or "random-search". */
SAEA_API saea_status saea_run_create(const saea_problem* problem, const char* algorithm, const saea_config* config,
                                     uint64_t seed, saea_run** out);
SAEA_API void saea_run_destroy(saea_run* run);
SAEA_API saea_status saea_run_fe_count(const saea_run* run, size_t* count);
SAEA_API saea_status saea_run_archive_size(const saea_run* run, size_t* size);
/* Row-major size x m objective vectors of the final archive. */
SAEA_API saea_status saea_run_archive(const saea_run* run, double* objectives);
/* Fails with SAEA_NUMERICAL_FAILURE when the run aborted without an archive. */
SAEA_API saea_status saea_run_igd(const saea_run* run, double* igd);
SAEA_API saea_status saea_run_write(const saea_run* run, const char* path);

/* Harness entry points used by the command-line tool. */
SAEA_API saea_status saea_experiment_run(const char* config_path, const char* out_dir, int force, size_t workers,
                                         size_t* computed, size_t* skipped);
SAEA_API saea_status saea_summarize(const char* in_dir, const char* out_path, size_t* rows);
SAEA_API saea_status saea_emit_front(const char* record_path, const char* out_path);

/* Single-objective GP-assisted EA on a named 1-D function ("quadratic",
 * "forrester"). acquisition is "pi", "ei" or "ucb". */
SAEA_API saea_status saea_single_run(const char* problem_1d, size_t budget, const char* acquisition, double kappa,
                                     int literal_variance, uint64_t seed, double* best_x, double* best_value);

#ifdef __cplusplus
}
#endif

#endif
