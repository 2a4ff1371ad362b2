/* SPDX-License-Identifier: Apache-2.0 */

#ifndef EIGENFRACTURE_H
#define EIGENFRACTURE_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define EF_API __declspec(dllexport)
#else
#define EF_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum {
  EF_OK = 0,
  EF_ERR_CONFIG = 1,    /* malformed or invalid configuration, unknown study kind */
  EF_ERR_INVARIANT = 2, /* a checked invariant or the oracle comparison failed */
  EF_ERR_SOLVER = 3,    /* the linear solver did not converge */
  EF_ERR_IO = 4,        /* an output file could not be written */
  EF_ERR_ARGUMENT = 5,  /* null handle or out-of-range argument */
  EF_ERR_INTERNAL = 6
} ef_status;

typedef struct ef_config ef_config;
typedef struct ef_run ef_run;

typedef struct {
  double t;
  double elastic;
  double surface;
  double lambda;
  double cumulative_work;
  double balance_defect;
  size_t crack_size;
  int rupture;
} ef_node_info;

typedef struct {
  int instances;
  int bar_total, bar_matches;
  int random_total, random_matches;
  int below;
  int passed;
} ef_oracle_info;

EF_API const char* ef_version(void);
/* Message of the last failure on the calling thread; empty after success. */
EF_API const char* ef_last_error(void);

EF_API ef_status ef_config_load(const char* path, ef_config** out);
EF_API ef_status ef_config_parse(const char* json_text, ef_config** out);
EF_API ef_status ef_config_set_seed(ef_config* cfg, uint64_t seed);
/* 0 selects the number of available cores. */
EF_API ef_status ef_config_set_threads(ef_config* cfg, int threads);
EF_API ef_status ef_config_set_output_dir(ef_config* cfg, const char* dir);
EF_API ef_status ef_config_hash(const ef_config* cfg, uint64_t* out);
EF_API void ef_config_free(ef_config* cfg);

/* Runs the evolution and writes the ledger CSV, a summary and optional VTK
 * snapshots into the output directory.  `out` may be NULL.  A failed
 * invariant still returns the run. */
EF_API ef_status ef_simulate(const ef_config* cfg, ef_run** out);
EF_API size_t ef_run_node_count(const ef_run* run);
EF_API ef_status ef_run_node(const ef_run* run, size_t index, ef_node_info* out);
/* Index of the first ruptured node, or -1. */
EF_API long ef_run_rupture_node(const ef_run* run);
EF_API void ef_run_free(ef_run* run);

/* kind: "tube", "bar", "simultaneous" or "growth". */
EF_API ef_status ef_study(const ef_config* cfg, const char* kind);

EF_API ef_status ef_oracle(const ef_config* cfg, ef_oracle_info* out);

#ifdef __cplusplus
}
#endif

#endif /* EIGENFRACTURE_H */
