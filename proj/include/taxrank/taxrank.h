// Copyright 2026 The Taxrank Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/* C interface of libtaxrank.
 *
 * Objects are opaque handles created by the library and released with the
 * matching *_free function; passing NULL to a free function is a no-op.
 * Every fallible call returns a taxrank_status. On failure the message of
 * the most recent error on the calling thread is available from
 * taxrank_last_error() until the next failing call on that thread.
 *
 * Matrices are row-major, users by items. Indices are zero-based. */

#ifndef TAXRANK_TAXRANK_H_
#define TAXRANK_TAXRANK_H_

#include <stddef.h>
#include <stdint.h>

#if defined(TAXRANK_BUILDING_LIBRARY)
#define TAXRANK_API __attribute__((visibility("default")))
#else
#define TAXRANK_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum taxrank_status {
  TAXRANK_OK = 0,
  TAXRANK_ERR_INVALID_ARGUMENT = 1,
  TAXRANK_ERR_DIMENSION = 2,
  TAXRANK_ERR_NUMERICAL = 3,
  TAXRANK_ERR_IO = 4,
  TAXRANK_ERR_INTERNAL = 5
} taxrank_status;

typedef enum taxrank_mode {
  TAXRANK_MODE_EXPOSURE = 0,
  TAXRANK_MODE_CTR = 1
} taxrank_mode;

typedef enum taxrank_format {
  TAXRANK_FORMAT_DENSE = 0,
  TAXRANK_FORMAT_TRIPLET = 1
} taxrank_format;

typedef enum taxrank_distribution {
  TAXRANK_DIST_UNIFORM = 0,
  TAXRANK_DIST_POWERLAW = 1
} taxrank_distribution;

typedef struct taxrank_scores taxrank_scores;
typedef struct taxrank_result taxrank_result;
typedef struct taxrank_lists taxrank_lists;
typedef struct taxrank_sweep taxrank_sweep;
typedef struct taxrank_continuity taxrank_continuity;

typedef struct taxrank_config {
  size_t k;
  double tax_rate;
  double lambda_ot;
  uint64_t seed;
  taxrank_mode mode;
  /* Sweep and continuity worker threads; 0 = hardware concurrency. */
  size_t jobs;
  /* Sweeps and continuity report sampled-list metrics when nonzero. */
  int realized;
} taxrank_config;

typedef struct taxrank_metrics {
  double ecn;
  double ecpm; /* valid only when has_ecpm is nonzero */
  int has_ecpm;
  double gini;
  double accuracy;
} taxrank_metrics;

typedef struct taxrank_tradeoff_point {
  double tax_rate;
  double ecn;
  double ecpm;
  int has_ecpm;
  double gini;
  double pot;
  double pot_bound;
} taxrank_tradeoff_point;

typedef struct taxrank_continuity_row {
  double tax_rate;
  double lambda;
  double taxrank_ecn;
  double taxrank_gini;
  double taxrank_ecn_jump;
  double taxrank_gini_jump;
  double baseline_ecn;
  double baseline_gini;
  double baseline_ecn_jump;
  double baseline_gini_jump;
} taxrank_continuity_row;

typedef struct taxrank_diagnostics {
  int converged;
  int log_domain;
  int iterations;
  int newton_steps;
  double row_error;
  double column_error;
  double clamped_mass;
  size_t capped_entries;
  size_t num_warnings;
  double solve_seconds;
  double project_seconds;
  double sample_seconds;
} taxrank_diagnostics;

/* k = 10, tax_rate = 0, lambda_ot = 0.1, seed = 0, ctr mode, jobs = 0. */
TAXRANK_API void taxrank_config_init(taxrank_config* config);

TAXRANK_API const char* taxrank_last_error(void);
TAXRANK_API const char* taxrank_status_string(taxrank_status status);
TAXRANK_API const char* taxrank_version(void);

/* ---- scores ---- */

/* gamma and bids may be NULL (unit gamma, no bids). */
TAXRANK_API taxrank_status taxrank_scores_create(const double* weights,
                                                 size_t num_users, size_t num_items,
                                                 const double* gamma,
                                                 const double* bids,
                                                 taxrank_scores** out);
TAXRANK_API taxrank_status taxrank_scores_load(const char* path, taxrank_format format,
                                               taxrank_mode mode, taxrank_scores** out);
TAXRANK_API taxrank_status taxrank_scores_synthesize(size_t num_users, size_t num_items,
                                                     taxrank_distribution distribution,
                                                     uint64_t seed, taxrank_scores** out);
/* Reads item_id,bid rows. Unless unit_gamma is set, gamma becomes ln(bid). */
TAXRANK_API taxrank_status taxrank_scores_attach_bids(taxrank_scores* scores,
                                                      const char* bids_path,
                                                      int unit_gamma);
TAXRANK_API taxrank_status taxrank_scores_save_dense(const taxrank_scores* scores,
                                                     const char* path);
TAXRANK_API taxrank_status taxrank_scores_save_id_map(const taxrank_scores* scores,
                                                      const char* path);
TAXRANK_API size_t taxrank_scores_num_users(const taxrank_scores* scores);
TAXRANK_API size_t taxrank_scores_num_items(const taxrank_scores* scores);
TAXRANK_API int taxrank_scores_has_bids(const taxrank_scores* scores);
TAXRANK_API void taxrank_scores_free(taxrank_scores* scores);

/* ---- single run ---- */

/* Optimal exposure vector; e_out holds num_items entries. */
TAXRANK_API taxrank_status taxrank_solve_exposure(const taxrank_scores* scores,
                                                  const taxrank_config* config,
                                                  double* e_out);

/* Solve, project and, when sample is nonzero, draw one list per user. */
TAXRANK_API taxrank_status taxrank_rank(const taxrank_scores* scores,
                                        const taxrank_config* config, int sample,
                                        taxrank_result** out);
TAXRANK_API taxrank_status taxrank_result_exposure(const taxrank_result* result,
                                                   double* e_out, size_t len);
/* x_out holds num_users * num_items entries. */
TAXRANK_API taxrank_status taxrank_result_probabilities(const taxrank_result* result,
                                                        double* x_out, size_t len);
/* Item indices of one user's list, best first; items_out holds k entries. */
TAXRANK_API taxrank_status taxrank_result_list(const taxrank_result* result,
                                               size_t user, size_t* items_out,
                                               size_t len);
/* realized selects the sampled lists (requires sample) over the marginals. */
TAXRANK_API taxrank_status taxrank_result_metrics(const taxrank_result* result,
                                                  int realized, taxrank_metrics* out);
TAXRANK_API taxrank_status taxrank_result_diagnostics(const taxrank_result* result,
                                                      taxrank_diagnostics* out);
/* Borrowed string, valid while result lives. */
TAXRANK_API const char* taxrank_result_warning(const taxrank_result* result,
                                               size_t index);
TAXRANK_API taxrank_status taxrank_result_save_lists(const taxrank_result* result,
                                                     const taxrank_scores* scores,
                                                     const char* path);
TAXRANK_API taxrank_status taxrank_result_save_probabilities(
    const taxrank_result* result, const taxrank_scores* scores, const char* path);
/* metric,expected,realized rows. */
TAXRANK_API taxrank_status taxrank_result_save_summary(const taxrank_result* result,
                                                       const char* path);
/* Lorenz curve of the gamma-weighted expected utilities:
 * population_share,utility_share. */
TAXRANK_API taxrank_status taxrank_result_save_lorenz(const taxrank_result* result,
                                                      const taxrank_scores* scores,
                                                      const char* path);
TAXRANK_API void taxrank_result_free(taxrank_result* result);

/* ---- saved lists ---- */

TAXRANK_API taxrank_status taxrank_lists_load(const char* path,
                                              const taxrank_scores* scores,
                                              taxrank_lists** out);
TAXRANK_API taxrank_status taxrank_lists_evaluate(const taxrank_lists* lists,
                                                  const taxrank_scores* scores,
                                                  taxrank_mode mode,
                                                  taxrank_metrics* out);
TAXRANK_API void taxrank_lists_free(taxrank_lists* lists);

/* ---- sweeps ---- */

TAXRANK_API taxrank_status taxrank_sweep_run(const taxrank_scores* scores,
                                             const taxrank_config* config,
                                             const double* t_grid, size_t grid_len,
                                             taxrank_sweep** out);
TAXRANK_API size_t taxrank_sweep_size(const taxrank_sweep* sweep);
TAXRANK_API taxrank_status taxrank_sweep_point(const taxrank_sweep* sweep,
                                               size_t index,
                                               taxrank_tradeoff_point* out);
/* t,ecn,ecpm,gini,pot,pot_bound */
TAXRANK_API taxrank_status taxrank_sweep_save(const taxrank_sweep* sweep,
                                              const char* path);
/* t,population_share,utility_share */
TAXRANK_API taxrank_status taxrank_sweep_save_lorenz(const taxrank_sweep* sweep,
                                                     const char* path);
TAXRANK_API void taxrank_sweep_free(taxrank_sweep* sweep);

TAXRANK_API taxrank_status taxrank_continuity_run(const taxrank_scores* scores,
                                                  const taxrank_config* config,
                                                  const double* t_grid,
                                                  size_t grid_len, double delta,
                                                  taxrank_continuity** out);
TAXRANK_API size_t taxrank_continuity_size(const taxrank_continuity* report);
TAXRANK_API taxrank_status taxrank_continuity_row_at(const taxrank_continuity* report,
                                                     size_t index,
                                                     taxrank_continuity_row* out);
TAXRANK_API taxrank_status taxrank_continuity_save(const taxrank_continuity* report,
                                                   const char* path);
TAXRANK_API void taxrank_continuity_free(taxrank_continuity* report);

/* ---- metric helpers ---- */

/* Gini of gamma_i * v_i; gamma may be NULL for unit weights. */
TAXRANK_API taxrank_status taxrank_gini(const double* v, const double* gamma,
                                        size_t len, double* out);
TAXRANK_API taxrank_status taxrank_pot_bound(size_t num_users, double tax_rate,
                                             double* out);

#ifdef __cplusplus
}
#endif

#endif  /* TAXRANK_TAXRANK_H_ */
