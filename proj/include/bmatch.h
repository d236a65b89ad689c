/* C interface to the b-matching preference library.
 *
 * Conventions:
 *   - Every function that can fail returns bm_status; BM_OK is 0. On failure
 *     the out-parameters are left untouched and bm_last_error() returns a
 *     message describing what went wrong (thread-local, overwritten by the
 *     next failing call on the same thread).
 *   - Objects returned through bm_*_new/parse/generate out-parameters are
 *     owned by the caller and released with the matching bm_*_free.
 *   - Strings and id arrays handed out by the library are released with
 *     bm_string_free / bm_ids_free.
 *   - A bm_run borrows the bm_instance it was created from; free the run
 *     before the instance.
 *   - Instances are immutable; sharing one across threads is safe, including
 *     concurrent bm_run_simulation calls on it.
 */
#ifndef BMATCH_H
#define BMATCH_H

#include <stddef.h>
#include <stdint.h>

#ifndef BM_API
#if defined(_WIN32)
#if defined(BM_BUILD)
#define BM_API __declspec(dllexport)
#else
#define BM_API __declspec(dllimport)
#endif
#else
#define BM_API __attribute__((visibility("default")))
#endif
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum bm_status {
  BM_OK = 0,
  BM_ERR_INVALID_ARGUMENT = 1,
  BM_ERR_PARSE = 2,
  BM_ERR_VALIDATION = 3,
  BM_ERR_CYCLIC = 4,
  BM_ERR_GUARD = 5,
  BM_ERR_GENERATION = 6,
  BM_ERR_INTERNAL = 7
} bm_status;

BM_API const char* bm_status_name(bm_status status);
BM_API const char* bm_last_error(void);

BM_API void bm_string_free(char* text);
BM_API void bm_ids_free(uint32_t* ids);

/* ---- instances ---------------------------------------------------- */

typedef struct bm_instance bm_instance;

/* Parses the JSON instance format: {"peers":[{"id","quota","prefs"},...]}. */
BM_API bm_status bm_instance_parse(const char* text, bm_instance** out);

/* Builds an instance from flat arrays: quotas[p] and list_lens[p] describe
 * peer p; lists_flat holds all preference lists concatenated in id order. */
BM_API bm_status bm_instance_build(size_t peer_count, const int* quotas,
                                   const size_t* list_lens,
                                   const uint32_t* lists_flat,
                                   bm_instance** out);

BM_API bm_status bm_instance_serialize(const bm_instance* instance,
                                       char** out);
BM_API void bm_instance_free(bm_instance* instance);

BM_API size_t bm_instance_peer_count(const bm_instance* instance);
BM_API size_t bm_instance_edge_count(const bm_instance* instance);
BM_API int bm_instance_quota_sum(const bm_instance* instance);

/* ---- generation --------------------------------------------------- */

typedef enum bm_generator_variant {
  BM_GEN_GLOBAL = 0,
  BM_GEN_SYMMETRIC = 1,
  BM_GEN_COMPLEMENTARY = 2,
  BM_GEN_UNIFORM_RANDOM = 3
} bm_generator_variant;

typedef struct bm_generator_spec {
  bm_generator_variant variant;
  size_t peer_count;
  double density;              /* edge probability, 1.0 = complete graph */
  int quota;                   /* used when quotas is NULL */
  const int* quotas;           /* optional per-peer quotas, length peer_count */
  size_t dimension;            /* symmetric variant */
  size_t resource_count;       /* complementary variant */
  double resource_probability; /* complementary variant */
  uint64_t seed;
} bm_generator_spec;

/* Fills in the defaults: global variant, density 1.0, quota 1, dimension 2,
 * 16 resources at probability 0.5, seed 0. */
BM_API void bm_generator_spec_init(bm_generator_spec* spec);

BM_API bm_status bm_generate(const bm_generator_spec* spec, bm_instance** out);

/* ---- configurations ----------------------------------------------- */

typedef struct bm_config bm_config;

BM_API bm_status bm_config_create_empty(bm_config** out);

/* Parses {"pairs":[[a,b],...]} and validates it against the instance. */
BM_API bm_status bm_config_parse(const bm_instance* instance, const char* text,
                                 bm_config** out);
BM_API bm_status bm_config_serialize(const bm_config* config, char** out);
BM_API void bm_config_free(bm_config* config);

BM_API size_t bm_config_pair_count(const bm_config* config);

/* Writes the pairs as a flat array a0,b0,a1,b1,... of length 2*pair_count. */
BM_API bm_status bm_config_pairs(const bm_config* config, uint32_t** flat,
                                 size_t* pair_count);

/* ---- analysis ----------------------------------------------------- */

BM_API bm_status bm_is_stable(const bm_instance* instance,
                              const bm_config* config, int* stable);

BM_API bm_status bm_blocking_pairs(const bm_instance* instance,
                                   const bm_config* config, uint32_t** flat,
                                   size_t* pair_count);

BM_API bm_status bm_loving_pairs(const bm_instance* instance, uint32_t** flat,
                                 size_t* pair_count);

/* On an acyclic instance sets *peers = NULL, *length = 0; otherwise returns
 * one witness preference cycle. */
BM_API bm_status bm_find_preference_cycle(const bm_instance* instance,
                                          uint32_t** peers, size_t* length);

/* Exhaustively enumerates stable configurations as JSON
 * {"configurations":[{"pairs":[[a,b],...]},...]}. Pass 0 for either guard
 * value to use the default limits (10 peers / quota sum 12); instances over
 * the guard fail with BM_ERR_GUARD. */
BM_API bm_status bm_brute_force_stable_configs(const bm_instance* instance,
                                               size_t guard_peers,
                                               int guard_quota_sum,
                                               char** json);

/* ---- solving ------------------------------------------------------ */

/* Unique stable configuration of an acyclic instance (BM_ERR_CYCLIC
 * otherwise, with the witness cycle in the error message). */
BM_API bm_status bm_stable_configuration(const bm_instance* instance,
                                         bm_config** out);

/* Initiative plan {"actions":[[peer,proposal],...]} from `initial` (NULL for
 * the empty configuration) to the stable configuration; at most
 * floor(quota_sum/2) actions. */
BM_API bm_status bm_optimal_sequence(const bm_instance* instance,
                                     const bm_config* initial, char** json);

/* ---- simulation --------------------------------------------------- */

typedef enum bm_strategy {
  BM_STRATEGY_BEST = 0,
  BM_STRATEGY_DECREMENTAL = 1,
  BM_STRATEGY_RANDOM = 2
} bm_strategy;

typedef enum bm_scheduler {
  BM_SCHEDULER_PERIODIC = 0,
  BM_SCHEDULER_POISSON = 1
} bm_scheduler;

typedef struct bm_sim_params {
  bm_strategy strategy;
  bm_scheduler scheduler;
  long long max_steps; /* <= 0 selects the default, 100 * n * B */
  uint64_t seed;
  int record_trace; /* nonzero keeps per-event data for bm_run_trace_jsonl */
} bm_sim_params;

/* Defaults: best-mate, periodic, default step guard, seed 0, no trace. */
BM_API void bm_sim_params_init(bm_sim_params* params);

typedef struct bm_run bm_run;

BM_API bm_status bm_run_simulation(const bm_instance* instance,
                                   const bm_config* initial,
                                   const bm_sim_params* params, bm_run** out);
BM_API void bm_run_free(bm_run* run);

BM_API int bm_run_converged(const bm_run* run);
BM_API long long bm_run_total_initiatives(const bm_run* run);
BM_API long long bm_run_active_initiatives(const bm_run* run);
/* -1 for non-periodic runs. */
BM_API long long bm_run_rounds(const bm_run* run);
/* -1 when the initial configuration was already stable or the run did not
 * converge. */
BM_API long long bm_run_steps_to_convergence(const bm_run* run);

BM_API bm_status bm_run_final_configuration(const bm_run* run,
                                            bm_config** out);
BM_API bm_status bm_run_stats_json(const bm_run* run, char** json);
/* Empty string when the run was made without record_trace. */
BM_API bm_status bm_run_trace_jsonl(const bm_run* run, char** jsonl);

#ifdef __cplusplus
}
#endif

#endif /* BMATCH_H */
