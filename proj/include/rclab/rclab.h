#ifndef RCLAB_RCLAB_H
#define RCLAB_RCLAB_H

/*
 * rclab: exact and Monte Carlo computations for the random-cluster model.
 *
 * All functions return an rclab_status; on failure a message is available
 * from rclab_last_error() (thread local, valid until the next call on the
 * same thread). Handles are opaque and owned by the caller. Strings returned
 * through char** out-parameters are NUL-terminated JSON allocated by the
 * library and must be released with rclab_string_free().
 *
 * Vertex coordinates are passed as flat int arrays of length d (or count*d).
 */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(RCLAB_BUILDING_LIBRARY)
#    define RCLAB_API __declspec(dllexport)
#  else
#    define RCLAB_API __declspec(dllimport)
#  endif
#else
#  define RCLAB_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum rclab_status {
  RCLAB_OK = 0,
  RCLAB_ERR_INVALID_ARGUMENT = 1,
  RCLAB_ERR_DOMAIN = 2,
  RCLAB_ERR_RESOURCE = 3,
  RCLAB_ERR_INTERNAL = 4
} rclab_status;

typedef struct rclab_region rclab_region;
typedef struct rclab_event rclab_event;

/* p applies to every edge unless edge_p is non-NULL, in which case it holds
 * edge_p_len (= edge count) per-edge open probabilities. */
typedef struct rclab_params {
  double p;
  double q;
  const double* edge_p;
  size_t edge_p_len;
} rclab_params;

typedef enum rclab_sampler {
  RCLAB_SAMPLER_AUTO = 0,
  RCLAB_SAMPLER_HEAT_BATH = 1,
  RCLAB_SAMPLER_SWENDSEN_WANG = 2
} rclab_sampler;

/* Zero fields take the library defaults (burn-in max(1000, n_sweeps/10),
 * one chain, default worker count). */
typedef struct rclab_mc_options {
  uint64_t n_sweeps;
  uint64_t seed;
  rclab_sampler sampler;
  uint64_t burn_in;
  unsigned chains;
} rclab_mc_options;

RCLAB_API const char* rclab_version(void);
RCLAB_API const char* rclab_last_error(void);
RCLAB_API void rclab_string_free(char* s);

/* 0 restores the default (RC_LAB_THREADS or hardware concurrency). */
RCLAB_API void rclab_set_threads(unsigned n);
RCLAB_API unsigned rclab_threads(void);
/* Largest edge count accepted by exact enumeration (default 26). */
RCLAB_API rclab_status rclab_set_enumeration_cap(size_t max_edges);
RCLAB_API size_t rclab_enumeration_cap(void);

/* ---- regions ---------------------------------------------------------- */

RCLAB_API rclab_status rclab_region_box(int d, int n, rclab_region** out);
RCLAB_API rclab_status rclab_region_rect(int d, const int* lo, const int* hi, rclab_region** out);
RCLAB_API rclab_status rclab_region_induced(const rclab_region* ambient, const int* coords, size_t count,
                                            rclab_region** out);
RCLAB_API rclab_status rclab_region_translate(const rclab_region* region, const int* offset, rclab_region** out);
RCLAB_API rclab_status rclab_region_from_json(const char* json, rclab_region** out);
RCLAB_API rclab_status rclab_region_to_json(const rclab_region* region, char** out);
RCLAB_API rclab_status rclab_region_hash(const rclab_region* region, char** out);
RCLAB_API void rclab_region_free(rclab_region* region);

RCLAB_API int rclab_region_dimension(const rclab_region* region);
RCLAB_API size_t rclab_region_vertex_count(const rclab_region* region);
RCLAB_API size_t rclab_region_edge_count(const rclab_region* region);
RCLAB_API rclab_status rclab_region_vertex(const rclab_region* region, size_t index, int* coords_out);
RCLAB_API rclab_status rclab_region_find(const rclab_region* region, const int* coords, size_t* index_out);
/* Vertices with a Z^d neighbour outside the region; indices written to out
 * (capacity cap), total count to *count. */
RCLAB_API rclab_status rclab_region_inner_boundary(const rclab_region* region, size_t* out, size_t cap,
                                                   size_t* count);
/* ambient == NULL means Z^d. */
RCLAB_API rclab_status rclab_edge_boundary(const rclab_region* S, const rclab_region* ambient, char** json_out);
RCLAB_API rclab_status rclab_candidate_sets(int d, int max_radius, char** json_out);

/* ---- events ----------------------------------------------------------- */

RCLAB_API rclab_status rclab_event_always(rclab_event** out);
RCLAB_API rclab_status rclab_event_edge_open(size_t edge, rclab_event** out);
RCLAB_API rclab_status rclab_event_connect(size_t x, size_t y, rclab_event** out);
RCLAB_API rclab_status rclab_event_connect_set(size_t x, const size_t* targets, size_t count, rclab_event** out);
RCLAB_API rclab_status rclab_event_and(const rclab_event* a, const rclab_event* b, rclab_event** out);
RCLAB_API void rclab_event_free(rclab_event* event);

/* ---- exact enumeration ------------------------------------------------ */

/* config_bits: bit e set <=> edge e open. */
RCLAB_API rclab_status rclab_weight(const rclab_region* region, const rclab_params* params, uint64_t config_bits,
                                    double* out);
RCLAB_API rclab_status rclab_partition_function(const rclab_region* region, const rclab_params* params, double* out);
RCLAB_API rclab_status rclab_log_partition_function(const rclab_region* region, const rclab_params* params,
                                                    double* out);
RCLAB_API rclab_status rclab_event_probability(const rclab_region* region, const rclab_params* params,
                                               const rclab_event* event, double* out);
RCLAB_API rclab_status rclab_connection_probability(const rclab_region* region, const rclab_params* params, size_t x,
                                                    size_t y, double* out);
RCLAB_API rclab_status rclab_connection_probability_to_set(const rclab_region* region, const rclab_params* params,
                                                           size_t x, const size_t* targets, size_t count,
                                                           double* out);
RCLAB_API rclab_status rclab_derivative_event_probability(const rclab_region* region, const rclab_params* params,
                                                          const rclab_event* event, double* out);
RCLAB_API rclab_status rclab_pivotal_probability(const rclab_region* region, const rclab_params* params, size_t edge,
                                                 const rclab_event* event, double* out);
RCLAB_API rclab_status rclab_susceptibility(const rclab_region* region, const rclab_params* params, size_t origin,
                                            double* out);
/* JSON array of {"vertices": [[...]], "probability": x}. */
RCLAB_API rclab_status rclab_gamma_distribution(int d, int n, const rclab_params* params, char** json_out);

/* ---- sharpness -------------------------------------------------------- */

/* boundary_p may be NULL; otherwise one probability per boundary edge.
 * json_out may be NULL. */
RCLAB_API rclab_status rclab_phi(const rclab_region* S, const rclab_params* params, const double* boundary_p,
                                 size_t boundary_len, double* value, char** json_out);
/* upper < 0 means "no external upper bound" (reported as 1). */
RCLAB_API rclab_status rclab_bracket_ptilde(int d, double q, const rclab_region* const* family, size_t count,
                                            double tol, double upper, const char* family_name, double* lower,
                                            char** json_out);
RCLAB_API rclab_status rclab_decay_upper_bound(const rclab_region* S, const rclab_params* params, const int* z,
                                               double* bound, char** json_out);
RCLAB_API rclab_status rclab_theta_lower_bound(double p, double lower, double* out);

/* ---- inequality checkers ---------------------------------------------- */
/* Each writes one CheckReport as JSON and sets *holds to 0/1. */

RCLAB_API rclab_status rclab_check_simon(const rclab_region* ambient, const rclab_region* S, const int* origin,
                                         const int* z, const rclab_params* params, int* holds, char** json_out);
RCLAB_API rclab_status rclab_check_tanh_bound(double p, int* holds, char** json_out);
RCLAB_API rclab_status rclab_check_derivative_identity(const rclab_region* region, const rclab_params* params,
                                                       const rclab_event* event, int* holds, char** json_out);
RCLAB_API rclab_status rclab_check_pivotal_lower_chain(const rclab_region* region, const rclab_params* params,
                                                       const rclab_event* event, int* holds, char** json_out);
/* bracket_lower < 0: no bracket. Writes a JSON array of reports; *all_hold
 * covers every grid point. */
RCLAB_API rclab_status rclab_check_differential_inequality(int d, int n, double q, const double* p_grid,
                                                           size_t count, double bracket_lower, int* all_hold,
                                                           char** json_out);
RCLAB_API rclab_status rclab_check_markov_factorization(int d, int n, const rclab_params* params,
                                                        const rclab_region* S, const int* x, const int* y,
                                                        int* holds, char** json_out);
RCLAB_API rclab_status rclab_check_fkg(const rclab_region* region, const rclab_params* params, const rclab_event* a,
                                       const rclab_event* b, int* holds, char** json_out);

/* ---- Monte Carlo ------------------------------------------------------ */
/* Estimates are JSON objects {mean, stderr, n_sweeps, burn_in, seed, chains,
 * sampler}. */

RCLAB_API rclab_status rclab_mc_estimate_event(const rclab_region* region, const rclab_params* params,
                                               const rclab_event* event, const rclab_mc_options* options,
                                               double* mean, double* stderr_out, char** json_out);
RCLAB_API rclab_status rclab_mc_estimate_connection(const rclab_region* region, const rclab_params* params, size_t x,
                                                    size_t y, const rclab_mc_options* options, char** json_out);
RCLAB_API rclab_status rclab_mc_estimate_theta(int d, double q, double p, int n, const rclab_mc_options* options,
                                               char** json_out);
RCLAB_API rclab_status rclab_mc_fit_decay(int d, double q, double p, int box_radius, const int* distances,
                                          size_t count, const rclab_mc_options* options, char** json_out);

#ifdef __cplusplus
}
#endif

#endif /* RCLAB_RCLAB_H */
