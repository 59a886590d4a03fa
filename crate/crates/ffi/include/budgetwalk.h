#ifndef BUDGETWALK_H
#define BUDGETWALK_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#define BW_OK 0

#define BW_NULL_POINTER 1

#define BW_INVALID_PARAMETER 2

#define BW_GENERATION 3

#define BW_STRUCTURE 4

#define BW_NUMERIC 5

#define BW_INFEASIBLE 6

#define BW_PARSE 7

#define BW_IO 8

#define BW_PANIC 9

#define BW_INTERNAL 10

#define BW_MODEL_REGULAR 0

#define BW_MODEL_UNION 1

#define BW_MODEL_HAMILTON 2

#define BW_MODEL_TWOFACTOR 3

#define BW_POLICY_SIMPLE 0

#define BW_POLICY_OBLIVIOUS 1

#define BW_POLICY_FLIP 2

#define BW_POLICY_SMOOTH 3

#define BW_POLICY_CONGESTION 4

/**
 * Opaque graph handle.
 */
typedef struct BwGraph BwGraph;

/**
 * Walk policy. Only the fields used by `kind` are read.
 */
typedef struct BwPolicy {
  /**
   * One of `BW_POLICY_*`.
   */
  int32_t kind;
  /**
   * Red-use budget (oblivious, smooth).
   */
  uint64_t budget;
  double rho_r;
  double rho_b;
  double alpha;
  uint64_t phase_length;
  uint64_t peak;
  uint64_t off_peak;
} BwPolicy;

typedef struct BwCoverResult {
  /**
   * 1 if every vertex was visited, 0 if the walk failed.
   */
  uint8_t covered;
  /**
   * Valid when `covered` is 1.
   */
  uint64_t cover_time;
  uint64_t red_uses;
  uint64_t steps_taken;
  uint64_t start_vertex;
} BwCoverResult;

typedef struct BwFlipSolution {
  double psi_r;
  double psi_b;
  double f;
  double xi_r;
  double xi_b;
  /**
   * `1/(1-f)`, the cover-time constant.
   */
  double expected_returns;
} BwFlipSolution;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread; empty after a success.
 * The pointer stays valid until the next call on the same thread.
 */
const char *bw_last_error(void);

/**
 * Samples a graph. For `BW_MODEL_REGULAR`, `r` is the degree; `b` is only
 * read by `BW_MODEL_UNION`.
 */
int32_t bw_graph_generate(int32_t model,
                          size_t n,
                          size_t r,
                          size_t b,
                          uint64_t seed,
                          struct BwGraph **out);

/**
 * Reads a graph in the text edge-list format.
 */
int32_t bw_graph_load(const char *path, struct BwGraph **out);

int32_t bw_graph_save(const struct BwGraph *graph, const char *path);

/**
 * Releases a handle. Null is ignored.
 */
void bw_graph_free(struct BwGraph *graph);

/**
 * Vertex count, or 0 for a null handle.
 */
size_t bw_graph_n(const struct BwGraph *graph);

size_t bw_graph_red_degree(const struct BwGraph *graph);

size_t bw_graph_blue_degree(const struct BwGraph *graph);

/**
 * Runs one trajectory from `start` with the stream of trial 0 under
 * master seed `seed`. `step_cap = 0` selects the default `100·n²`.
 */
int32_t bw_run_cover(const struct BwGraph *graph,
                     const struct BwPolicy *policy,
                     size_t start,
                     uint64_t seed,
                     uint64_t step_cap,
                     struct BwCoverResult *out);

int32_t bw_sigma_rb(size_t r, size_t b, double *out);

/**
 * `θ(q)` for `r = 1, b = 2`; `+∞` at `q = 0` and `q = 1`.
 */
int32_t bw_theta_flip(double q, double *out);

int32_t bw_flip_fixed_point(size_t r,
                            size_t b,
                            double rho_r,
                            double rho_b,
                            struct BwFlipSolution *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BUDGETWALK_H */
