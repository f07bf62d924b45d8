#ifndef SNCONTROL_H
#define SNCONTROL_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum SncStatus {
  SNC_STATUS_OK = 0,
  SNC_STATUS_NULL_POINTER = 1,
  SNC_STATUS_INVALID_ARGUMENT = 2,
  SNC_STATUS_CONFIG = 3,
  SNC_STATUS_NUMERICAL = 4,
  SNC_STATUS_BUFFER_TOO_SMALL = 5,
  SNC_STATUS_PANIC = 6,
} SncStatus;

/**
 * A validated scenario.
 */
typedef struct SncProblem SncProblem;

/**
 * Scalars of a penalized leader solve.
 */
typedef struct SncHumSummary {
  double epsilon;
  double y_final_norm;
  double h_norm;
  double gradient_norm;
  double characterization_residual;
  uint32_t iterations;
  uint32_t outer_iterations;
  bool converged;
} SncHumSummary;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. The pointer is
 * valid until the next call into this library on the same thread.
 */
const char *snc_last_error(void);

/**
 * Crate version as a static NUL-terminated string.
 */
const char *snc_version(void);

/**
 * Builds a problem from a scenario document in TOML.
 *
 * # Safety
 * `toml` is a NUL-terminated string; `out` is valid for one write.
 */
enum SncStatus snc_problem_from_toml(const char *toml, struct SncProblem **out);

/**
 * Builds the default scenario on an `n × m` grid.
 *
 * # Safety
 * `out` is valid for one write.
 */
enum SncStatus snc_problem_default(uint32_t n, uint32_t m, struct SncProblem **out);

/**
 * Releases a problem; null is ignored.
 *
 * # Safety
 * `p` is null or a handle not yet freed.
 */
void snc_problem_free(struct SncProblem *p);

/**
 * Space cells `N` and time steps `M`.
 *
 * # Safety
 * `n` and `m` are valid for one write each.
 */
enum SncStatus snc_problem_dims(const struct SncProblem *p, uint32_t *n, uint32_t *m);

/**
 * Uncontrolled state trajectory into `out`, which holds `len` values.
 *
 * # Safety
 * `out` is valid for `len` writes.
 */
enum SncStatus snc_solve_state(const struct SncProblem *p, double *out, size_t len);

/**
 * Follower Nash equilibrium for leader control `h` (null for `h = 0`);
 * writes the state into `y_out` and the iteration count into `iterations`
 * when non-null.
 *
 * # Safety
 * `h` is null or valid for `h_len` reads; `y_out` is valid for `y_len`
 * writes; `iterations` is null or valid for one write.
 */
enum SncStatus snc_nash(const struct SncProblem *p,
                        const double *h,
                        size_t h_len,
                        double *y_out,
                        size_t y_len,
                        uint32_t *iterations);

/**
 * Minimizes the penalized leader cost at `epsilon`; semilinear problems
 * run the outer fixed point.
 *
 * # Safety
 * `out` is valid for one write.
 */
enum SncStatus snc_hum(const struct SncProblem *p, double epsilon, struct SncHumSummary *out);

/**
 * Runs a CLI pipeline (`"solve"`, `"nash"`, `"hum"`, `"sweep"`,
 * `"observability"` or `"validate"`) and stores its exit code.
 *
 * # Safety
 * String arguments are NUL-terminated; `exit_code` is valid for one write.
 */
enum SncStatus snc_run_scenario(const char *toml,
                                const char *command,
                                const char *out_dir,
                                int32_t *exit_code);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SNCONTROL_H */
