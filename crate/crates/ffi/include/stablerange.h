#ifndef STABLERANGE_H
#define STABLERANGE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes. The nonzero values below 5 match the CLI exit codes.
 */
typedef enum SrStatus {
  SR_STATUS_OK = 0,
  SR_STATUS_VERIFY_FAILED = 1,
  SR_STATUS_INVALID_INPUT = 2,
  SR_STATUS_CONSTRUCTION = 3,
  SR_STATUS_IO = 4,
  SR_STATUS_NULL_POINTER = 5,
  SR_STATUS_UTF8 = 6,
  SR_STATUS_PANIC = 7,
} SrStatus;

/**
 * Opaque solution handle.
 */
typedef struct SrSolution SrSolution;

/**
 * Summary of a verification run.
 */
typedef struct SrVerifySummary {
  size_t samples;
  double max_abs_residual;
  double max_rel_residual;
  double coeff_system_max_rel;
  double finite_difference_max_deviation;
  bool pass;
} SrVerifySummary;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *sr_version(void);

/**
 * Message for the last failed call on this thread, or NULL if none.
 * The pointer stays valid until the next failing call on the same thread.
 */
const char *sr_last_error_message(void);

/**
 * Builds a solution from a JSON config document.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` a valid pointer.
 * On success `*out` receives a handle to release with [`sr_solution_free`].
 */
enum SrStatus sr_solution_from_config_json(const char *json, struct SrSolution **out);

/**
 * Releases a handle. NULL is ignored.
 *
 * # Safety
 * `sol` must be NULL or a handle from [`sr_solution_from_config_json`]
 * that has not been freed.
 */
void sr_solution_free(struct SrSolution *sol);

/**
 * Whether the solution depends on `z` (three spatial dimensions).
 *
 * # Safety
 * `sol` must be NULL or a live handle.
 */
bool sr_solution_has_z(const struct SrSolution *sol);

/**
 * Evaluates `u(t, x, y, z)`; `z` is ignored for two-dimensional families.
 * Points closer to the singular surface than the config's pole guard fail
 * with `SR_STATUS_CONSTRUCTION`.
 *
 * # Safety
 * `sol` must be a live handle and `out` a valid pointer.
 */
enum SrStatus sr_solution_eval(const struct SrSolution *sol,
                               double t,
                               double x,
                               double y,
                               double z,
                               double *out);

/**
 * Runs the residual verifier on the default box with the config's seed,
 * tolerance and pole guard. Returns `SR_STATUS_VERIFY_FAILED` when any check
 * exceeds the tolerance; `summary` is filled in either case.
 *
 * # Safety
 * `sol` must be a live handle; `summary` may be NULL.
 */
enum SrStatus sr_solution_verify(const struct SrSolution *sol,
                                 size_t samples,
                                 struct SrVerifySummary *summary);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* STABLERANGE_H */
