/* C interface for the roadfield library. */

#pragma once

/* Generated with cbindgen:0.29.4 */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Status codes returned by every fallible `rf_*` call.
enum RfStatus
#if defined(__cplusplus) || __STDC_VERSION__ >= 202311L
  : int32_t
#endif // defined(__cplusplus) || __STDC_VERSION__ >= 202311L
 {
  // The call succeeded.
  RF_STATUS_OK = 0,
  // A solver or verdict failure; details via `rf_last_error`.
  RF_STATUS_NUMERICAL_ERROR = 1,
  // The configuration is invalid; details via `rf_last_error`.
  RF_STATUS_CONFIG_ERROR = 2,
  // A required pointer argument was NULL.
  RF_STATUS_NULL_ARGUMENT = 3,
  // A string argument was not valid UTF-8.
  RF_STATUS_INVALID_UTF8 = 4,
  // An internal panic was caught at the boundary.
  RF_STATUS_PANIC = 5,
};
#ifndef __cplusplus
#if __STDC_VERSION__ >= 202311L
typedef enum RfStatus RfStatus;
#else
typedef int32_t RfStatus;
#endif // __STDC_VERSION__ >= 202311L
#endif // __cplusplus

// Opaque handle holding a parsed and resolved configuration.
typedef struct RfProblem RfProblem;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Parses a JSON configuration (the same schema the CLI reads) into an
// opaque problem handle stored in `*out_problem`.
//
// # Safety
// `config_json` must be a NUL-terminated string; `out_problem` must point
// to writable storage for one pointer.
RfStatus rf_problem_from_json(const char *config_json, struct RfProblem **out_problem);

// Releases a problem handle. NULL is accepted and ignored.
//
// # Safety
// `problem` must be NULL or a pointer returned by `rf_problem_from_json`
// that has not been freed yet.
void rf_problem_free(struct RfProblem *problem);

// Principal eigenvalue of the roadless periodic cell, written to `*out`.
//
// # Safety
// `problem` must be a live handle; `out` must point to writable storage
// for one double.
RfStatus rf_cell_eigenvalue(const struct RfProblem *problem, double *out);

// Principal eigenvalue of the coupled road-field problem truncated to the
// box of the given half-width and height, written to `*out`.
//
// # Safety
// As for `rf_cell_eigenvalue`.
RfStatus rf_coupled_eigenvalue(const struct RfProblem *problem,
                               double half_width,
                               double height,
                               double *out);

// Extrapolated coupled eigenvalue over the configured truncation sizes
// (the `numerics.sizes` ladder), written to `*out`.
//
// # Safety
// As for `rf_cell_eigenvalue`.
RfStatus rf_lambda1_estimate(const struct RfProblem *problem, double *out);

// Checks the configured reaction against the monostability hypotheses.
// Returns `RF_STATUS_OK` when all hypotheses hold; otherwise
// `RF_STATUS_NUMERICAL_ERROR` with the failed checks in `rf_last_error`.
//
// # Safety
// `problem` must be a live handle.
RfStatus rf_validate(const struct RfProblem *problem);

// Runs one CLI task (`"eigen"`, `"sweep"`, `"evolve"`, `"classify"`,
// `"road-effect"`, `"amplitude"`, `"audit"`, or `"validate"`) with the
// given JSON configuration, writing artifacts under `out_dir`. Returns the
// CLI exit code: 0 success, 1 numerical or verdict failure, 2 bad
// configuration or arguments.
//
// # Safety
// All three pointers must be NULL-terminated strings (none may be NULL).
int32_t rf_run(const char *task, const char *config_json, const char *out_dir, bool quiet);

// Thread-local message describing the most recent failure on this thread.
// Never NULL; empty until the first failure. Valid until the next failing
// `rf_*` call on the same thread.
const char *rf_last_error(void);

// Library version as a static NUL-terminated string.
const char *rf_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus
