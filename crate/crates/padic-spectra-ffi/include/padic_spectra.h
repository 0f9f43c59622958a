#ifndef PADIC_SPECTRA_H
#define PADIC_SPECTRA_H

/* Generated by cbindgen; edit the Rust source instead. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes mirrored in the generated header. Nonzero values match the
 * CLI exit codes: 2 for validation problems, 3 for numerical refusals.
 */
typedef enum PsStatus {
  PS_STATUS_OK = 0,
  PS_STATUS_NULL_ARGUMENT = 1,
  PS_STATUS_INVALID_ARGUMENT = 2,
  PS_STATUS_NUMERICAL_REFUSAL = 3,
  PS_STATUS_INTERNAL_ERROR = 4,
} PsStatus;

/**
 * Opaque realization handle.
 */
typedef struct PsConfig PsConfig;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static string; do not free.
 */
const char *ps_version(void);

/**
 * Releases a string produced by this library.
 *
 * # Safety
 * `s` must be a pointer previously returned through an out-string argument
 * of this library, not yet freed.
 */
void ps_string_free(char *s);

/**
 * Builds a realization from flag-style strings: interaction points as
 * "x1,x2,...", the coupling matrix as row-major JSON, eta mode "parity" or
 * "none". On success writes the handle into `out`.
 *
 * # Safety
 * String arguments must be NUL-terminated and valid for reads; `out` must
 * be valid for writes.
 */
enum PsStatus ps_config_new(uint64_t p,
                            double alpha,
                            const char *points,
                            const char *coupling_json,
                            const char *eta_mode,
                            struct PsConfig **out);

/**
 * Releases a realization handle.
 *
 * # Safety
 * `config` must come from `ps_config_new` and not be used afterwards.
 */
void ps_config_free(struct PsConfig *config);

/**
 * Evaluates M_0 (gamma_is_infinite = true) or M_{p^gamma} at a complex
 * lambda; writes value and rigorous tail bound.
 *
 * # Safety
 * The three output pointers must be valid for writes.
 */
enum PsStatus ps_mseries_eval(uint64_t p,
                              double alpha,
                              bool gamma_is_infinite,
                              int64_t gamma,
                              double lambda_re,
                              double lambda_im,
                              double tol,
                              double *out_re,
                              double *out_im,
                              double *out_bound);

/**
 * Evaluates the one-sided difference series M_0 - M_{p^gamma}, finite at
 * lambda = 0.
 *
 * # Safety
 * The three output pointers must be valid for writes.
 */
enum PsStatus ps_mseries_diff(uint64_t p,
                              double alpha,
                              int64_t gamma,
                              double lambda_re,
                              double lambda_im,
                              double tol,
                              double *out_re,
                              double *out_im,
                              double *out_bound);

/**
 * Radial Green's function value at a rational point: center and x as
 * "a/b" strings.
 *
 * # Safety
 * `center` and `x` must be NUL-terminated strings valid for reads; the
 * output pointers must be valid for writes.
 */
enum PsStatus ps_green_eval(uint64_t p,
                            double alpha,
                            const char *center,
                            double lambda_re,
                            double lambda_im,
                            const char *x,
                            double tol,
                            double *out_re,
                            double *out_im);

/**
 * Scans the real axis for eigenvalues of the realization; writes a JSON
 * array of records (release with `ps_string_free`).
 *
 * # Safety
 * `config` must be a live handle from `ps_config_new`; `out_json` must be
 * valid for writes.
 */
enum PsStatus ps_spectrum_scan(const struct PsConfig *config,
                               int64_t n_lo,
                               int64_t n_hi,
                               bool negative_axis,
                               double tol,
                               char **out_json);

/**
 * Runs the built-in invariant battery; writes a JSON report and returns
 * Ok only if every check passed.
 *
 * # Safety
 * `out_json` must be valid for writes.
 */
enum PsStatus ps_selftest(char **out_json);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PADIC_SPECTRA_H */
