#ifndef RESCON_H
#define RESCON_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum RcStatus {
  RC_STATUS_OK = 0,
  RC_STATUS_NULL_POINTER = 1,
  RC_STATUS_INVALID_UTF8 = 2,
  RC_STATUS_IO = 3,
  RC_STATUS_PARSE = 4,
  RC_STATUS_INVALID_CONFIG = 5,
  RC_STATUS_INFEASIBLE = 6,
  RC_STATUS_SIMULATION = 7,
  RC_STATUS_OUT_OF_RANGE = 8,
  RC_STATUS_NOT_APPLICABLE = 9,
  RC_STATUS_PANIC = 10,
} RcStatus;

/**
 * A resolved scenario.
 */
typedef struct RcScenario RcScenario;

/**
 * The per-round record of one run.
 */
typedef struct RcTrace RcTrace;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failure on this thread, or null. Valid until the next failing call.
 */
const char *rc_last_error(void);

/**
 * Reads and resolves a TOML scenario file.
 *
 * # Safety
 * `path` must be a valid nul-terminated string and `out` a valid pointer.
 */
enum RcStatus rc_scenario_load(const char *path, struct RcScenario **out);

/**
 * Resolves a scenario given as TOML text.
 *
 * # Safety
 * `toml_text` must be a valid nul-terminated string and `out` a valid pointer.
 */
enum RcStatus rc_scenario_parse(const char *toml_text, struct RcScenario **out);

/**
 * Builds a scenario from a named template.
 *
 * `k < 0` selects the template default; `split_pos`/`split_neg` are used by
 * `scalar-two-sided` when both are positive.
 *
 * # Safety
 * `template_name` must be a valid nul-terminated string and `out` a valid pointer.
 */
enum RcStatus rc_scenario_generate(const char *template_name,
                                   size_t n,
                                   size_t f,
                                   int64_t k,
                                   size_t split_pos,
                                   size_t split_neg,
                                   size_t rounds,
                                   uint64_t seed,
                                   struct RcScenario **out);

/**
 * # Safety
 * `scenario` must be null or a handle from this library not yet freed.
 */
void rc_scenario_free(struct RcScenario *scenario);

/**
 * The resolved step size.
 *
 * # Safety
 * `scenario` must be a live handle and `out` a valid pointer.
 */
enum RcStatus rc_scenario_alpha(const struct RcScenario *scenario, double *out);

/**
 * The contraction factor at the resolved step; [`RcStatus::NotApplicable`] without `mu` and `k`.
 *
 * # Safety
 * `scenario` must be a live handle and `out` a valid pointer.
 */
enum RcStatus rc_scenario_rho(const struct RcScenario *scenario, double *out);

/**
 * Simulates the scenario; `parallel != 0` spreads per-agent work over threads with identical results.
 *
 * # Safety
 * `scenario` must be a live handle and `out` a valid pointer.
 */
enum RcStatus rc_run(const struct RcScenario *scenario,
                     int32_t parallel,
                     struct RcTrace **out);

/**
 * # Safety
 * `trace` must be null or a handle from this library not yet freed.
 */
void rc_trace_free(struct RcTrace *trace);

/**
 * Number of recorded rounds, `rounds + 1`; zero for a null handle.
 *
 * # Safety
 * `trace` must be null or a live handle.
 */
size_t rc_trace_len(const struct RcTrace *trace);

/**
 * Sum of squared distances to the consensus point at round `t`.
 *
 * # Safety
 * `trace` must be a live handle and `out` a valid pointer.
 */
enum RcStatus rc_trace_v(const struct RcTrace *trace, size_t t, double *out);

/**
 * Number of diagnostic checks that failed in at least one round.
 *
 * # Safety
 * `trace` must be a live handle and `out` a valid pointer.
 */
enum RcStatus rc_trace_failed_checks(const struct RcTrace *trace, size_t *out);

/**
 * Empirical per-round decay factor of `V`.
 *
 * # Safety
 * `trace` must be a live handle and `out` a valid pointer.
 */
enum RcStatus rc_trace_fit_rate(const struct RcTrace *trace, double *out);

/**
 * Writes the per-round CSV trace.
 *
 * # Safety
 * `trace` must be a live handle and `path` a valid nul-terminated string.
 */
enum RcStatus rc_trace_write_csv(const struct RcTrace *trace, const char *path);

/**
 * Largest admissible step; non-positive when the parameters admit none, NaN for `mu` outside `(0, 1]` or `h = 0`.
 */
double rc_alpha_upper_bound(double mu,
                            size_t k,
                            size_t f,
                            size_t h);

/**
 * Contraction factor; [`RcStatus::OutOfRange`] unless it lies in `(0, 1)`.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum RcStatus rc_rho_bound(double alpha, double mu, size_t k, size_t f, size_t h, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RESCON_H */
