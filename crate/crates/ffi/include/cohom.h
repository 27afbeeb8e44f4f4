#ifndef COHOM_H
#define COHOM_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status code returned by every fallible call.
 */
typedef enum CohomStatus {
  COHOM_STATUS_OK = 0,
  COHOM_STATUS_NULL_POINTER = 1,
  COHOM_STATUS_INVALID_ARGUMENT = 2,
  COHOM_STATUS_CONFIG_ERROR = 3,
  COHOM_STATUS_IO_ERROR = 4,
  COHOM_STATUS_PANIC = 5,
} CohomStatus;

typedef enum CohomFormat {
  COHOM_FORMAT_CSV = 0,
  COHOM_FORMAT_JSON = 1,
} CohomFormat;

/**
 * Opaque parsed bench configuration.
 */
typedef struct CohomConfig CohomConfig;

/**
 * Opaque Monte Carlo counts.
 */
typedef struct CohomCounts CohomCounts;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or NULL. The pointer stays
 * valid until the next call into the library on the same thread.
 */
const char *cohom_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *cohom_version(void);

/**
 * Releases a string returned by the library. NULL is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void cohom_string_free(char *s);

/**
 * Default configuration.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum CohomStatus cohom_config_default(struct CohomConfig **out);

/**
 * Parses configuration text. On failure `*out` is left untouched.
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out` a valid pointer.
 */
enum CohomStatus cohom_config_parse(const char *text, struct CohomConfig **out);

/**
 * Reads and parses a configuration file.
 *
 * # Safety
 * `path` must be a NUL-terminated string and `out` a valid pointer.
 */
enum CohomStatus cohom_config_load(const char *path, struct CohomConfig **out);

/**
 * Releases a configuration. NULL is ignored.
 *
 * # Safety
 * `config` must come from this library and not have been freed.
 */
void cohom_config_free(struct CohomConfig *config);

/**
 * # Safety
 * `config` must be a live handle.
 */
enum CohomStatus cohom_config_set_seed(struct CohomConfig *config, uint64_t seed);

/**
 * # Safety
 * `config` must be a live handle.
 */
enum CohomStatus cohom_config_set_n_pairs(struct CohomConfig *config, uint64_t n_pairs);

/**
 * Canonical text of the configuration; free with `cohom_string_free`.
 *
 * # Safety
 * `config` must be a live handle and `out` a valid pointer.
 */
enum CohomStatus cohom_config_render(const struct CohomConfig *config, char **out);

/**
 * Local intensity of detector `port` (1..4) at detuning `df` (rad/s).
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum CohomStatus cohom_local_intensity(uint8_t port,
                                       double df,
                                       double tau1,
                                       double tau2,
                                       double *out);

/**
 * Local intensity averaged over a Gaussian detuning spread `sigma_f` (rad/s).
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum CohomStatus cohom_ensemble_intensity(uint8_t port,
                                          double sigma_f,
                                          double tau1,
                                          double tau2,
                                          double *out);

/**
 * Basis-selected D1-D3 coincidence at detuning `df`.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum CohomStatus cohom_coincidence_r13(double df, double tau1, double tau2, double *out);

/**
 * Basis-selected D2-D4 coincidence at detuning `df`.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum CohomStatus cohom_coincidence_r24(double df, double tau1, double tau2, double *out);

/**
 * Classical intensity-correlation baseline over `phase_samples` fringe
 * phases (at least 2).
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum CohomStatus cohom_classical_baseline_g2(uintptr_t phase_samples, double *out);

/**
 * Runs the Monte Carlo engine for a single-point configuration.
 *
 * # Safety
 * `config` must be a live handle and `out` a valid pointer.
 */
enum CohomStatus cohom_simulate(const struct CohomConfig *config, struct CohomCounts **out);

/**
 * Releases counts. NULL is ignored.
 *
 * # Safety
 * `counts` must come from this library and not have been freed.
 */
void cohom_counts_free(struct CohomCounts *counts);

/**
 * Singles count of detector `d` (1..4).
 *
 * # Safety
 * `counts` must be a live handle and `out` a valid pointer.
 */
enum CohomStatus cohom_counts_singles(const struct CohomCounts *counts, uint8_t d, uint64_t *out);

/**
 * Coincidence count between distinct detectors `i` and `j`.
 *
 * # Safety
 * `counts` must be a live handle and `out` a valid pointer.
 */
enum CohomStatus cohom_counts_coincidences(const struct CohomCounts *counts,
                                           uint8_t i,
                                           uint8_t j,
                                           uint64_t *out);

/**
 * Number of generated pair events.
 *
 * # Safety
 * `counts` must be a live handle and `out` a valid pointer.
 */
enum CohomStatus cohom_counts_n_generated(const struct CohomCounts *counts, uint64_t *out);

/**
 * Normalized coincidence estimate and its standard error.
 *
 * # Safety
 * `counts` must be a live handle; `value` and `std_error` valid pointers.
 */
enum CohomStatus cohom_counts_g2(const struct CohomCounts *counts,
                                 uint8_t i,
                                 uint8_t j,
                                 double *value,
                                 double *std_error);

/**
 * Closed-form result table for every point of the configuration, rendered
 * as CSV or JSON. Free the string with `cohom_string_free`.
 *
 * # Safety
 * `config` must be a live handle and `out` a valid pointer.
 */
enum CohomStatus cohom_run_analytic(const struct CohomConfig *config,
                                    enum CohomFormat format,
                                    char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* COHOM_H */
