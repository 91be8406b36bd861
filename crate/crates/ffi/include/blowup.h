#ifndef BLOWUP_H
#define BLOWUP_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status code of every fallible call.
 */
enum BlowupStatus
#if defined(__cplusplus) || __STDC_VERSION__ >= 202311L
  : int32_t
#endif // defined(__cplusplus) || __STDC_VERSION__ >= 202311L
 {
  BLOWUP_STATUS_OK = 0,
  BLOWUP_STATUS_NULL_POINTER = -1,
  BLOWUP_STATUS_INVALID_ARGUMENT = -2,
  BLOWUP_STATUS_IO = -3,
  BLOWUP_STATUS_NUMERICAL = -4,
  BLOWUP_STATUS_UNSUPPORTED = -5,
  BLOWUP_STATUS_PANIC = -6,
};
#ifndef __cplusplus
#if __STDC_VERSION__ >= 202311L
typedef enum BlowupStatus BlowupStatus;
#else
typedef int32_t BlowupStatus;
#endif // __STDC_VERSION__ >= 202311L
#endif // __cplusplus

/**
 * Verdict of a criterion.
 */
enum BlowupOutcome
#if defined(__cplusplus) || __STDC_VERSION__ >= 202311L
  : int32_t
#endif // defined(__cplusplus) || __STDC_VERSION__ >= 202311L
 {
  BLOWUP_OUTCOME_SATISFIED = 0,
  BLOWUP_OUTCOME_VIOLATED = 1,
  BLOWUP_OUTCOME_INCONCLUSIVE = 2,
  BLOWUP_OUTCOME_CASE_I = 3,
  BLOWUP_OUTCOME_CASE_II = 4,
  BLOWUP_OUTCOME_CASE_III = 5,
  BLOWUP_OUTCOME_NOT_BLOWUP = 6,
};
#ifndef __cplusplus
#if __STDC_VERSION__ >= 202311L
typedef enum BlowupOutcome BlowupOutcome;
#else
typedef int32_t BlowupOutcome;
#endif // __STDC_VERSION__ >= 202311L
#endif // __cplusplus

enum BlowupOsgoodClass
#if defined(__cplusplus) || __STDC_VERSION__ >= 202311L
  : int32_t
#endif // defined(__cplusplus) || __STDC_VERSION__ >= 202311L
 {
  BLOWUP_OSGOOD_CLASS_OSGOOD = 0,
  BLOWUP_OSGOOD_CLASS_NOT_OSGOOD = 1,
  BLOWUP_OSGOOD_CLASS_INCONCLUSIVE = 2,
};
#ifndef __cplusplus
#if __STDC_VERSION__ >= 202311L
typedef enum BlowupOsgoodClass BlowupOsgoodClass;
#else
typedef int32_t BlowupOsgoodClass;
#endif // __STDC_VERSION__ >= 202311L
#endif // __cplusplus

/**
 * Opaque diagnostic series.
 */
typedef struct BlowupSeries BlowupSeries;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *blowup_version(void);

/**
 * Message of the last failure on this thread, or NULL. Valid until the next failing
 * call on the same thread.
 */
const char *blowup_last_error(void);

/**
 * # Safety
 * `s` must be NULL or a string returned by this library, not yet freed.
 */
void blowup_string_free(char *s);

/**
 * Builds a synthetic series from a JSON profile such as
 * `{"kind":"supercritical","excess":0.5,"family":"euler","dim":2,"k":3,"p":2,"nu":0}`.
 *
 * # Safety
 * `profile_json` must be a NUL-terminated string and `out` a valid pointer.
 */
BlowupStatus blowup_series_synth(const char *profile_json, struct BlowupSeries **out);

/**
 * Loads a series CSV and its JSON sidecar.
 *
 * # Safety
 * `csv_path` must be a NUL-terminated string and `out` a valid pointer.
 */
BlowupStatus blowup_series_load(const char *csv_path, struct BlowupSeries **out);

/**
 * Writes a series CSV and its JSON sidecar.
 *
 * # Safety
 * `series` must be a live handle and `csv_path` a NUL-terminated string.
 */
BlowupStatus blowup_series_save(const struct BlowupSeries *series, const char *csv_path);

/**
 * Runs a simulation described by a TOML configuration (the `simulate` schema).
 *
 * # Safety
 * `config_toml` must be a NUL-terminated string and `out` a valid pointer.
 */
BlowupStatus blowup_simulate(const char *config_toml, struct BlowupSeries **out);

/**
 * # Safety
 * `series` must be NULL or a handle from this library, not yet freed.
 */
void blowup_series_free(struct BlowupSeries *series);

/**
 * Number of samples.
 *
 * # Safety
 * `series` must be a live handle and `len` a valid pointer.
 */
BlowupStatus blowup_series_len(const struct BlowupSeries *series, size_t *len);

/**
 * Copies a column into `buf`. `written` receives the column length; if it exceeds
 * `cap` nothing is copied and the call fails with `InvalidArgument`. Missing values
 * are NaN. Pass `buf = NULL, cap = 0` to query the length.
 *
 * # Safety
 * `buf` must hold `cap` doubles (or be NULL with `cap = 0`); other pointers valid.
 */
BlowupStatus blowup_series_column(const struct BlowupSeries *series,
                                  const char *name,
                                  double *buf,
                                  size_t cap,
                                  size_t *written);

/**
 * Trichotomy classification at `t_star` with equality tolerance `tol`.
 *
 * # Safety
 * `series` must be a live handle and `outcome` a valid pointer.
 */
BlowupStatus blowup_classify_trichotomy(const struct BlowupSeries *series,
                                        double t_star,
                                        double tol,
                                        BlowupOutcome *outcome);

/**
 * Lower-bound criterion with threshold `k`; `k <= 0` uses the constant stored with
 * the series.
 *
 * # Safety
 * `series` must be a live handle and `outcome` a valid pointer.
 */
BlowupStatus blowup_eval_lower_bound(const struct BlowupSeries *series,
                                     double t_star,
                                     double k,
                                     BlowupOutcome *outcome);

/**
 * Largest relative gap in the exponential representation of the window.
 *
 * # Safety
 * `series` must be a live handle and `residual` a valid pointer.
 */
BlowupStatus blowup_representation_residual(const struct BlowupSeries *series,
                                            double t_star,
                                            double *residual);

/**
 * Osgood test on samples `g[i] = g(s[i])` with increasing `s` starting at 1.
 *
 * # Safety
 * `s` and `g` must hold `len` doubles; `class` must be valid; `partial_integral` may
 * be NULL.
 */
BlowupStatus blowup_osgood_check(const double *s,
                                 const double *g,
                                 size_t len,
                                 BlowupOsgoodClass *class_,
                                 double *partial_integral);

/**
 * JSON verdict report. `criteria` is a comma-separated id list or NULL/empty for every
 * supported criterion; `t_stars` may be NULL with `n_t_stars = 0` to use defaults.
 *
 * # Safety
 * Pointers must be valid for the stated lengths; `out_json` receives a string to be
 * released with `blowup_string_free`.
 */
BlowupStatus blowup_report_json(const struct BlowupSeries *series,
                                const char *criteria,
                                const double *t_stars,
                                size_t n_t_stars,
                                char **out_json);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BLOWUP_H */
