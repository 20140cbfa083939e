#ifndef NLBOX_H
#define NLBOX_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes. Values 2 to 6 match the command-line exit codes.
 */
typedef enum NlboxStatus {
  NLBOX_STATUS_OK = 0,
  NLBOX_STATUS_PARSE = 2,
  NLBOX_STATUS_VALIDATION = 3,
  NLBOX_STATUS_CONVERGENCE = 4,
  NLBOX_STATUS_IO = 5,
  NLBOX_STATUS_PROTOCOL = 6,
  NLBOX_STATUS_NULL_POINTER = 7,
  NLBOX_STATUS_INVALID_UTF8 = 8,
  NLBOX_STATUS_PANIC = 9,
} NlboxStatus;

/**
 * The result of running a scenario.
 */
typedef struct NlboxReport NlboxReport;

/**
 * A validated scenario.
 */
typedef struct NlboxScenario NlboxScenario;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread. The pointer stays valid
 * until the next failing call on the same thread; do not free it.
 */
const char *nlbox_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *nlbox_version(void);

/**
 * Parses and validates a scenario from JSON text.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` a valid pointer.
 */
enum NlboxStatus nlbox_scenario_parse_str(const char *json, struct NlboxScenario **out);

/**
 * Parses and validates a scenario file.
 *
 * # Safety
 * `path` must be a NUL-terminated string and `out` a valid pointer.
 */
enum NlboxStatus nlbox_scenario_parse_file(const char *path, struct NlboxScenario **out);

/**
 * # Safety
 * `scenario` must come from a parse call and not be freed twice.
 */
void nlbox_scenario_free(struct NlboxScenario *scenario);

/**
 * Runs a scenario. `seed` may be null to use the scenario's own seed.
 *
 * # Safety
 * `scenario` must be valid, `seed` null or valid, `out` a valid pointer.
 */
enum NlboxStatus nlbox_scenario_run(const struct NlboxScenario *scenario,
                                    const uint64_t *seed,
                                    struct NlboxReport **out);

/**
 * # Safety
 * `report` must come from [`nlbox_scenario_run`] and not be freed twice.
 */
void nlbox_report_free(struct NlboxReport *report);

/**
 * Full report as JSON. Free the string with [`nlbox_string_free`].
 *
 * # Safety
 * `report` must be valid and `out` a valid pointer.
 */
enum NlboxStatus nlbox_report_to_json(const struct NlboxReport *report, char **out);

/**
 * Plot-ready CSV table. Free the string with [`nlbox_string_free`].
 *
 * # Safety
 * `report` must be valid and `out` a valid pointer.
 */
enum NlboxStatus nlbox_report_to_csv(const struct NlboxReport *report, char **out);

/**
 * Signaling metric of a signaling report; `NLBOX_STATUS_PROTOCOL` for
 * other report kinds.
 *
 * # Safety
 * `report` must be valid and `out` a valid pointer.
 */
enum NlboxStatus nlbox_report_signaling_metric(const struct NlboxReport *report, double *out);

/**
 * # Safety
 * `s` must come from this library and not be freed twice.
 */
void nlbox_string_free(char *s);

/**
 * Trace distance of two `dim x dim` density matrices, each given as
 * `2 * dim * dim` doubles: row-major, real and imaginary parts interleaved.
 *
 * # Safety
 * `a` and `b` must point to `2 * dim * dim` doubles, `out` to one.
 */
enum NlboxStatus nlbox_trace_distance(const double *a, const double *b, size_t dim, double *out);

/**
 * Fits a trace-preserving linear map to a statistics table in the text
 * format and reports the residual and minimum Choi eigenvalue.
 *
 * # Safety
 * `text` must be NUL-terminated; the outputs must be valid pointers.
 */
enum NlboxStatus nlbox_stats_fit(const char *text, double *residual, double *choi_min_eig);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* NLBOX_H */
