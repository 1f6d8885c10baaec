#ifndef JHOLO_H
#define JHOLO_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum JholoStatus {
  JHOLO_STATUS_OK = 0,
  JHOLO_STATUS_NULL_ARGUMENT = 1,
  JHOLO_STATUS_INVALID_UTF8 = 2,
  JHOLO_STATUS_INVALID_INPUT = 3,
  JHOLO_STATUS_CONFIG_ERROR = 4,
  JHOLO_STATUS_UNKNOWN_ID = 5,
  JHOLO_STATUS_IMMERSION_VIOLATION = 6,
  JHOLO_STATUS_DEGENERATE_FRAME = 7,
  JHOLO_STATUS_OUTSIDE_CHART = 8,
  JHOLO_STATUS_TAMING_VIOLATION = 9,
  JHOLO_STATUS_NUMERICAL_CONSISTENCY = 10,
  JHOLO_STATUS_BUFFER_TOO_SMALL = 11,
  JHOLO_STATUS_PANIC = 12,
} JholoStatus;

typedef enum JholoCertificate {
  JHOLO_CERTIFICATE_HOLOMORPHIC = 0,
  JHOLO_CERTIFICATE_DESTABILIZED = 1,
  JHOLO_CERTIFICATE_INCONCLUSIVE = 2,
} JholoCertificate;

/**
 * A surface sampled on a quadrature grid.
 */
typedef struct JholoGrid JholoGrid;

/**
 * Headline numbers of a destabilizer search. Fields that do not apply
 * are NaN.
 */
typedef struct JholoDestabilizeSummary {
  enum JholoCertificate certificate;
  /**
   * Node of largest Kähler angle (first in row-major order).
   */
  size_t node;
  double max_sin_alpha;
  /**
   * `A'(0)` of the distance-squared path.
   */
  double distance_squared_a_prime;
  /**
   * `A''(0)` of the saddle normal-extension path.
   */
  double saddle_a_second;
  /**
   * `D₂` of the saddle path at `node`.
   */
  double saddle_d2;
  /**
   * `A''(0)` of the Killing path (`CP^N` only).
   */
  double killing_a_second;
  /**
   * Oracle value for `killing_a_second`.
   */
  double killing_oracle_a_second;
  /**
   * Whether every formula matched its finite-difference oracle.
   */
  bool consistent;
} JholoDestabilizeSummary;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *jholo_version(void);

/**
 * Description of the last failure on this thread, or NULL. Valid until
 * the next call into the library on the same thread.
 */
const char *jholo_last_error_message(void);

/**
 * Build a catalog surface on an `n1 × n2` grid. `ambient_id` may be NULL
 * to use the surface's own ambient.
 *
 * # Safety
 * String arguments must be NULL or NUL-terminated; `out` must be valid
 * for writes.
 */
enum JholoStatus jholo_grid_new(const char *surface_id,
                                const char *ambient_id,
                                size_t n1,
                                size_t n2,
                                struct JholoGrid **out);

/**
 * Release a grid. NULL is ignored.
 *
 * # Safety
 * `grid` must come from [`jholo_grid_new`] and not be used afterwards.
 */
void jholo_grid_free(struct JholoGrid *grid);

/**
 * Number of grid nodes, or 0 for NULL.
 *
 * # Safety
 * `grid` must be NULL or a live handle.
 */
size_t jholo_grid_len(const struct JholoGrid *grid);

/**
 * Area of the surface for the base form.
 *
 * # Safety
 * `grid` must be a live handle; `out` must be valid for writes.
 */
enum JholoStatus jholo_grid_area(const struct JholoGrid *grid, double *out);

/**
 * `cos α` and `sin α` at every node, in row-major node order. Either
 * output may be NULL.
 *
 * # Safety
 * Non-NULL outputs must hold `len` doubles.
 */
enum JholoStatus jholo_grid_kahler_angles(const struct JholoGrid *grid,
                                          double *cos_out,
                                          double *sin_out,
                                          size_t len);

/**
 * First variation along the distance-squared potential, by formula and by
 * the finite-difference area oracle. `oracle` may be NULL to skip it.
 *
 * # Safety
 * `grid` must be a live handle; outputs must be NULL or valid for writes
 * (`formula` must not be NULL).
 */
enum JholoStatus jholo_first_variation_distance_squared(const struct JholoGrid *grid,
                                                        double *formula,
                                                        double *oracle);

/**
 * Run the destabilizer search with default settings.
 *
 * # Safety
 * `grid` must be a live handle; `out` must be valid for writes.
 */
enum JholoStatus jholo_destabilize(const struct JholoGrid *grid,
                                   struct JholoDestabilizeSummary *out);

/**
 * Run a batch command (`angle`, `first-variation`, `second-variation`,
 * `destabilize`, `killing-check`, `invariance`) on a TOML scenario held
 * in memory. On success `*report_json` receives the run record as JSON
 * and `*exit_code` the command-line exit code it corresponds to.
 *
 * # Safety
 * Strings must be NUL-terminated; outputs must be valid for writes.
 */
enum JholoStatus jholo_run_scenario(const char *command,
                                    const char *config_toml,
                                    char **report_json,
                                    int32_t *exit_code);

/**
 * Release a string returned by the library. NULL is ignored.
 *
 * # Safety
 * `s` must come from this library and not be used afterwards.
 */
void jholo_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* JHOLO_H */
