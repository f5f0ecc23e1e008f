#ifndef QSTAR_H
#define QSTAR_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum QstarStatus {
  QSTAR_STATUS_OK = 0,
  QSTAR_STATUS_NULL_POINTER = 1,
  QSTAR_STATUS_INVALID_INPUT = 2,
  QSTAR_STATUS_MISMATCH = 3,
  QSTAR_STATUS_BUDGET = 4,
  QSTAR_STATUS_PANIC = 5,
} QstarStatus;

/**
 * A sextic `y^2 = x^6 + a5 x^5 + ... + a0`.
 */
typedef struct QstarCurve QstarCurve;

/**
 * A level with its curve and the expressions of `J_1..J_m`.
 */
typedef struct QstarLevel QstarLevel;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copy of the last error message on this thread, or null. Free with
 * [`qstar_string_free`].
 */
char *qstar_last_error(void);

/**
 * # Safety
 * `s` must be null or a string returned by this library, not yet freed.
 */
void qstar_string_free(char *s);

/**
 * Curve from integer coefficients `a[0..6]` = a0..a5.
 *
 * # Safety
 * `a` must point to six readable `int64_t`; `out` must be writable.
 */
enum QstarStatus qstar_curve_new(const int64_t *a, struct QstarCurve **out);

/**
 * The equation-table curve of `level`.
 *
 * # Safety
 * `out` must be writable.
 */
enum QstarStatus qstar_curve_from_table(uint64_t level, struct QstarCurve **out);

/**
 * # Safety
 * `curve` must be null or a handle from this library, not yet freed.
 */
void qstar_curve_free(struct QstarCurve *curve);

/**
 * # Safety
 * `curve` must be a live handle; `out` must be writable.
 */
enum QstarStatus qstar_curve_describe(const struct QstarCurve *curve, char **out);

/**
 * Whether `point` ("x,y", "(x,y)", "inf+" or "inf-") lies on the curve.
 *
 * # Safety
 * `curve` must be a live handle, `point` a NUL-terminated string, `out` writable.
 */
enum QstarStatus qstar_curve_contains(const struct QstarCurve *curve, const char *point, bool *out);

/**
 * JSON array of the points of height at most `height`.
 *
 * # Safety
 * `curve` must be a live handle; `out` must be writable.
 */
enum QstarStatus qstar_curve_search_points(const struct QstarCurve *curve,
                                           uint64_t height,
                                           char **out);

/**
 * Open a bundled level; computes the J-expressions, which is the slow part.
 *
 * # Safety
 * `out` must be writable.
 */
enum QstarStatus qstar_level_bundled(uint64_t level, bool allow_large, struct QstarLevel **out);

/**
 * Open a level from dataset JSON text.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
enum QstarStatus qstar_level_from_json(const char *json, bool allow_large, struct QstarLevel **out);

/**
 * # Safety
 * `level` must be null or a handle from this library, not yet freed.
 */
void qstar_level_free(struct QstarLevel *level);

/**
 * JSON report for one point: j-polynomial, factors, fields, CM discriminants.
 *
 * # Safety
 * `level` must be a live handle, `point` a NUL-terminated string, `out` writable.
 */
enum QstarStatus qstar_level_analyze_point(const struct QstarLevel *level,
                                           const char *point,
                                           char **out);

/**
 * CM discriminant of a monic integer polynomial given low degree first.
 * `found` is false when no discriminant matches.
 *
 * # Safety
 * `coeffs` must point to `len` readable `int64_t`; `d` and `found` writable.
 */
enum QstarStatus qstar_identify_cm(const int64_t *coeffs, size_t len, int64_t *d, bool *found);

/**
 * Hilbert class polynomial of `d` as a JSON array of decimal strings, low degree first.
 *
 * # Safety
 * `out` must be writable.
 */
enum QstarStatus qstar_class_polynomial(int64_t d, char **out);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* QSTAR_H */
