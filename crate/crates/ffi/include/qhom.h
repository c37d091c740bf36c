#ifndef QHOM_H
#define QHOM_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes; the numeric values match the command-line exit codes.
 */
typedef enum QhomStatus {
  QHOM_STATUS_OK = 0,
  /**
   * The input is well formed but fails a mathematical check.
   */
  QHOM_STATUS_SEMANTIC = 1,
  /**
   * Malformed JSON, bad parameters or a null pointer.
   */
  QHOM_STATUS_INVALID_INPUT = 2,
  /**
   * The window is too small to decide.
   */
  QHOM_STATUS_INCONCLUSIVE = 3,
  /**
   * A Rust panic was caught at the boundary.
   */
  QHOM_STATUS_INTERNAL = 4,
} QhomStatus;

/**
 * Opaque certificate handle.
 */
typedef struct QhomCertificate QhomCertificate;

/**
 * Opaque window handle.
 */
typedef struct QhomWindow QhomWindow;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failure on this thread, or null. The pointer
 * stays valid until the next library call on this thread.
 */
const char *qhom_last_error(void);

/**
 * Parses a window from its JSON form (`{"n", "N", "values"}`).
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
enum QhomStatus qhom_window_from_json(const char *json, struct QhomWindow **out);

/**
 * # Safety
 * `w` must come from [`qhom_window_from_json`] and not be freed twice.
 */
void qhom_window_free(struct QhomWindow *w);

/**
 * # Safety
 * `w` must be a live window handle or null (returns 0).
 */
size_t qhom_window_dim(const struct QhomWindow *w);

/**
 * # Safety
 * `w` must be a live window handle or null (returns 0).
 */
int64_t qhom_window_radius(const struct QhomWindow *w);

/**
 * Checks `rank(f(x+y) - f(x) - f(y)) <= c` over the window. Returns
 * `QHOM_STATUS_OK` when the bound holds and `QHOM_STATUS_SEMANTIC` when it fails; in both
 * cases the measured maximum is written to `c_measured` and a witness pair
 * (or `0, 0` if none) to `witness_x`, `witness_y`. Witness pointers may be
 * null.
 *
 * # Safety
 * `w` must be a live window handle; `c_measured` must be writable.
 */
enum QhomStatus qhom_verify(const struct QhomWindow *w,
                            size_t c,
                            size_t *c_measured,
                            int64_t *witness_x,
                            int64_t *witness_y);

/**
 * Builds an approximating homomorphism with a rank certificate.
 *
 * # Safety
 * `w` must be a live window handle; `out` must be writable.
 */
enum QhomStatus qhom_approximate(const struct QhomWindow *w, struct QhomCertificate **out);

/**
 * # Safety
 * `c` must come from [`qhom_approximate`] and not be freed twice.
 */
void qhom_certificate_free(struct QhomCertificate *c);

/**
 * `max_x rank(f(x) - xA)`.
 *
 * # Safety
 * `c` must be a live certificate handle or null (returns 0).
 */
size_t qhom_certificate_max_rank(const struct QhomCertificate *c);

/**
 * Certificate JSON, to be released with [`qhom_string_free`].
 *
 * # Safety
 * `c` must be a live certificate handle; `out` must be writable.
 */
enum QhomStatus qhom_certificate_to_json(const struct QhomCertificate *c, char **out);

/**
 * Structure detection on the normalized delta sequence. The finding is
 * written as JSON even when it is Inconclusive (status `QHOM_STATUS_INCONCLUSIVE`).
 *
 * # Safety
 * `w` must be a live window handle; `out` must be writable.
 */
enum QhomStatus qhom_detect_json(const struct QhomWindow *w, char **out);

/**
 * Whether `x ~ y` under the equivalence generated by the two reflections
 * of periods `p` and `q` (`2 <= q < p`).
 *
 * # Safety
 * `out` must be writable.
 */
enum QhomStatus qhom_equiv_related(int64_t x, int64_t y, int64_t p, int64_t q, bool *out);

/**
 * # Safety
 * `s` must come from this library and not be freed twice.
 */
void qhom_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QHOM_H */
