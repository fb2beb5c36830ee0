#ifndef ROTAVG_H
#define ROTAVG_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum rotavg_status {
  ROTAVG_STATUS_OK = 0,
  ROTAVG_STATUS_NULL_POINTER = 1,
  ROTAVG_STATUS_INVALID_RANK = 2,
  ROTAVG_STATUS_INVALID_INDEX = 3,
  ROTAVG_STATUS_INVALID_ARGUMENT = 4,
  ROTAVG_STATUS_LENGTH_MISMATCH = 5,
  ROTAVG_STATUS_INTERNAL = 6,
} rotavg_status;

/**
 * Averaging operator for one rank; create with [`rotavg_average_new`].
 */
typedef struct rotavg_average rotavg_average;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static nul-terminated string.
 */
const char *rotavg_version(void);

/**
 * Message for the most recent failure on this thread, or null. The pointer is
 * valid until the next failing call on the same thread; do not free it.
 */
const char *rotavg_last_error(void);

/**
 * # Safety
 * `s` must be null or a string returned by this library, freed at most once.
 */
void rotavg_string_free(char *s);

/**
 * Builds (or reuses) the averaging operator for an odd rank in 3..=11.
 *
 * # Safety
 * `out` must be a valid pointer; on success it receives a handle to release
 * with [`rotavg_average_free`].
 */
enum rotavg_status rotavg_average_new(size_t rank, struct rotavg_average **out);

/**
 * # Safety
 * `h` must be null or a handle from [`rotavg_average_new`], freed at most once.
 */
void rotavg_average_free(struct rotavg_average *h);

/**
 * Rank of the operator, or 0 for a null handle.
 *
 * # Safety
 * `h` must be null or a live handle.
 */
size_t rotavg_average_rank(const struct rotavg_average *h);

/**
 * Exact component `I_{lab; mol}` as a `"p/q"` string; `lab` and `mol` are
 * strings over `xyz` of length equal to the rank.
 *
 * # Safety
 * `h` must be a live handle, `lab`/`mol` nul-terminated strings, `out` valid.
 */
enum rotavg_status rotavg_average_entry_exact(const struct rotavg_average *h,
                                              const char *lab,
                                              const char *mol,
                                              char **out);

/**
 * Component `I_{lab; mol}` as a double.
 *
 * # Safety
 * As for [`rotavg_average_entry_exact`], with `out` pointing to a double.
 */
enum rotavg_status rotavg_average_entry(const struct rotavg_average *h,
                                        const char *lab,
                                        const char *mol,
                                        double *out);

/**
 * Averages a dense tensor of `3^rank` doubles (last index fastest) into `output`.
 * `input` and `output` may alias.
 *
 * # Safety
 * Both pointers must reference `len` doubles.
 */
enum rotavg_status rotavg_average_tensor(const struct rotavg_average *h,
                                         const double *input,
                                         double *output,
                                         size_t len);

/**
 * Coefficient table for `rank` as JSON.
 *
 * # Safety
 * `out` must be valid; the result is freed with [`rotavg_string_free`].
 */
enum rotavg_status rotavg_coefficients_json(size_t rank, char **out);

/**
 * Diagonal component `<l_xx^q l_yy^r l_zz^s>` for odd positive `q, r, s`, as `"p/q"`.
 *
 * # Safety
 * `out` must be valid; the result is freed with [`rotavg_string_free`].
 */
enum rotavg_status rotavg_diag_average(int64_t q, int64_t r, int64_t s, char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ROTAVG_H */
