#ifndef DHM_H
#define DHM_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result code of every fallible call.
typedef enum DhmStatus {
  DHM_STATUS_OK = 0,
  DHM_STATUS_NULL_POINTER = 1,
  DHM_STATUS_EMPTY = 2,
  DHM_STATUS_INVALID_PARAMETER = 3,
  DHM_STATUS_NONPOSITIVE_WEIGHT = 4,
  DHM_STATUS_OUT_OF_WINDOW = 5,
  DHM_STATUS_NOT_MEAN_ZERO = 6,
  DHM_STATUS_PARSE = 7,
  DHM_STATUS_PANIC = 8,
} DhmStatus;

// Which summation path computes the transform.
typedef enum DhmPath {
  DHM_PATH_NAIVE = 0,
  DHM_PATH_FAST = 1,
} DhmPath;

// Finitely supported sequence.
typedef struct DhmSeq DhmSeq;

// Transform values on an evaluation window plus the bound on what lies
// outside it.
typedef struct DhmTransform DhmTransform;

// Positive weight on a finite window.
typedef struct DhmWeight DhmWeight;

// A supremum over windows `|k - m| <= n` with the window attaining it.
typedef struct DhmNorm {
  double value;
  // Nonzero when the value is the exact supremum rather than a lower bound.
  uint8_t exact;
  int64_t witness_m;
  int64_t witness_n;
} DhmNorm;

// Muckenhoupt constant over intervals `[lo, hi]` inside the searched window.
typedef struct DhmApConstant {
  double value;
  // Nonzero when the supremum was still increasing at the window edge.
  uint8_t growing;
  int64_t witness_lo;
  int64_t witness_hi;
} DhmApConstant;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or NULL after a success.
// The pointer stays valid until the next `dhm_*` call on the same thread.
const char *dhm_last_error_message(void);

// Static name of a status code, e.g. `"out-of-window"`.
const char *dhm_status_name(enum DhmStatus status);

// Sequence with `values[i]` at index `offset + i`.
//
// # Safety
// `values` must point to `len` readable doubles (it may be NULL when `len`
// is 0) and `out` must be writable.
enum DhmStatus dhm_seq_new(const double *values, size_t len, int64_t offset, struct DhmSeq **out);

// # Safety
// `seq` must be NULL or a handle from [`dhm_seq_new`] not yet freed.
void dhm_seq_free(struct DhmSeq *seq);

// Lowest stored index.
//
// # Safety
// `seq` must be a live handle.
int64_t dhm_seq_lo(const struct DhmSeq *seq);

// Number of stored values.
//
// # Safety
// `seq` must be a live handle.
size_t dhm_seq_len(const struct DhmSeq *seq);

// Weight from a family string (`const:C`, `power:A`, `random:SEED:RATIO`,
// `step:LOW:HIGH:AT`) sampled on `[lo, hi]`.
//
// # Safety
// `spec` must be a NUL-terminated string and `out` must be writable.
enum DhmStatus dhm_weight_from_family(const char *spec,
                                      int64_t lo,
                                      int64_t hi,
                                      struct DhmWeight **out);

// Weight with `values[i]` at index `lo + i`; every value must be positive.
//
// # Safety
// `values` must point to `len` readable doubles and `out` must be writable.
enum DhmStatus dhm_weight_from_values(const double *values,
                                      size_t len,
                                      int64_t lo,
                                      struct DhmWeight **out);

// # Safety
// `w` must be NULL or a handle from a `dhm_weight_*` constructor not yet
// freed.
void dhm_weight_free(struct DhmWeight *w);

// `(Hb)_n` for `n` in `[eval_lo, eval_hi]`. With `analytic_tail` nonzero the
// tail bound uses the sharper `O(1/dist^2)` estimate when `seq` sums to
// zero; otherwise it keeps the `||b||_1 / dist` bound.
//
// # Safety
// `seq` must be a live handle and `out` must be writable.
enum DhmStatus dhm_hilbert(const struct DhmSeq *seq,
                           int64_t eval_lo,
                           int64_t eval_hi,
                           enum DhmPath path,
                           uint8_t analytic_tail,
                           struct DhmTransform **out);

// First index of the evaluation window.
//
// # Safety
// `t` must be a live handle.
int64_t dhm_transform_lo(const struct DhmTransform *t);

// Number of values in the evaluation window.
//
// # Safety
// `t` must be a live handle.
size_t dhm_transform_len(const struct DhmTransform *t);

// Borrowed pointer to the values, valid until the handle is freed.
//
// # Safety
// `t` must be a live handle.
const double *dhm_transform_values(const struct DhmTransform *t);

// Upper bound on `|(Hb)_n|` outside the evaluation window.
//
// # Safety
// `t` must be a live handle.
double dhm_transform_tail_bound(const struct DhmTransform *t);

// # Safety
// `t` must be NULL or a handle from [`dhm_hilbert`] not yet freed.
void dhm_transform_free(struct DhmTransform *t);

// Weighted Morrey norm of `seq` with exponents `p`, `lambda`. Windows are
// searched up to `margin` indices beyond the support; the weight must
// cover the support widened by `margin + 1`.
//
// # Safety
// `seq` and `w` must be live handles and `out` must be writable.
enum DhmStatus dhm_weighted_morrey_norm(const struct DhmSeq *seq,
                                        const struct DhmWeight *w,
                                        double p,
                                        double lambda,
                                        int64_t margin,
                                        struct DhmNorm *out);

// Discrete Muckenhoupt constant of `w` over intervals inside `[lo, hi]`.
//
// # Safety
// `w` must be a live handle and `out` must be writable.
enum DhmStatus dhm_ap_constant(const struct DhmWeight *w,
                               double p,
                               int64_t lo,
                               int64_t hi,
                               struct DhmApConstant *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DHM_H */
