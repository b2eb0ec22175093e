#ifndef PHRASEBOUND_H
#define PHRASEBOUND_H

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

typedef enum PbStatus {
  PB_STATUS_OK = 0,
  PB_STATUS_NULL_POINTER = 1,
  PB_STATUS_INVALID_UTF8 = 2,
  PB_STATUS_PARSE = 3,
  PB_STATUS_INVALID_ARGUMENT = 4,
  PB_STATUS_NUMERIC = 5,
  PB_STATUS_BUFFER_TOO_SMALL = 6,
  PB_STATUS_PANIC = 7,
} PbStatus;

/**
 * Fitted LASSO model.
 */
typedef struct PbLasso PbLasso;

/**
 * Parsed TextGrid.
 */
typedef struct PbTextGrid PbTextGrid;

typedef struct PbPause {
  /**
   * Index of the spoken word the pause follows.
   */
  size_t after_word;
  double duration;
} PbPause;

/**
 * Undefined ratios are NaN.
 */
typedef struct PbSensitivity {
  double precision;
  double recall;
  double f1;
  bool f1_zero_tp;
} PbSensitivity;

typedef struct PbEffect {
  /**
   * True for the signed-rank test, false for the rank-sum test.
   */
  bool paired;
  double statistic;
  double p_value;
  bool exact;
  bool significant;
} PbEffect;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failure on this thread, or null. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *pb_last_error(void);

/**
 * Parse a TextGrid (long or short format, UTF-8 or UTF-16) from `len` bytes.
 *
 * # Safety
 * `bytes` must point to `len` readable bytes; `out` must be writable.
 */
enum PbStatus pb_textgrid_parse(const uint8_t *bytes, size_t len, struct PbTextGrid **out_grid);

/**
 * # Safety
 * `grid` must be null or a handle from [`pb_textgrid_parse`] not yet freed.
 */
void pb_textgrid_free(struct PbTextGrid *grid);

/**
 * # Safety
 * `grid` must be a live handle; `xmin` and `xmax` must be writable.
 */
enum PbStatus pb_textgrid_span(const struct PbTextGrid *grid, double *xmin, double *xmax);

/**
 * Pauses of at least `min_dur` seconds between spoken words. The total is
 * stored in `count`; with zero `capacity` nothing else is written, otherwise
 * `capacity` must cover the total.
 *
 * # Safety
 * `grid` must be a live handle; `pauses` must hold `capacity` entries;
 * `count` must be writable.
 */
enum PbStatus pb_textgrid_pauses(const struct PbTextGrid *grid,
                                 double min_dur,
                                 struct PbPause *pauses,
                                 size_t capacity,
                                 size_t *count);

/**
 * Orthographic syllable estimate for a NUL-terminated UTF-8 word.
 *
 * # Safety
 * `word` must be a valid C string; `out_count` must be writable.
 */
enum PbStatus pb_count_syllables(const char *word, uint32_t *out_count);

/**
 * # Safety
 * `out_score` must be writable.
 */
enum PbStatus pb_sensitivity_score(uint64_t tp,
                                   uint64_t fp,
                                   uint64_t fn_,
                                   uint64_t tn,
                                   struct PbSensitivity *out_score);

/**
 * Two-sided rank test of `a` against `b`; paired samples must have equal
 * length.
 *
 * # Safety
 * `a` and `b` must hold `n_a` and `n_b` values; `out_effect` must be
 * writable.
 */
enum PbStatus pb_effect_test(const double *a,
                             size_t n_a,
                             const double *b,
                             size_t n_b,
                             bool paired,
                             double alpha,
                             struct PbEffect *out_effect);

/**
 * Fit `y ~ x` with an L1 penalty of `lambda` on the 1/(2n) squared-error
 * scale. `x` is row-major `n × p`; columns are centered but not scaled.
 *
 * # Safety
 * `x` must hold `n * p` values, `y` must hold `n`; `out_model` must be
 * writable.
 */
enum PbStatus pb_lasso_fit(const double *x,
                           const double *y,
                           size_t n,
                           size_t p,
                           double lambda,
                           struct PbLasso **out_model);

/**
 * # Safety
 * `model` must be null or a handle from [`pb_lasso_fit`] not yet freed.
 */
void pb_lasso_free(struct PbLasso *model);

/**
 * Copy the intercept and `p` coefficients out of a fitted model.
 *
 * # Safety
 * `model` must be a live handle; `coef` must hold `p` values; `intercept`
 * must be writable.
 */
enum PbStatus pb_lasso_coef(const struct PbLasso *model, double *intercept, double *coef, size_t p);

/**
 * Predictions for `n` rows of `x` (row-major, `p` columns as fitted).
 *
 * # Safety
 * `model` must be a live handle; `x` must hold `n * p` values and `pred`
 * `n`.
 */
enum PbStatus pb_lasso_predict(const struct PbLasso *model,
                               const double *x,
                               size_t n,
                               size_t p,
                               double *pred);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PHRASEBOUND_H */
