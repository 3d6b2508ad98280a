#ifndef GINISIM_H
#define GINISIM_H

/* Generated by cbindgen from ginisim-ffi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status code returned by every fallible call.
 */
typedef enum GsStatus {
  /**
   * Success.
   */
  GS_STATUS_OK = 0,
  /**
   * A required pointer argument was NULL.
   */
  GS_STATUS_NULL_ARGUMENT = 1,
  /**
   * A string argument was not valid UTF-8.
   */
  GS_STATUS_INVALID_UTF8 = 2,
  /**
   * Input could not be read or parsed.
   */
  GS_STATUS_PARSE_ERROR = 3,
  /**
   * Input parsed but failed validation.
   */
  GS_STATUS_VALIDATION_ERROR = 4,
} GsStatus;

/**
 * Opaque handle to a loaded vector dataset.
 */
typedef struct GsDataset GsDataset;

/**
 * Opaque handle to a computed score set. Id and class strings returned for
 * a score set stay valid until the handle is freed.
 */
typedef struct GsScores GsScores;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failure on this thread. The pointer stays
 * valid until the next failing call on the same thread.
 */
const char *gs_last_error(void);

/**
 * Library version as a static string.
 */
const char *gs_version(void);

/**
 * Load an IDX image/label pair (gzip accepted).
 *
 * # Safety
 * `images_path` and `labels_path` must be NUL-terminated strings; `out`
 * must be a valid pointer. On success `*out` owns the dataset and must be
 * released with [`gs_dataset_free`].
 */
enum GsStatus gs_dataset_open_idx(const char *images_path,
                                  const char *labels_path,
                                  struct GsDataset **out);

/**
 * Load a CSV embedding file with header `id,label,x0,...`.
 *
 * # Safety
 * `path` must be a NUL-terminated string; `out` must be a valid pointer.
 * On success `*out` owns the dataset and must be released with
 * [`gs_dataset_free`].
 */
enum GsStatus gs_dataset_open_csv(const char *path, struct GsDataset **out);

/**
 * Number of items, or 0 for NULL.
 *
 * # Safety
 * `ds` must be NULL or a live handle from a `gs_dataset_open_*` call.
 */
size_t gs_dataset_len(const struct GsDataset *ds);

/**
 * Vector dimensionality, or 0 for NULL.
 *
 * # Safety
 * `ds` must be NULL or a live handle from a `gs_dataset_open_*` call.
 */
size_t gs_dataset_dim(const struct GsDataset *ds);

/**
 * # Safety
 * `ds` must be NULL (no-op) or a handle not yet freed.
 */
void gs_dataset_free(struct GsDataset *ds);

/**
 * Score a dataset: per-class dissimilarity Ginis plus MinMax normalization
 * (per class when `per_class`, else across the whole set). `band_rows = 0`
 * selects the default band size.
 *
 * # Safety
 * `ds` must be a live dataset handle and `out` a valid pointer. On success
 * `*out` owns the scores and must be released with [`gs_scores_free`].
 */
enum GsStatus gs_scores_compute(const struct GsDataset *ds,
                                size_t band_rows,
                                bool per_class,
                                struct GsScores **out);

/**
 * Number of scored items, or 0 for NULL.
 *
 * # Safety
 * `scores` must be NULL or a live handle from [`gs_scores_compute`].
 */
size_t gs_scores_len(const struct GsScores *scores);

/**
 * Raw Gini coefficient of item `index`.
 *
 * # Safety
 * `scores` must be a live handle and `out` a valid pointer.
 */
enum GsStatus gs_scores_raw(const struct GsScores *scores, size_t index, double *out);

/**
 * MinMax-normalized Gini coefficient of item `index`.
 *
 * # Safety
 * `scores` must be a live handle and `out` a valid pointer.
 */
enum GsStatus gs_scores_normalized(const struct GsScores *scores, size_t index, double *out);

/**
 * Item id of `index`; NULL when out of range. Valid until the handle is
 * freed.
 *
 * # Safety
 * `scores` must be NULL or a live handle from [`gs_scores_compute`].
 */
const char *gs_scores_id(const struct GsScores *scores, size_t index);

/**
 * Class tag of `index`; NULL when out of range. Valid until the handle is
 * freed.
 *
 * # Safety
 * `scores` must be NULL or a live handle from [`gs_scores_compute`].
 */
const char *gs_scores_class(const struct GsScores *scores, size_t index);

/**
 * Write the scores as `id,class,gini_raw,gini_norm` CSV.
 *
 * # Safety
 * `scores` must be a live handle; `path` a NUL-terminated string.
 */
enum GsStatus gs_scores_write_csv(const struct GsScores *scores, const char *path);

/**
 * # Safety
 * `scores` must be NULL (no-op) or a handle not yet freed.
 */
void gs_scores_free(struct GsScores *scores);

/**
 * Gini coefficient of `len` nonnegative values.
 *
 * # Safety
 * `values` must point to `len` readable doubles; `out` must be valid.
 */
enum GsStatus gs_gini(const double *values, size_t len, double *out);

/**
 * First Wasserstein distance between two 1-D samples.
 *
 * # Safety
 * `a` and `b` must point to `a_len` / `b_len` readable doubles; `out` must
 * be valid.
 */
enum GsStatus gs_emd(const double *a, size_t a_len, const double *b, size_t b_len, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GINISIM_H */
