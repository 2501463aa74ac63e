#ifndef DEA_FRONTIER_H
#define DEA_FRONTIER_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum DfStatus {
  DF_STATUS_OK = 0,
  DF_STATUS_NULL_POINTER = 1,
  DF_STATUS_INVALID_INPUT = 2,
  DF_STATUS_OUTSIDE_PPS = 3,
  DF_STATUS_NUMERICAL = 4,
  DF_STATUS_CONVERGENCE = 5,
  DF_STATUS_IO = 6,
  DF_STATUS_PANIC = 7,
} DfStatus;

typedef enum DfOrientation {
  DF_ORIENTATION_INPUT = 0,
  DF_ORIENTATION_OUTPUT = 1,
} DfOrientation;

typedef enum DfClass {
  DF_CLASS_EXTREME_EFFICIENT = 0,
  DF_CLASS_EFFICIENT_NONEXTREME = 1,
  DF_CLASS_WEAKLY_EFFICIENT = 2,
  DF_CLASS_INEFFICIENT = 3,
} DfClass;

/**
 * Opaque dataset handle.
 */
typedef struct DfDataset DfDataset;

/**
 * Opaque handle to the outcome of an improvement run.
 */
typedef struct DfImprovement DfImprovement;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null. The pointer
 * stays valid until the next call on the same thread.
 */
const char *df_last_error(void);

/**
 * Builds a dataset from row-major `n × m` inputs and `n × r` outputs.
 * Units are named `u1`, `u2`, ….
 *
 * # Safety
 * `inputs` must hold `n*m` doubles, `outputs` `n*r` doubles, and `out`
 * must be writable.
 */
enum DfStatus df_dataset_new(size_t n,
                             size_t m,
                             size_t r,
                             const double *inputs,
                             const double *outputs,
                             struct DfDataset **out);

/**
 * # Safety
 * `path` must be a NUL-terminated string and `out` writable.
 */
enum DfStatus df_dataset_load_csv(const char *path, struct DfDataset **out);

/**
 * # Safety
 * `ds` must be a live handle and `path` a NUL-terminated string.
 */
enum DfStatus df_dataset_save_csv(const struct DfDataset *ds, const char *path);

/**
 * Releases a dataset handle. Null is ignored.
 *
 * # Safety
 * `ds` must come from this library and not be used afterwards.
 */
void df_dataset_free(struct DfDataset *ds);

/**
 * Writes the number of units, inputs and outputs; any out-pointer may be
 * null.
 *
 * # Safety
 * `ds` must be a live handle; non-null out-pointers must be writable.
 */
enum DfStatus df_dataset_shape(const struct DfDataset *ds, size_t *n, size_t *m, size_t *r);

/**
 * Copies unit `j`'s inputs and outputs into caller buffers of length m and r.
 *
 * # Safety
 * `ds` must be a live handle; `inputs` and `outputs` must be writable for
 * m and r doubles.
 */
enum DfStatus df_dataset_unit(const struct DfDataset *ds,
                              size_t j,
                              double *inputs,
                              double *outputs);

/**
 * BCC score of unit `j` (θ* for input, η* for output orientation).
 *
 * # Safety
 * `ds` must be a live handle and `score` writable.
 */
enum DfStatus df_score(const struct DfDataset *ds,
                       size_t j,
                       enum DfOrientation orientation,
                       double *score);

/**
 * # Safety
 * `ds` must be a live handle and `class` writable.
 */
enum DfStatus df_classify(const struct DfDataset *ds, size_t j, enum DfClass *class_);

/**
 * Number of terminal directions of unit `j` (0 when it is not terminal).
 *
 * # Safety
 * `ds` must be a live handle and `count` writable.
 */
enum DfStatus df_terminal_count(const struct DfDataset *ds, size_t j, size_t *count);

/**
 * Runs the improvement with default parameters. On `CONVERGENCE` the
 * partial result is still returned through `out` when available.
 *
 * # Safety
 * `ds` must be a live handle and `out` writable.
 */
enum DfStatus df_improve(const struct DfDataset *ds, struct DfImprovement **out);

/**
 * # Safety
 * `res` must come from this library and not be used afterwards.
 */
void df_improvement_free(struct DfImprovement *res);

/**
 * Whether all guarantees hold, and how many artificial units were kept.
 *
 * # Safety
 * `res` must be a live handle; non-null out-pointers must be writable.
 */
enum DfStatus df_improvement_summary(const struct DfImprovement *res,
                                     bool *certified,
                                     size_t *kept);

/**
 * New dataset handle holding the improved data (originals first).
 *
 * # Safety
 * `res` must be a live handle and `out` writable.
 */
enum DfStatus df_improvement_dataset(const struct DfImprovement *res, struct DfDataset **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DEA_FRONTIER_H */
