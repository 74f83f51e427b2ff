#ifndef TPC_H
#define TPC_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Number of keypoint slots in a [`TpcKeypoints`] handle.
 */
#define TPC_NUM_KEYPOINTS 17

typedef enum TpcStatus {
  TPC_STATUS_OK = 0,
  TPC_STATUS_NULL_POINTER = 1,
  TPC_STATUS_INVALID_ARGUMENT = 2,
  TPC_STATUS_FEWER_THAN_THREE_POINTS = 3,
  TPC_STATUS_DEGENERATE_SHAPE = 4,
  TPC_STATUS_MISSING_AXIS_POINTS = 5,
  TPC_STATUS_EMPTY_SHAPE = 6,
  TPC_STATUS_DIMENSION_MISMATCH = 7,
  TPC_STATUS_NO_FEASIBLE_CANDIDATE = 8,
  TPC_STATUS_INVALID_GROUP_COUNT = 9,
  TPC_STATUS_PANIC = 10,
} TpcStatus;

/**
 * Opaque feature sequence.
 */
typedef struct TpcFeatures TpcFeatures;

/**
 * Opaque keypoint set.
 */
typedef struct TpcKeypoints TpcKeypoints;

/**
 * Similarity transform `p -> scale * p * R + t` on row vectors.
 */
typedef struct TpcTransform {
  double scale;
  /**
   * Row-major 2x2 rotation.
   */
  double rotation[4];
  double translation[2];
} TpcTransform;

typedef struct TpcMisalignment {
  double theta;
  double box_iou;
  bool rotation_misaligned;
  bool scale_misaligned;
  bool misaligned;
} TpcMisalignment;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread; empty after a success.
 * The pointer stays valid until the next call on the same thread.
 */
const char *tpc_last_error_message(void);

/**
 * Static description of a status code.
 */
const char *tpc_status_message(enum TpcStatus status);

/**
 * Creates a keypoint set from `TPC_NUM_KEYPOINTS` interleaved points and as
 * many visibility flags (nonzero is visible).
 *
 * # Safety
 * `xy` must point to `2 * TPC_NUM_KEYPOINTS` doubles, `visible` to
 * `TPC_NUM_KEYPOINTS` bytes, and `out_handle` must be writable.
 */
enum TpcStatus tpc_keypoints_new(const double *xy,
                                 const uint8_t *visible,
                                 struct TpcKeypoints **out_handle);

/**
 * # Safety
 * `handle` must come from [`tpc_keypoints_new`] and not be used afterwards.
 * Null is ignored.
 */
void tpc_keypoints_free(struct TpcKeypoints *handle);

/**
 * Least-squares similarity mapping `n` reference points onto `n` target
 * points.
 *
 * # Safety
 * `ref_xy` and `tgt_xy` must each hold `2 * n` doubles; output pointers must be
 * writable.
 */
enum TpcStatus tpc_solve_procrustes(const double *ref_xy,
                                    const double *tgt_xy,
                                    size_t n,
                                    struct TpcTransform *out_transform);

/**
 * Applies `transform` to `n` points. `xy_out` may alias `xy_in`.
 *
 * # Safety
 * `xy_in` and `xy_out` must each hold `2 * n` doubles.
 */
enum TpcStatus tpc_apply_transform(const struct TpcTransform *transform,
                                   const double *xy_in,
                                   size_t n,
                                   double *xy_out);

/**
 * # Safety
 * Both handles must be live; the output pointer must be writable.
 */
enum TpcStatus tpc_classify_misalignment(const struct TpcKeypoints *reference,
                                         const struct TpcKeypoints *target,
                                         struct TpcMisalignment *out_report);

/**
 * IoU of two `width * height` masks.
 *
 * # Safety
 * `a` and `b` must each hold `width * height` bytes; the output pointer must be writable.
 */
enum TpcStatus tpc_mask_iou(const uint8_t *a,
                            const uint8_t *b,
                            uint32_t width,
                            uint32_t height,
                            double *out_iou);

/**
 * Splits `frames` frames into `groups` contiguous groups. Writes `groups`
 * pairs of 1-based inclusive bounds into `out_bounds`.
 *
 * # Safety
 * `out_bounds` must hold `2 * groups` elements.
 */
enum TpcStatus tpc_group_partition(size_t frames, size_t groups, size_t *out_bounds);

/**
 * Wraps a `frames x patches x dim` row-major feature array.
 *
 * # Safety
 * `data` must hold `frames * patches * dim` doubles; the output pointer must be writable.
 */
enum TpcStatus tpc_features_new(size_t frames,
                                size_t patches,
                                size_t dim,
                                const double *data,
                                struct TpcFeatures **out_handle);

/**
 * # Safety
 * `handle` must come from [`tpc_features_new`] and not be used afterwards.
 * Null is ignored.
 */
void tpc_features_free(struct TpcFeatures *handle);

/**
 * Runs `steps` propagation steps. Step outputs are written in execution
 * order (t = steps first) to `out_steps`, each the same size as the input.
 * When `out_picks` is non-null it receives `steps * groups` 1-based offsets.
 *
 * # Safety
 * `features` must be live; `out_steps` must hold
 * `steps * frames * patches * dim` doubles; `out_picks`, if non-null,
 * `steps * groups` elements.
 */
enum TpcStatus tpc_run_propagation(const struct TpcFeatures *features,
                                   size_t groups,
                                   size_t steps,
                                   uint64_t seed,
                                   double *out_steps,
                                   size_t *out_picks);

/**
 * Calibrates one frame: picks the best group subset, warps the reference
 * onto a `tgt_width x tgt_height` canvas and writes the warped RGBA image
 * and silhouette. `out_subset` receives the subset bits (face 1, arms 2,
 * legs 4; torso always included).
 *
 * # Safety
 * Handles must be live; `ref_rgba` must hold `4 * ref_width * ref_height`
 * bytes and `ref_mask` `ref_width * ref_height`; `tgt_mask` and `out_mask`
 * `tgt_width * tgt_height`; `out_rgba` `4 * tgt_width * tgt_height`.
 * Output pointers other than the image and mask buffers may be null.
 */
enum TpcStatus tpc_calibrate_frame(const struct TpcKeypoints *ref_kps,
                                   const struct TpcKeypoints *tgt_kps,
                                   const uint8_t *ref_rgba,
                                   const uint8_t *ref_mask,
                                   uint32_t ref_width,
                                   uint32_t ref_height,
                                   const uint8_t *tgt_mask,
                                   uint32_t tgt_width,
                                   uint32_t tgt_height,
                                   uint8_t *out_rgba,
                                   uint8_t *out_mask,
                                   struct TpcTransform *out_transform,
                                   double *out_score,
                                   uint8_t *out_subset);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TPC_H */
