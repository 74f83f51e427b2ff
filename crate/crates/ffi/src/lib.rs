//! C interface to `tpc-core`.
//!
//! Every function returns a [`TpcStatus`]. On failure the thread's last error
//! message is set and can be read with [`tpc_last_error_message`]. Objects
//! are opaque handles created by `*_new` and released by the matching
//! `*_free`. Keypoint coordinates are passed as interleaved `x, y` doubles;
//! images are tightly packed 8-bit RGBA, masks one byte per pixel (nonzero is
//! set).

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use tpc_core::calibration::{mask_iou, select_subset, RasterImage, ShapeMask};
use tpc_core::diagnostics::classify_misalignment;
use tpc_core::propagation::{group_partition, run_propagation, FeatureSequence};
use tpc_core::shape::{
    apply_transform, solve_procrustes, KeypointSet, PairedPointSets, Point2, ProcrustesTransform,
    NUM_KEYPOINTS,
};
use tpc_core::TpcError;

/// Number of keypoint slots in a [`TpcKeypoints`] handle.
pub const TPC_NUM_KEYPOINTS: usize = 17;

const _: () = assert!(TPC_NUM_KEYPOINTS == NUM_KEYPOINTS);

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TpcStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    FewerThanThreePoints = 3,
    DegenerateShape = 4,
    MissingAxisPoints = 5,
    EmptyShape = 6,
    DimensionMismatch = 7,
    NoFeasibleCandidate = 8,
    InvalidGroupCount = 9,
    Panic = 10,
}

/// Similarity transform `p -> scale * p * R + t` on row vectors.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TpcTransform {
    pub scale: f64,
    /// Row-major 2x2 rotation.
    pub rotation: [f64; 4],
    pub translation: [f64; 2],
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TpcMisalignment {
    pub theta: f64,
    pub box_iou: f64,
    pub rotation_misaligned: bool,
    pub scale_misaligned: bool,
    pub misaligned: bool,
}

/// Opaque keypoint set.
pub struct TpcKeypoints(KeypointSet);

/// Opaque feature sequence.
pub struct TpcFeatures(FeatureSequence);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(message: &str) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

struct Failure(TpcStatus, String);

impl From<TpcError> for Failure {
    fn from(e: TpcError) -> Self {
        let status = match e.root() {
            TpcError::FewerThanThreePoints { .. } => TpcStatus::FewerThanThreePoints,
            TpcError::DegenerateShape(_) => TpcStatus::DegenerateShape,
            TpcError::MissingAxisPoints => TpcStatus::MissingAxisPoints,
            TpcError::EmptyShape => TpcStatus::EmptyShape,
            TpcError::DimensionMismatch(_) => TpcStatus::DimensionMismatch,
            TpcError::NoFeasibleCandidate => TpcStatus::NoFeasibleCandidate,
            TpcError::InvalidGroupCount { .. } => TpcStatus::InvalidGroupCount,
            _ => TpcStatus::InvalidArgument,
        };
        Failure(status, e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(TpcStatus::NullPointer, format!("{what} is null"))
}

fn invalid(message: impl Into<String>) -> Failure {
    Failure(TpcStatus::InvalidArgument, message.into())
}

fn guard(body: impl FnOnce() -> Result<(), Failure>) -> TpcStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            set_last_error("");
            TpcStatus::Ok
        }
        Ok(Err(Failure(status, message))) => {
            set_last_error(&message);
            status
        }
        Err(_) => {
            set_last_error("internal panic");
            TpcStatus::Panic
        }
    }
}

unsafe fn slice<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn slice_mut<'a, T>(p: *mut T, len: usize, what: &str) -> Result<&'a mut [T], Failure> {
    if len == 0 {
        return Ok(&mut []);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts_mut(p, len))
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn out<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| null(what))
}

fn points(xy: &[f64]) -> Vec<Point2> {
    xy.chunks_exact(2)
        .map(|c| Point2::new(c[0], c[1]))
        .collect()
}

fn to_c(t: &ProcrustesTransform) -> TpcTransform {
    let r = t.rotation;
    TpcTransform {
        scale: t.scale,
        rotation: [r[(0, 0)], r[(0, 1)], r[(1, 0)], r[(1, 1)]],
        translation: [t.translation.x, t.translation.y],
    }
}

fn from_c(t: &TpcTransform) -> ProcrustesTransform {
    ProcrustesTransform {
        scale: t.scale,
        rotation: tpc_core::shape::Matrix2::new(
            t.rotation[0],
            t.rotation[1],
            t.rotation[2],
            t.rotation[3],
        ),
        translation: tpc_core::shape::Vector2::new(t.translation[0], t.translation[1]),
    }
}

fn mask_from(bytes: &[u8], width: u32, height: u32) -> Result<ShapeMask, Failure> {
    Ok(ShapeMask::new(
        width,
        height,
        bytes.iter().map(|&b| b != 0).collect(),
    )?)
}

/// Message for the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn tpc_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Static description of a status code.
#[no_mangle]
pub extern "C" fn tpc_status_message(status: TpcStatus) -> *const c_char {
    let s: &'static [u8] = match status {
        TpcStatus::Ok => b"ok\0",
        TpcStatus::NullPointer => b"null pointer argument\0",
        TpcStatus::InvalidArgument => b"invalid argument\0",
        TpcStatus::FewerThanThreePoints => b"fewer than three points\0",
        TpcStatus::DegenerateShape => b"degenerate shape\0",
        TpcStatus::MissingAxisPoints => b"nose or hips not visible\0",
        TpcStatus::EmptyShape => b"no visible points\0",
        TpcStatus::DimensionMismatch => b"dimension mismatch\0",
        TpcStatus::NoFeasibleCandidate => b"no feasible subset candidate\0",
        TpcStatus::InvalidGroupCount => b"invalid group count\0",
        TpcStatus::Panic => b"internal panic\0",
    };
    s.as_ptr().cast()
}

/// Creates a keypoint set from `TPC_NUM_KEYPOINTS` interleaved points and as
/// many visibility flags (nonzero is visible).
///
/// # Safety
/// `xy` must point to `2 * TPC_NUM_KEYPOINTS` doubles, `visible` to
/// `TPC_NUM_KEYPOINTS` bytes, and `out_handle` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tpc_keypoints_new(
    xy: *const f64,
    visible: *const u8,
    out_handle: *mut *mut TpcKeypoints,
) -> TpcStatus {
    guard(|| {
        let out_handle = out(out_handle, "out")?;
        *out_handle = ptr::null_mut();
        let xy = slice(xy, 2 * NUM_KEYPOINTS, "xy")?;
        let visible = slice(visible, NUM_KEYPOINTS, "visible")?;
        let pts: [Point2; NUM_KEYPOINTS] =
            std::array::from_fn(|i| Point2::new(xy[2 * i], xy[2 * i + 1]));
        let vis: [bool; NUM_KEYPOINTS] = std::array::from_fn(|i| visible[i] != 0);
        let set = KeypointSet::new(pts, vis)?;
        *out_handle = Box::into_raw(Box::new(TpcKeypoints(set)));
        Ok(())
    })
}

/// # Safety
/// `handle` must come from [`tpc_keypoints_new`] and not be used afterwards.
/// Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn tpc_keypoints_free(handle: *mut TpcKeypoints) {
    if !handle.is_null() {
        drop(Box::from_raw(handle));
    }
}

/// Least-squares similarity mapping `n` reference points onto `n` target
/// points.
///
/// # Safety
/// `ref_xy` and `tgt_xy` must each hold `2 * n` doubles; output pointers must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn tpc_solve_procrustes(
    ref_xy: *const f64,
    tgt_xy: *const f64,
    n: usize,
    out_transform: *mut TpcTransform,
) -> TpcStatus {
    guard(|| {
        let out_transform = out(out_transform, "out")?;
        let r = points(slice(ref_xy, 2 * n, "ref_xy")?);
        let t = points(slice(tgt_xy, 2 * n, "tgt_xy")?);
        let pairs = PairedPointSets::from_points(r, t)?;
        *out_transform = to_c(&solve_procrustes(&pairs)?);
        Ok(())
    })
}

/// Applies `transform` to `n` points. `xy_out` may alias `xy_in`.
///
/// # Safety
/// `xy_in` and `xy_out` must each hold `2 * n` doubles.
#[no_mangle]
pub unsafe extern "C" fn tpc_apply_transform(
    transform: *const TpcTransform,
    xy_in: *const f64,
    n: usize,
    xy_out: *mut f64,
) -> TpcStatus {
    guard(|| {
        let t = from_c(deref(transform, "transform")?);
        let input = points(slice(xy_in, 2 * n, "xy_in")?);
        let mapped = apply_transform(&t, &input);
        let output = slice_mut(xy_out, 2 * n, "xy_out")?;
        for (dst, p) in output.chunks_exact_mut(2).zip(mapped) {
            dst[0] = p.x;
            dst[1] = p.y;
        }
        Ok(())
    })
}

/// # Safety
/// Both handles must be live; the output pointer must be writable.
#[no_mangle]
pub unsafe extern "C" fn tpc_classify_misalignment(
    reference: *const TpcKeypoints,
    target: *const TpcKeypoints,
    out_report: *mut TpcMisalignment,
) -> TpcStatus {
    guard(|| {
        let out_report = out(out_report, "out")?;
        let r = classify_misalignment(
            &deref(reference, "reference")?.0,
            &deref(target, "target")?.0,
        )?;
        *out_report = TpcMisalignment {
            theta: r.theta,
            box_iou: r.box_iou,
            rotation_misaligned: r.rotation_misaligned,
            scale_misaligned: r.scale_misaligned,
            misaligned: r.misaligned,
        };
        Ok(())
    })
}

/// IoU of two `width * height` masks.
///
/// # Safety
/// `a` and `b` must each hold `width * height` bytes; the output pointer must be writable.
#[no_mangle]
pub unsafe extern "C" fn tpc_mask_iou(
    a: *const u8,
    b: *const u8,
    width: u32,
    height: u32,
    out_iou: *mut f64,
) -> TpcStatus {
    guard(|| {
        let out_iou = out(out_iou, "out")?;
        let len = width as usize * height as usize;
        let a = mask_from(slice(a, len, "a")?, width, height)?;
        let b = mask_from(slice(b, len, "b")?, width, height)?;
        *out_iou = mask_iou(&a, &b)?;
        Ok(())
    })
}

/// Splits `frames` frames into `groups` contiguous groups. Writes `groups`
/// pairs of 1-based inclusive bounds into `out_bounds`.
///
/// # Safety
/// `out_bounds` must hold `2 * groups` elements.
#[no_mangle]
pub unsafe extern "C" fn tpc_group_partition(
    frames: usize,
    groups: usize,
    out_bounds: *mut usize,
) -> TpcStatus {
    guard(|| {
        let partition = group_partition(frames, groups)?;
        let dst = slice_mut(out_bounds, 2 * groups, "out_bounds")?;
        for (d, &(lo, hi)) in dst.chunks_exact_mut(2).zip(partition.bounds()) {
            d[0] = lo;
            d[1] = hi;
        }
        Ok(())
    })
}

/// Wraps a `frames x patches x dim` row-major feature array.
///
/// # Safety
/// `data` must hold `frames * patches * dim` doubles; the output pointer must be writable.
#[no_mangle]
pub unsafe extern "C" fn tpc_features_new(
    frames: usize,
    patches: usize,
    dim: usize,
    data: *const f64,
    out_handle: *mut *mut TpcFeatures,
) -> TpcStatus {
    guard(|| {
        let out_handle = out(out_handle, "out")?;
        *out_handle = ptr::null_mut();
        let len = frames
            .checked_mul(patches)
            .and_then(|v| v.checked_mul(dim))
            .ok_or_else(|| invalid("feature size overflows"))?;
        let data = slice(data, len, "data")?.to_vec();
        let features = FeatureSequence::new(frames, patches, dim, data)?;
        *out_handle = Box::into_raw(Box::new(TpcFeatures(features)));
        Ok(())
    })
}

/// # Safety
/// `handle` must come from [`tpc_features_new`] and not be used afterwards.
/// Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn tpc_features_free(handle: *mut TpcFeatures) {
    if !handle.is_null() {
        drop(Box::from_raw(handle));
    }
}

/// Runs `steps` propagation steps. Step outputs are written in execution
/// order (t = steps first) to `out_steps`, each the same size as the input.
/// When `out_picks` is non-null it receives `steps * groups` 1-based offsets.
///
/// # Safety
/// `features` must be live; `out_steps` must hold
/// `steps * frames * patches * dim` doubles; `out_picks`, if non-null,
/// `steps * groups` elements.
#[no_mangle]
pub unsafe extern "C" fn tpc_run_propagation(
    features: *const TpcFeatures,
    groups: usize,
    steps: usize,
    seed: u64,
    out_steps: *mut f64,
    out_picks: *mut usize,
) -> TpcStatus {
    guard(|| {
        let features = &deref(features, "features")?.0;
        let (outputs, schedule) = run_propagation(features, groups, steps, seed)?;
        let per = features.data().len();
        let dst = slice_mut(out_steps, steps * per, "out_steps")?;
        for (d, s) in dst.chunks_exact_mut(per.max(1)).zip(&outputs) {
            d.copy_from_slice(s.data());
        }
        if !out_picks.is_null() {
            let picks = slice_mut(out_picks, steps * groups, "out_picks")?;
            for (d, row) in picks.chunks_exact_mut(groups).zip(&schedule.picks) {
                d.copy_from_slice(row);
            }
        }
        Ok(())
    })
}

/// Calibrates one frame: picks the best group subset, warps the reference
/// onto a `tgt_width x tgt_height` canvas and writes the warped RGBA image
/// and silhouette. `out_subset` receives the subset bits (face 1, arms 2,
/// legs 4; torso always included).
///
/// # Safety
/// Handles must be live; `ref_rgba` must hold `4 * ref_width * ref_height`
/// bytes and `ref_mask` `ref_width * ref_height`; `tgt_mask` and `out_mask`
/// `tgt_width * tgt_height`; `out_rgba` `4 * tgt_width * tgt_height`.
/// Output pointers other than the image and mask buffers may be null.
#[no_mangle]
pub unsafe extern "C" fn tpc_calibrate_frame(
    ref_kps: *const TpcKeypoints,
    tgt_kps: *const TpcKeypoints,
    ref_rgba: *const u8,
    ref_mask: *const u8,
    ref_width: u32,
    ref_height: u32,
    tgt_mask: *const u8,
    tgt_width: u32,
    tgt_height: u32,
    out_rgba: *mut u8,
    out_mask: *mut u8,
    out_transform: *mut TpcTransform,
    out_score: *mut f64,
    out_subset: *mut u8,
) -> TpcStatus {
    guard(|| {
        let ref_len = ref_width as usize * ref_height as usize;
        let tgt_len = tgt_width as usize * tgt_height as usize;
        let image = RasterImage::new(
            ref_width,
            ref_height,
            4,
            slice(ref_rgba, 4 * ref_len, "ref_rgba")?.to_vec(),
        )?;
        let rmask = mask_from(slice(ref_mask, ref_len, "ref_mask")?, ref_width, ref_height)?;
        let tmask = mask_from(slice(tgt_mask, tgt_len, "tgt_mask")?, tgt_width, tgt_height)?;
        let mut frame = select_subset(
            &deref(ref_kps, "ref_kps")?.0,
            &deref(tgt_kps, "tgt_kps")?.0,
            &image,
            &rmask,
            &tmask,
        )?;
        frame.image.screen(&frame.mask)?;
        slice_mut(out_rgba, 4 * tgt_len, "out_rgba")?.copy_from_slice(frame.image.data());
        for (d, &b) in slice_mut(out_mask, tgt_len, "out_mask")?
            .iter_mut()
            .zip(frame.mask.bits())
        {
            *d = b as u8;
        }
        if let Some(t) = out_transform.as_mut() {
            *t = to_c(&frame.transform);
        }
        if let Some(s) = out_score.as_mut() {
            *s = frame.score;
        }
        if let Some(s) = out_subset.as_mut() {
            *s = frame.chosen_subset.groups.bits();
        }
        Ok(())
    })
}
