//! Compositional misalignment checks and synthetic sensitivity sweeps.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::calibration::{mask_iou, select_subset, warp_mask, RasterImage, ShapeMask};
use crate::error::{Result, TpcError};
use crate::shape::{bbox_iou, torso_axis_angle, KeypointSet, Point2, ProcrustesTransform};

/// A relative torso angle strictly above this counts as rotated.
pub const ROTATION_THRESHOLD: f64 = PI / 6.0;
/// A bounding-box IoU strictly below this counts as rescaled.
pub const SCALE_IOU_THRESHOLD: f64 = 0.7;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MisalignmentReport {
    pub theta: f64,
    pub abs_theta: f64,
    pub box_iou: f64,
    pub rotation_misaligned: bool,
    pub scale_misaligned: bool,
    pub misaligned: bool,
}

impl MisalignmentReport {
    pub fn from_metrics(theta: f64, box_iou: f64) -> Self {
        let abs_theta = theta.abs();
        let rotation_misaligned = abs_theta > ROTATION_THRESHOLD;
        let scale_misaligned = box_iou < SCALE_IOU_THRESHOLD;
        Self {
            theta,
            abs_theta,
            box_iou,
            rotation_misaligned,
            scale_misaligned,
            misaligned: rotation_misaligned || scale_misaligned,
        }
    }
}

pub fn classify_misalignment(
    reference: &KeypointSet,
    target: &KeypointSet,
) -> Result<MisalignmentReport> {
    let theta = torso_axis_angle(reference, target)?;
    let iou = bbox_iou(reference, target)?;
    Ok(MisalignmentReport::from_metrics(theta, iou))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    Scale,
    Rotation,
}

impl fmt::Display for SweepAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SweepAxis::Scale => "scale",
            SweepAxis::Rotation => "rotation",
        })
    }
}

impl FromStr for SweepAxis {
    type Err = TpcError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "scale" => Ok(SweepAxis::Scale),
            "rotation" => Ok(SweepAxis::Rotation),
            other => Err(TpcError::InvalidConfig(format!(
                "sweep axis must be `scale` or `rotation`, got `{other}`"
            ))),
        }
    }
}

/// One synthetic target: silhouette IoU with the reference before
/// calibration and after it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    pub axis: SweepAxis,
    pub value: f64,
    pub pre_score: f64,
    pub post_score: f64,
}

fn bbox_center(kps: &KeypointSet) -> Result<Point2> {
    let (lo, hi) = kps.bounding_box().ok_or(TpcError::EmptyShape)?;
    Ok(lo.midpoint(hi))
}

/// The similarity that produces the synthetic target for one sweep value:
/// a scale or a rotation about the center of the keypoint bounding box.
pub fn sweep_transform(
    kps: &KeypointSet,
    axis: SweepAxis,
    value: f64,
) -> Result<ProcrustesTransform> {
    let pivot = bbox_center(kps)?;
    Ok(match axis {
        SweepAxis::Scale => ProcrustesTransform::about_pivot(value, 0.0, pivot),
        SweepAxis::Rotation => ProcrustesTransform::about_pivot(1.0, value, pivot),
    })
}

/// Scales or rotates the reference into synthetic targets and measures how
/// well calibration restores silhouette overlap.
///
/// Alignment IoU stands in for generated-video fidelity. Points are
/// evaluated in parallel and returned in step order.
pub fn run_sweep(
    ref_img: &RasterImage,
    ref_kps: &KeypointSet,
    ref_mask: &ShapeMask,
    axis: SweepAxis,
    steps: &[f64],
) -> Result<Vec<SweepPoint>> {
    if steps.is_empty() {
        return Err(TpcError::InvalidInput(
            "sweep needs at least one step".into(),
        ));
    }
    for &v in steps {
        let ok = match axis {
            SweepAxis::Scale => v > 0.0 && v.is_finite(),
            SweepAxis::Rotation => (-PI..=PI).contains(&v),
        };
        if !ok {
            return Err(TpcError::InvalidInput(format!(
                "{axis} step {v} out of range"
            )));
        }
    }
    let (w, h) = ref_mask.dims();
    let results: Vec<Result<SweepPoint>> = steps
        .par_iter()
        .enumerate()
        .map(|(i, &value)| {
            let transform = sweep_transform(ref_kps, axis, value)?;
            let tgt_kps = ref_kps.map_points(|p| transform.apply(p))?;
            let tgt_mask = warp_mask(ref_mask, &transform, w, h);
            let pre_score = mask_iou(ref_mask, &tgt_mask)?;
            let frame = select_subset(ref_kps, &tgt_kps, ref_img, ref_mask, &tgt_mask)
                .map_err(|e| e.in_frame(i + 1))?;
            Ok(SweepPoint {
                axis,
                value,
                pre_score,
                post_score: frame.score,
            })
        })
        .collect();
    results.into_iter().collect()
}
