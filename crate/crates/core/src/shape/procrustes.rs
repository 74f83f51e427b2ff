//! Closed-form similarity Procrustes alignment in 2D.
//!
//! Points are row vectors multiplied on the right by the rotation, so a point
//! `p` maps to `s * p * r + t`. A rotation by `angle` is
//!
//! ```text
//! r = [  cos  sin ]
//!     [ -sin  cos ]
//! ```
//!
//! which turns the +x axis toward the +y axis: `(1, 0)` rotated by 90 degrees
//! is `(0, 1)`. In image coordinates (y down) a positive angle therefore
//! turns the picture clockwise on screen; all angles in this crate, including
//! the torso axis angle, share this convention.

use nalgebra::{Matrix2, Vector2};

use super::keypoints::{KeypointSet, Point2, NUM_KEYPOINTS};
use crate::error::{Result, TpcError};

/// Reference sets whose centered sum of squares falls below this are
/// treated as coincident.
pub const DEGENERACY_TOLERANCE: f64 = 1e-9;

pub const MIN_PAIRS: usize = 3;

/// Similarity transform `p -> s * p * r + t` with a proper rotation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProcrustesTransform {
    pub scale: f64,
    pub rotation: Matrix2<f64>,
    pub translation: Vector2<f64>,
}

impl ProcrustesTransform {
    pub fn identity() -> Self {
        Self::from_angle(1.0, 0.0, Vector2::zeros())
    }

    pub fn from_angle(scale: f64, angle: f64, translation: Vector2<f64>) -> Self {
        Self {
            scale,
            rotation: rotation_matrix(angle),
            translation,
        }
    }

    /// Rotation angle in (-pi, pi].
    pub fn angle(&self) -> f64 {
        let a = self.rotation[(0, 1)].atan2(self.rotation[(0, 0)]);
        if a == -std::f64::consts::PI {
            std::f64::consts::PI
        } else {
            a
        }
    }

    pub fn apply(&self, p: Point2) -> Point2 {
        let r = &self.rotation;
        Point2::new(
            self.scale * (p.x * r[(0, 0)] + p.y * r[(1, 0)]) + self.translation.x,
            self.scale * (p.x * r[(0, 1)] + p.y * r[(1, 1)]) + self.translation.y,
        )
    }

    /// The transform undoing `self`: `q -> (q - t) * r^T / s`.
    pub fn inverse(&self) -> Self {
        let rt = self.rotation.transpose();
        let inv_scale = 1.0 / self.scale;
        let t = -(self.translation.transpose() * rt).transpose() * inv_scale;
        Self {
            scale: inv_scale,
            rotation: rt,
            translation: t,
        }
    }

    /// Similarity that scales by `scale` and rotates by `angle` about `pivot`.
    pub fn about_pivot(scale: f64, angle: f64, pivot: Point2) -> Self {
        let base = Self::from_angle(scale, angle, Vector2::zeros());
        let moved = base.apply(pivot);
        Self {
            translation: Vector2::new(pivot.x - moved.x, pivot.y - moved.y),
            ..base
        }
    }

    pub fn is_valid(&self) -> bool {
        let r = &self.rotation;
        let orth = r.transpose() * r - Matrix2::identity();
        self.scale > 0.0
            && self.scale.is_finite()
            && orth.iter().all(|e| e.abs() <= 1e-9)
            && (r.determinant() - 1.0).abs() <= 1e-9
            && self.translation.iter().all(|v| v.is_finite())
    }
}

pub fn rotation_matrix(angle: f64) -> Matrix2<f64> {
    let (s, c) = angle.sin_cos();
    Matrix2::new(c, s, -s, c)
}

/// Corresponding reference and target points, ordered by canonical slot.
#[derive(Debug, Clone, PartialEq)]
pub struct PairedPointSets {
    reference: Vec<Point2>,
    target: Vec<Point2>,
    slot_ids: Vec<usize>,
}

impl PairedPointSets {
    pub fn new(reference: Vec<Point2>, target: Vec<Point2>, slot_ids: Vec<usize>) -> Result<Self> {
        if reference.len() != target.len() || reference.len() != slot_ids.len() {
            return Err(TpcError::DimensionMismatch(format!(
                "{} reference points, {} target points, {} slot ids",
                reference.len(),
                target.len(),
                slot_ids.len()
            )));
        }
        if reference.len() < MIN_PAIRS {
            return Err(TpcError::FewerThanThreePoints {
                found: reference.len(),
            });
        }
        if slot_ids.windows(2).any(|w| w[0] >= w[1]) {
            return Err(TpcError::InvalidInput(
                "slot ids must be strictly increasing".into(),
            ));
        }
        if reference.iter().chain(&target).any(|p| !p.is_finite()) {
            return Err(TpcError::InvalidInput(
                "paired points must be finite".into(),
            ));
        }
        Ok(Self {
            reference,
            target,
            slot_ids,
        })
    }

    /// Pairs without slot bookkeeping; slots are numbered `0..n`.
    pub fn from_points(reference: Vec<Point2>, target: Vec<Point2>) -> Result<Self> {
        let ids = (0..reference.len()).collect();
        Self::new(reference, target, ids)
    }

    pub fn len(&self) -> usize {
        self.reference.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reference.is_empty()
    }

    pub fn reference(&self) -> &[Point2] {
        &self.reference
    }

    pub fn target(&self) -> &[Point2] {
        &self.target
    }

    pub fn slot_ids(&self) -> &[usize] {
        &self.slot_ids
    }
}

/// Slots visible in both sets, in slot order.
pub fn common_slots(reference: &KeypointSet, target: &KeypointSet) -> Vec<usize> {
    (0..NUM_KEYPOINTS)
        .filter(|&i| reference.is_visible(i) && target.is_visible(i))
        .collect()
}

/// Pairs up the points visible in both keypoint sets.
pub fn common_visible(reference: &KeypointSet, target: &KeypointSet) -> Result<PairedPointSets> {
    pairs_for_slots(reference, target, &common_slots(reference, target))
}

/// Pairs up the given slots. The caller is responsible for their visibility.
pub fn pairs_for_slots(
    reference: &KeypointSet,
    target: &KeypointSet,
    slots: &[usize],
) -> Result<PairedPointSets> {
    if slots.len() < MIN_PAIRS {
        return Err(TpcError::FewerThanThreePoints { found: slots.len() });
    }
    PairedPointSets::new(
        slots.iter().map(|&i| reference.point(i)).collect(),
        slots.iter().map(|&i| target.point(i)).collect(),
        slots.to_vec(),
    )
}

fn centroid(points: &[Point2]) -> Vector2<f64> {
    let n = points.len() as f64;
    let (sx, sy) = points
        .iter()
        .fold((0.0, 0.0), |(sx, sy), p| (sx + p.x, sy + p.y));
    Vector2::new(sx / n, sy / n)
}

/// Least-squares similarity transform taking the reference points onto the
/// target points.
///
/// Both sets are centered, the rotation comes from the SVD of the 2x2
/// cross-covariance (with the reflection case folded back onto a proper
/// rotation), and scale and translation follow in closed form.
pub fn solve_procrustes(pairs: &PairedPointSets) -> Result<ProcrustesTransform> {
    let mx = centroid(pairs.reference());
    let my = centroid(pairs.target());

    let mut cov = Matrix2::zeros();
    let mut ss_ref = 0.0;
    for (x, y) in pairs.reference().iter().zip(pairs.target()) {
        let xc = Vector2::new(x.x - mx.x, x.y - mx.y);
        let yc = Vector2::new(y.x - my.x, y.y - my.y);
        cov += xc * yc.transpose();
        ss_ref += xc.norm_squared();
    }
    if ss_ref < DEGENERACY_TOLERANCE {
        return Err(TpcError::DegenerateShape("reference points coincide"));
    }

    let svd = cov.svd(true, true);
    let (u, v_t) = match (svd.u, svd.v_t) {
        (Some(u), Some(v_t)) => (u, v_t),
        _ => return Err(TpcError::DegenerateShape("cross-covariance SVD failed")),
    };
    let mut sigma = svd.singular_values;
    let mut u = u;
    if (u * v_t).determinant() < 0.0 {
        let weakest = if sigma[0] <= sigma[1] { 0 } else { 1 };
        u.column_mut(weakest).neg_mut();
        sigma[weakest] = -sigma[weakest];
    }
    let r = u * v_t;
    // Snap to the exact cos/sin form so the rotation invariants hold to rounding.
    let rotation = rotation_matrix(r[(0, 1)].atan2(r[(0, 0)]));

    let scale = (sigma[0] + sigma[1]) / ss_ref;
    if scale.is_nan() || scale <= DEGENERACY_TOLERANCE {
        return Err(TpcError::DegenerateShape("target points coincide"));
    }
    let translation = my - (mx.transpose() * rotation).transpose() * scale;
    Ok(ProcrustesTransform {
        scale,
        rotation,
        translation,
    })
}

pub fn apply_transform(transform: &ProcrustesTransform, points: &[Point2]) -> Vec<Point2> {
    points.iter().map(|&p| transform.apply(p)).collect()
}

/// Frobenius norm of `transform(X) - Y`.
pub fn residual(transform: &ProcrustesTransform, pairs: &PairedPointSets) -> f64 {
    pairs
        .reference()
        .iter()
        .zip(pairs.target())
        .map(|(&x, y)| {
            let p = transform.apply(x);
            (p.x - y.x).powi(2) + (p.y - y.y).powi(2)
        })
        .sum::<f64>()
        .sqrt()
}
