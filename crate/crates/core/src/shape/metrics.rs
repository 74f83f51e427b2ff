use std::f64::consts::PI;

use super::keypoints::{KeypointSet, Point2, NOSE};
use crate::error::{Result, TpcError};

/// Wraps an angle into (-pi, pi].
pub fn wrap_angle(angle: f64) -> f64 {
    let mut a = angle.rem_euclid(2.0 * PI);
    if a > PI {
        a -= 2.0 * PI;
    }
    a
}

fn torso_axis(kps: &KeypointSet) -> Result<(f64, f64)> {
    let pelvis = kps.pelvis().ok_or(TpcError::MissingAxisPoints)?;
    if !kps.is_visible(NOSE) {
        return Err(TpcError::MissingAxisPoints);
    }
    let nose = kps.point(NOSE);
    let axis = (nose.x - pelvis.x, nose.y - pelvis.y);
    if axis.0 == 0.0 && axis.1 == 0.0 {
        return Err(TpcError::DegenerateShape("torso axis has zero length"));
    }
    Ok(axis)
}

/// Signed angle from the reference pelvis-to-nose axis to the target one,
/// in (-pi, pi]. The pelvis is the midpoint of the two hips.
pub fn torso_axis_angle(reference: &KeypointSet, target: &KeypointSet) -> Result<f64> {
    let (rx, ry) = torso_axis(reference)?;
    let (tx, ty) = torso_axis(target)?;
    Ok(wrap_angle(ty.atan2(tx) - ry.atan2(rx)))
}

fn box_area(lo: Point2, hi: Point2) -> f64 {
    (hi.x - lo.x).max(0.0) * (hi.y - lo.y).max(0.0)
}

/// IoU of the axis-aligned bounding boxes of the visible points.
pub fn bbox_iou(reference: &KeypointSet, target: &KeypointSet) -> Result<f64> {
    let (alo, ahi) = reference.bounding_box().ok_or(TpcError::EmptyShape)?;
    let (blo, bhi) = target.bounding_box().ok_or(TpcError::EmptyShape)?;
    if (alo, ahi) == (blo, bhi) {
        return Ok(1.0);
    }
    let ilo = Point2::new(alo.x.max(blo.x), alo.y.max(blo.y));
    let ihi = Point2::new(ahi.x.min(bhi.x), ahi.y.min(bhi.y));
    let inter = box_area(ilo, ihi);
    let union = box_area(alo, ahi) + box_area(blo, bhi) - inter;
    if union <= 0.0 {
        return Ok(0.0);
    }
    Ok((inter / union).clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use std::f64::consts::FRAC_PI_2;

    use super::*;
    use crate::shape::keypoints::{LEFT_HIP, NUM_KEYPOINTS, RIGHT_HIP};
    use crate::shape::procrustes::ProcrustesTransform;

    fn upright() -> KeypointSet {
        let mut pts = [Point2::new(50.0, 50.0); NUM_KEYPOINTS];
        pts[NOSE] = Point2::new(50.0, 10.0);
        pts[LEFT_HIP] = Point2::new(45.0, 60.0);
        pts[RIGHT_HIP] = Point2::new(55.0, 60.0);
        pts[15] = Point2::new(40.0, 100.0);
        pts[16] = Point2::new(60.0, 100.0);
        KeypointSet::fully_visible(pts).unwrap()
    }

    fn about_pelvis(kps: &KeypointSet, angle: f64) -> KeypointSet {
        let t = ProcrustesTransform::about_pivot(1.0, angle, kps.pelvis().unwrap());
        kps.map_points(|p| t.apply(p)).unwrap()
    }

    #[test]
    fn identical_sets_have_zero_angle() {
        assert_eq!(torso_axis_angle(&upright(), &upright()).unwrap(), 0.0);
    }

    #[test]
    fn quarter_turn_is_half_pi() {
        let a = torso_axis_angle(&upright(), &about_pelvis(&upright(), FRAC_PI_2)).unwrap();
        assert!((a - FRAC_PI_2).abs() < 1e-12);
    }

    #[test]
    fn point_reflection_is_pi() {
        let kps = upright();
        let c = kps.pelvis().unwrap();
        let flipped = kps
            .map_points(|p| Point2::new(2.0 * c.x - p.x, 2.0 * c.y - p.y))
            .unwrap();
        let a = torso_axis_angle(&kps, &flipped).unwrap();
        assert!((a - PI).abs() < 1e-12);
    }

    #[test]
    fn antisymmetric() {
        let b = about_pelvis(&upright(), 0.7);
        let ab = torso_axis_angle(&upright(), &b).unwrap();
        let ba = torso_axis_angle(&b, &upright()).unwrap();
        assert!((ab + ba).abs() < 1e-12);
    }

    #[test]
    fn missing_axis_points() {
        let hidden = upright().with_hidden([NOSE]);
        assert!(matches!(
            torso_axis_angle(&upright(), &hidden),
            Err(TpcError::MissingAxisPoints)
        ));
        let hidden = upright().with_hidden([RIGHT_HIP]);
        assert!(matches!(
            torso_axis_angle(&hidden, &upright()),
            Err(TpcError::MissingAxisPoints)
        ));
    }

    fn box_set(lo: (f64, f64), hi: (f64, f64)) -> KeypointSet {
        let mut pts = [Point2::new(lo.0, lo.1); NUM_KEYPOINTS];
        pts[1] = Point2::new(hi.0, hi.1);
        KeypointSet::fully_visible(pts).unwrap()
    }

    #[test]
    fn bbox_iou_examples() {
        let a = box_set((0.0, 0.0), (2.0, 2.0));
        assert_eq!(bbox_iou(&a, &a).unwrap(), 1.0);
        let far = box_set((5.0, 5.0), (6.0, 6.0));
        assert_eq!(bbox_iou(&a, &far).unwrap(), 0.0);
        let b = box_set((1.0, 1.0), (3.0, 3.0));
        assert!((bbox_iou(&a, &b).unwrap() - 1.0 / 7.0).abs() < 1e-15);
        assert_eq!(bbox_iou(&a, &b).unwrap(), bbox_iou(&b, &a).unwrap());
    }

    #[test]
    fn bbox_iou_needs_visible_points() {
        let a = box_set((0.0, 0.0), (2.0, 2.0));
        let empty = a.with_hidden(0..NUM_KEYPOINTS);
        assert!(matches!(bbox_iou(&a, &empty), Err(TpcError::EmptyShape)));
    }

    #[test]
    fn wrap_range() {
        assert_eq!(wrap_angle(-PI), PI);
        assert!((wrap_angle(3.0 * PI) - PI).abs() < 1e-12);
        assert!((wrap_angle(-0.5) + 0.5).abs() < 1e-15);
    }
}
