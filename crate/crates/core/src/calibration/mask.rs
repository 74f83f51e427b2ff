use super::raster::ShapeMask;
use crate::error::{Result, TpcError};
use crate::shape::{KeypointSet, Point2};

/// Pixel-wise intersection over union; 0 when both masks are empty.
pub fn mask_iou(a: &ShapeMask, b: &ShapeMask) -> Result<f64> {
    if a.dims() != b.dims() {
        return Err(TpcError::DimensionMismatch(format!(
            "masks {:?} and {:?}",
            a.dims(),
            b.dims()
        )));
    }
    let (mut inter, mut union) = (0usize, 0usize);
    for (&x, &y) in a.bits().iter().zip(b.bits()) {
        inter += (x && y) as usize;
        union += (x || y) as usize;
    }
    if union == 0 {
        return Ok(0.0);
    }
    Ok(inter as f64 / union as f64)
}

fn cross(o: Point2, a: Point2, b: Point2) -> f64 {
    (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x)
}

/// Counter-clockwise convex hull (monotone chain), collinear points dropped.
pub(crate) fn convex_hull(points: &[Point2]) -> Vec<Point2> {
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let mut hull: Vec<Point2> = Vec::with_capacity(2 * pts.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &Point2>> = if pass == 0 {
            Box::new(pts.iter())
        } else {
            Box::new(pts.iter().rev())
        };
        for &p in iter {
            while hull.len() >= start + 2
                && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0
            {
                hull.pop();
            }
            hull.push(p);
        }
        hull.pop();
    }
    hull
}

fn polygon_area(hull: &[Point2]) -> f64 {
    let n = hull.len();
    (0..n)
        .map(|i| {
            let (a, b) = (hull[i], hull[(i + 1) % n]);
            a.x * b.y - b.x * a.y
        })
        .sum::<f64>()
        .abs()
        * 0.5
}

/// Fills `mask` with the convex polygon `hull` (counter-clockwise), testing
/// pixel centers. Returns false when the polygon has no area.
pub(crate) fn fill_convex(mask: &mut ShapeMask, hull: &[Point2]) -> bool {
    if hull.len() < 3 || polygon_area(hull) < 1e-9 {
        return false;
    }
    let (w, h) = mask.dims();
    let (lo_x, hi_x) = hull
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
            (lo.min(p.x), hi.max(p.x))
        });
    let (lo_y, hi_y) = hull
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
            (lo.min(p.y), hi.max(p.y))
        });
    let x_range = pixel_span(lo_x, hi_x, w);
    let y_range = pixel_span(lo_y, hi_y, h);
    for v in y_range {
        for u in x_range.clone() {
            let c = Point2::new(u as f64 + 0.5, v as f64 + 0.5);
            let n = hull.len();
            if (0..n).all(|i| cross(hull[i], hull[(i + 1) % n], c) >= -1e-9) {
                mask.set(u, v, true);
            }
        }
    }
    true
}

fn pixel_span(lo: f64, hi: f64, limit: u32) -> std::ops::Range<u32> {
    let start = (lo - 0.5).ceil().max(0.0);
    let end = ((hi - 0.5).floor() + 1.0).min(limit as f64);
    if end <= start {
        return 0..0;
    }
    start as u32..end as u32
}

/// Rasterizes the segment `a`-`b` one pixel wide.
pub(crate) fn draw_line(mask: &mut ShapeMask, a: Point2, b: Point2) {
    let (w, h) = mask.dims();
    let len = ((b.x - a.x).powi(2) + (b.y - a.y).powi(2)).sqrt();
    let steps = (len * 2.0).ceil().max(1.0) as usize;
    for i in 0..=steps {
        let f = i as f64 / steps as f64;
        let x = (a.x + (b.x - a.x) * f).floor();
        let y = (a.y + (b.y - a.y) * f).floor();
        if x >= 0.0 && y >= 0.0 && x < w as f64 && y < h as f64 {
            mask.set(x as u32, y as u32, true);
        }
    }
}

/// Filled convex hull of the visible keypoints, used as a stand-in
/// silhouette when no mask file is available.
///
/// Collinear points give a one-pixel line between the extreme points instead
/// of an error.
pub fn keypoint_hull_mask(kps: &KeypointSet, width: u32, height: u32) -> Result<ShapeMask> {
    let points: Vec<Point2> = kps.visible_points().collect();
    if points.len() < 3 {
        return Err(TpcError::FewerThanThreePoints {
            found: points.len(),
        });
    }
    let mut mask = ShapeMask::empty(width, height)?;
    let hull = convex_hull(&points);
    if !fill_convex(&mut mask, &hull) {
        let mut sorted = points;
        sorted.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
        draw_line(&mut mask, sorted[0], sorted[sorted.len() - 1]);
    }
    Ok(mask)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shape::NUM_KEYPOINTS;

    #[test]
    fn iou_examples() {
        let full = ShapeMask::new(10, 10, vec![true; 100]).unwrap();
        assert_eq!(mask_iou(&full, &full).unwrap(), 1.0);
        let left = ShapeMask::from_fn(10, 10, |x, _| x < 5).unwrap();
        let right = ShapeMask::from_fn(10, 10, |x, _| x >= 5).unwrap();
        assert_eq!(mask_iou(&left, &right).unwrap(), 0.0);
        assert_eq!(mask_iou(&full, &left).unwrap(), 0.5);
        let empty = ShapeMask::empty(10, 10).unwrap();
        assert_eq!(mask_iou(&empty, &empty).unwrap(), 0.0);
    }

    #[test]
    fn iou_dimension_mismatch() {
        let a = ShapeMask::empty(10, 10).unwrap();
        let b = ShapeMask::empty(10, 9).unwrap();
        assert!(matches!(
            mask_iou(&a, &b),
            Err(TpcError::DimensionMismatch(_))
        ));
    }

    fn set_from(points: &[(f64, f64)]) -> KeypointSet {
        let mut pts = [Point2::default(); NUM_KEYPOINTS];
        let mut vis = [false; NUM_KEYPOINTS];
        for (i, &(x, y)) in points.iter().enumerate() {
            pts[i] = Point2::new(x, y);
            vis[i] = true;
        }
        KeypointSet::new(pts, vis).unwrap()
    }

    #[test]
    fn right_triangle_matches_point_in_triangle_oracle() {
        let (a, b, c) = ((10.0, 10.0), (20.0, 10.0), (10.0, 20.0));
        let mask = keypoint_hull_mask(&set_from(&[a, b, c]), 32, 32).unwrap();
        // barycentric sign test on each pixel center
        let sign = |p: (f64, f64), q: (f64, f64), r: (f64, f64)| {
            (p.0 - r.0) * (q.1 - r.1) - (q.0 - r.0) * (p.1 - r.1)
        };
        let oracle = ShapeMask::from_fn(32, 32, |u, v| {
            let p = (u as f64 + 0.5, v as f64 + 0.5);
            let (d1, d2, d3) = (sign(p, a, b), sign(p, b, c), sign(p, c, a));
            let neg = d1 < 0.0 || d2 < 0.0 || d3 < 0.0;
            let pos = d1 > 0.0 || d2 > 0.0 || d3 > 0.0;
            !(neg && pos)
        })
        .unwrap();
        assert_eq!(mask, oracle);
        let perimeter = 20.0 + 200f64.sqrt();
        assert!((mask.area() as f64 - 50.0).abs() <= 0.5 * perimeter);
    }

    #[test]
    fn collinear_points_give_a_line() {
        let pts: Vec<(f64, f64)> = (0..NUM_KEYPOINTS).map(|i| (2.0 + i as f64, 5.5)).collect();
        let mask = keypoint_hull_mask(&set_from(&pts), 32, 16).unwrap();
        assert_eq!(mask.area(), 17);
        assert!((2..19).all(|x| mask.get(x, 5)));
    }

    #[test]
    fn too_few_points() {
        assert!(matches!(
            keypoint_hull_mask(&set_from(&[]), 8, 8),
            Err(TpcError::FewerThanThreePoints { found: 0 })
        ));
    }

    #[test]
    fn hull_is_clipped_to_canvas() {
        let mask = keypoint_hull_mask(
            &set_from(&[(-10.0, -10.0), (50.0, -10.0), (-10.0, 50.0)]),
            8,
            8,
        )
        .unwrap();
        assert_eq!(mask.area(), 64);
    }
}
