//! Synthetic stick-figure humans for fixtures, sweeps and tests.
//!
//! Silhouettes are drawn from the keypoints alone with limb thickness
//! proportional to torso length, so a similarity transform of the keypoints
//! yields (up to rasterization) the same transform of the silhouette.

use crate::calibration::{convex_hull, fill_convex, RasterImage, ShapeMask};
use crate::error::Result;
use crate::shape::{KeypointSet, Point2, LEFT_HIP, NOSE, NUM_KEYPOINTS, RIGHT_HIP};

const BONES: [(usize, usize); 14] = [
    (0, 1),
    (0, 2),
    (1, 3),
    (2, 4),
    (5, 9),
    (9, 11),
    (6, 10),
    (10, 12),
    (7, 13),
    (13, 15),
    (8, 14),
    (14, 16),
    (5, 6),
    (7, 8),
];

/// Upright figure whose pelvis sits at `pelvis` and whose nose-to-ankle
/// height is `height` pixels.
pub fn upright_figure(pelvis: Point2, height: f64) -> KeypointSet {
    // unit offsets relative to the pelvis, y down, nose at -0.45, ankles at +0.55
    const LAYOUT: [(f64, f64); NUM_KEYPOINTS] = [
        (0.0, -0.45),
        (-0.03, -0.48),
        (0.03, -0.48),
        (-0.06, -0.46),
        (0.06, -0.46),
        (-0.12, -0.32),
        (0.12, -0.32),
        (-0.08, 0.0),
        (0.08, 0.0),
        (-0.17, -0.15),
        (0.17, -0.15),
        (-0.20, 0.01),
        (0.20, 0.01),
        (-0.09, 0.28),
        (0.09, 0.28),
        (-0.10, 0.55),
        (0.10, 0.55),
    ];
    let pts = LAYOUT.map(|(dx, dy)| Point2::new(pelvis.x + dx * height, pelvis.y + dy * height));
    KeypointSet::fully_visible(pts).expect("layout is finite")
}

fn torso_length(kps: &KeypointSet) -> f64 {
    let shoulders = kps.point(5).midpoint(kps.point(6));
    let hips = kps.point(LEFT_HIP).midpoint(kps.point(RIGHT_HIP));
    ((shoulders.x - hips.x).powi(2) + (shoulders.y - hips.y).powi(2)).sqrt()
}

fn segment_distance(p: Point2, a: Point2, b: Point2) -> f64 {
    let (dx, dy) = (b.x - a.x, b.y - a.y);
    let len2 = dx * dx + dy * dy;
    let t = if len2 == 0.0 {
        0.0
    } else {
        (((p.x - a.x) * dx + (p.y - a.y) * dy) / len2).clamp(0.0, 1.0)
    };
    ((p.x - a.x - t * dx).powi(2) + (p.y - a.y - t * dy).powi(2)).sqrt()
}

/// Which body part covers a pixel: 0 none, 1 head, 2 torso, 3 arms, 4 legs.
fn part_map(kps: &KeypointSet, width: u32, height: u32) -> Result<Vec<u8>> {
    let scale = torso_length(kps).max(1.0);
    let limb = 0.16 * scale;
    let head = 0.30 * scale;
    let mut parts = vec![0u8; width as usize * height as usize];

    let torso_slots = [5, 6, 8, 7];
    if torso_slots.iter().all(|&s| kps.is_visible(s)) {
        let mut mask = ShapeMask::empty(width, height)?;
        let quad: Vec<Point2> = torso_slots.iter().map(|&s| kps.point(s)).collect();
        fill_convex(&mut mask, &convex_hull(&quad));
        for (cell, &on) in parts.iter_mut().zip(mask.bits()) {
            if on {
                *cell = 2;
            }
        }
    }

    let visible_bones: Vec<(Point2, Point2, u8)> = BONES
        .iter()
        .filter(|(a, b)| kps.is_visible(*a) && kps.is_visible(*b))
        .map(|&(a, b)| {
            let part = match b {
                0..=4 => 1,
                5..=8 => 2,
                9..=12 => 3,
                _ => 4,
            };
            (kps.point(a), kps.point(b), part)
        })
        .collect();
    let neck = match (kps.is_visible(NOSE), kps.is_visible(5) && kps.is_visible(6)) {
        (true, true) => Some((kps.point(NOSE), kps.point(5).midpoint(kps.point(6)))),
        _ => None,
    };

    for v in 0..height {
        for u in 0..width {
            let c = Point2::new(u as f64 + 0.5, v as f64 + 0.5);
            let cell = &mut parts[v as usize * width as usize + u as usize];
            if kps.is_visible(NOSE) && segment_distance(c, kps.point(NOSE), kps.point(NOSE)) <= head
            {
                *cell = 1;
                continue;
            }
            if *cell != 0 {
                continue;
            }
            if let Some((a, b)) = neck {
                if segment_distance(c, a, b) <= limb {
                    *cell = 2;
                    continue;
                }
            }
            if let Some(&(_, _, part)) = visible_bones
                .iter()
                .find(|(a, b, _)| segment_distance(c, *a, *b) <= limb)
            {
                *cell = part;
            }
        }
    }
    Ok(parts)
}

/// Binary silhouette of the stick figure.
pub fn render_silhouette(kps: &KeypointSet, width: u32, height: u32) -> Result<ShapeMask> {
    let parts = part_map(kps, width, height)?;
    ShapeMask::new(width, height, parts.into_iter().map(|p| p != 0).collect())
}

/// RGB rendering of the figure over a gradient background, plus its
/// silhouette.
pub fn render_figure(
    kps: &KeypointSet,
    width: u32,
    height: u32,
) -> Result<(RasterImage, ShapeMask)> {
    let parts = part_map(kps, width, height)?;
    let mut data = Vec::with_capacity(parts.len() * 3);
    for (i, &part) in parts.iter().enumerate() {
        let (u, v) = ((i % width as usize) as u32, (i / width as usize) as u32);
        let px = match part {
            1 => [236, 188, 150],
            2 => [40 + (v % 16 * 4) as u8, 90, 200],
            3 => [220, 60, 60],
            4 => [50, 160, 70],
            _ => [
                (u * 255 / width.max(1)) as u8,
                (v * 255 / height.max(1)) as u8,
                128,
            ],
        };
        data.extend_from_slice(&px);
    }
    let image = RasterImage::new(width, height, 3, data)?;
    let mask = ShapeMask::new(width, height, parts.into_iter().map(|p| p != 0).collect())?;
    Ok((image, mask))
}
