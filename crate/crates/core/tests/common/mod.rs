#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rand::{Rng, RngExt};
use tpc_core::calibration::{warp_mask, ShapeMask};
use tpc_core::shape::{
    pairs_for_slots, solve_procrustes, KeypointSet, Point2, ProcrustesTransform, NUM_KEYPOINTS,
};
use tpc_core::synth::{render_silhouette, upright_figure};
use tpc_core::TpcError;

pub fn fixture_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

/// Slot ranges: face, torso, arms, legs.
pub const GROUP_SLOTS: [std::ops::Range<usize>; 4] = [0..5, 5..9, 9..13, 13..17];

pub fn count_iou(a: &ShapeMask, b: &ShapeMask) -> f64 {
    let (mut inter, mut union) = (0usize, 0usize);
    for (&x, &y) in a.bits().iter().zip(b.bits()) {
        inter += (x && y) as usize;
        union += (x || y) as usize;
    }
    if union == 0 {
        0.0
    } else {
        inter as f64 / union as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleChoice {
    pub bits: u8,
    pub score: f64,
    pub slots: Vec<usize>,
    pub scores: BTreeMap<u8, f64>,
}

/// Exhaustive search over the eight torso-containing subsets. Bit 0 face,
/// bit 1 arms, bit 2 legs.
pub fn oracle_select(
    reference: &KeypointSet,
    target: &KeypointSet,
    ref_mask: &ShapeMask,
    tgt_mask: &ShapeMask,
) -> Option<OracleChoice> {
    let (w, h) = tgt_mask.dims();
    let mut scores = BTreeMap::new();
    let mut best: Option<(f64, usize, u8, Vec<usize>)> = None;
    for bits in 0u8..8 {
        let mut groups = vec![1usize];
        for (bit, g) in [(1u8, 0usize), (2, 2), (4, 3)] {
            if bits & bit != 0 {
                groups.push(g);
            }
        }
        let mut feasible = true;
        let mut slots = Vec::new();
        for &g in &groups {
            let common: Vec<usize> = GROUP_SLOTS[g]
                .clone()
                .filter(|&s| reference.is_visible(s) && target.is_visible(s))
                .collect();
            feasible &= !common.is_empty();
            slots.extend(common);
        }
        slots.sort_unstable();
        if !feasible || slots.len() < 3 {
            continue;
        }
        let pairs = pairs_for_slots(reference, target, &slots).unwrap();
        let t = match solve_procrustes(&pairs) {
            Ok(t) => t,
            Err(TpcError::DegenerateShape(_)) => continue,
            Err(e) => panic!("unexpected {e}"),
        };
        let score = count_iou(&warp_mask(ref_mask, &t, w, h), tgt_mask);
        scores.insert(bits, score);
        let key = (score, slots.len());
        let wins = match &best {
            None => true,
            Some((bs, bn, bb, _)) => {
                key.0 > *bs || (key.0 == *bs && (key.1 > *bn || (key.1 == *bn && bits < *bb)))
            }
        };
        if wins {
            best = Some((score, slots.len(), bits, slots));
        }
    }
    best.map(|(score, _, bits, slots)| OracleChoice {
        bits,
        score,
        slots,
        scores,
    })
}

/// Reference figure and a target that is a random similarity of it with one
/// group displaced. Returns the perturbed group index too.
pub fn perturbed_pair<R: Rng>(rng: &mut R, canvas: u32) -> (KeypointSet, KeypointSet, usize) {
    let c = canvas as f64 / 2.0;
    let reference = upright_figure(Point2::new(c, c), canvas as f64 * 0.6);
    let s = rng.random_range(0.6..1.2);
    let angle = rng.random_range(-0.8..0.8);
    let shift = Point2::new(rng.random_range(-8.0..8.0), rng.random_range(-8.0..8.0));
    let t = ProcrustesTransform::about_pivot(s, angle, Point2::new(c, c));
    let moved = reference
        .map_points(|p| {
            let q = t.apply(p);
            Point2::new(q.x + shift.x, q.y + shift.y)
        })
        .unwrap();
    let group = rng.random_range(0..4usize);
    let mut pts = *moved.points();
    let (dx, dy) = (rng.random_range(-15.0..15.0), rng.random_range(-15.0..15.0));
    for slot in GROUP_SLOTS[group].clone() {
        let j = (rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0));
        pts[slot] = Point2::new(pts[slot].x + dx + j.0, pts[slot].y + dy + j.1);
    }
    let mut visible = [true; NUM_KEYPOINTS];
    for v in visible.iter_mut() {
        *v = rng.random_bool(0.9);
    }
    (reference, KeypointSet::new(pts, visible).unwrap(), group)
}

pub fn silhouette(kps: &KeypointSet, canvas: u32) -> ShapeMask {
    render_silhouette(kps, canvas, canvas).unwrap()
}

/// Reads every file under `root` keyed by relative path.
pub fn read_tree(root: &Path) -> BTreeMap<PathBuf, Vec<u8>> {
    fn walk(root: &Path, dir: &Path, out: &mut BTreeMap<PathBuf, Vec<u8>>) {
        for entry in std::fs::read_dir(dir).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                walk(root, &path, out);
            } else {
                out.insert(
                    path.strip_prefix(root).unwrap().to_path_buf(),
                    std::fs::read(&path).unwrap(),
                );
            }
        }
    }
    let mut out = BTreeMap::new();
    walk(root, root, &mut out);
    out
}
