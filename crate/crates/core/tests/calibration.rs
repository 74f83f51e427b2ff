mod common;

use proptest::prelude::*;
use tpc_core::calibration::{
    calibrate_sequence, select_subset, warp_image, GroupSelection, PoseFrame, RasterImage,
};
use tpc_core::shape::{KeypointSet, Point2, ProcrustesTransform};
use tpc_core::synth::{render_figure, upright_figure};
use tpc_core::TpcError;

use common::{oracle_select, silhouette};

const CANVAS: u32 = 200;

fn reference() -> KeypointSet {
    upright_figure(Point2::new(60.0, 60.0), 70.0)
}

fn scaled(kps: &KeypointSet, s: f64) -> KeypointSet {
    kps.map_points(|p| Point2::new(p.x * s, p.y * s)).unwrap()
}

/// Elbows and wrists swung 90 degrees about their shoulders, out to the side.
fn arms_raised(kps: &KeypointSet) -> KeypointSet {
    let mut pts = *kps.points();
    for (shoulder, chain, side) in [(5, [9, 11], 1.0), (6, [10, 12], -1.0)] {
        let s = pts[shoulder];
        for j in chain {
            let (dx, dy) = (pts[j].x - s.x, pts[j].y - s.y);
            pts[j] = Point2::new(s.x - side * dy, s.y + side * dx);
        }
    }
    KeypointSet::new(pts, *kps.visibility()).unwrap()
}

#[test]
fn raised_arms_pick_the_arm_free_subset() {
    let r = reference();
    let t = arms_raised(&scaled(&r, 2.0));
    let (img, ref_mask) = render_figure(&r, CANVAS, CANVAS).unwrap();
    let tgt_mask = silhouette(&t, CANVAS);

    let oracle = oracle_select(&r, &t, &ref_mask, &tgt_mask).unwrap();
    let face_torso_legs = 1 | 4;
    let best_arm_score = oracle
        .scores
        .iter()
        .filter(|(bits, _)| *bits & 2 != 0)
        .map(|(_, s)| *s)
        .fold(0.0, f64::max);
    assert!(oracle.scores[&face_torso_legs] > best_arm_score);
    assert_eq!(oracle.bits, face_torso_legs);

    let frame = select_subset(&r, &t, &img, &ref_mask, &tgt_mask).unwrap();
    assert_eq!(frame.chosen_subset.groups.bits(), oracle.bits);
    assert_eq!(frame.score, oracle.score);
    assert!((frame.transform.scale - 2.0).abs() < 1e-9);
}

#[test]
fn identical_poses_choose_the_full_set() {
    let r = reference();
    let (img, mask) = render_figure(&r, CANVAS, CANVAS).unwrap();
    let frame = select_subset(&r, &r, &img, &mask, &mask).unwrap();
    assert_eq!(frame.candidate_scores.len(), 8);
    assert!(frame.candidate_scores.values().all(|&s| s == 1.0));
    assert_eq!(frame.chosen_subset.groups, GroupSelection::full());
}

#[test]
fn torso_only_target_forces_torso() {
    let r = reference();
    let t = r.with_hidden((0..5).chain(9..17));
    let (img, mask) = render_figure(&r, CANVAS, CANVAS).unwrap();
    let frame = select_subset(&r, &t, &img, &mask, &silhouette(&t, CANVAS)).unwrap();
    assert_eq!(frame.chosen_subset.groups, GroupSelection::torso_only());
    assert_eq!(frame.chosen_subset.slots, vec![5, 6, 7, 8]);
}

#[test]
fn single_identical_frame_scores_one() {
    let r = reference();
    let (img, mask) = render_figure(&r, CANVAS, CANVAS).unwrap();
    let frames = calibrate_sequence(
        &img,
        &r,
        &mask,
        &[PoseFrame {
            keypoints: r.clone(),
            mask: mask.clone(),
        }],
    )
    .unwrap();
    assert_eq!(frames.len(), 1);
    assert_eq!(frames[0].frame_index, 1);
    assert_eq!(frames[0].score, 1.0);
}

#[test]
fn missing_torso_names_the_frame() {
    let r = reference();
    let (img, mask) = render_figure(&r, CANVAS, CANVAS).unwrap();
    let pose = |k: KeypointSet| PoseFrame {
        mask: silhouette(&k, CANVAS),
        keypoints: k,
    };
    let poses = [pose(r.clone()), pose(r.with_hidden(5..9)), pose(r.clone())];
    match calibrate_sequence(&img, &r, &mask, &poses) {
        Err(TpcError::Frame { index, source }) => {
            assert_eq!(index, 2);
            assert!(matches!(*source, TpcError::NoFeasibleCandidate));
        }
        other => panic!("expected frame error, got {:?}", other.map(|f| f.len())),
    }
}

#[test]
fn scale_sequence_recovers_scales() {
    let r = reference();
    let (img, mask) = render_figure(&r, CANVAS, CANVAS).unwrap();
    let poses: Vec<PoseFrame> = [1.0, 2.0]
        .iter()
        .map(|&s| {
            let k = scaled(&r, s);
            PoseFrame {
                mask: silhouette(&k, CANVAS),
                keypoints: k,
            }
        })
        .collect();
    let frames = calibrate_sequence(&img, &r, &mask, &poses).unwrap();
    assert!((frames[0].transform.scale - 1.0).abs() < 1e-6);
    assert!((frames[1].transform.scale - 2.0).abs() < 1e-6);
    assert_eq!(frames[1].image.channels(), 4);
}

fn smooth(w: u32, h: u32, phase: f64) -> RasterImage {
    let data = (0..h)
        .flat_map(|v| (0..w).map(move |u| (u as f64, v as f64)))
        .flat_map(|(x, y)| {
            [
                (128.0 + 100.0 * ((x + phase) / 15.0).sin()).round() as u8,
                (128.0 + 100.0 * ((y - phase) / 19.0).cos()).round() as u8,
                (128.0 + 60.0 * ((x + y) / 23.0).sin()).round() as u8,
            ]
        })
        .collect();
    RasterImage::new(w, h, 3, data).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn warp_round_trip_keeps_interior(
        s in 0.8f64..1.25,
        angle in -3.1f64..3.1,
        tx in -6.0f64..6.0,
        ty in -6.0f64..6.0,
        phase in 0.0f64..30.0,
    ) {
        let (w, h) = (96u32, 80u32);
        let img = smooth(w, h, phase);
        let c = Point2::new(w as f64 / 2.0 + tx, h as f64 / 2.0 + ty);
        let t = ProcrustesTransform::about_pivot(s, angle, c);
        let back = warp_image(&warp_image(&img, &t, w, h), &t.inverse(), w, h);
        for v in 2..h - 2 {
            for u in 2..w - 2 {
                let p = t.apply(Point2::new(u as f64 + 0.5, v as f64 + 0.5));
                if p.x < 2.5 || p.y < 2.5 || p.x > w as f64 - 2.5 || p.y > h as f64 - 2.5 {
                    continue;
                }
                for ch in 0..3 {
                    let d = back.pixel(u, v)[ch] as i32 - img.pixel(u, v)[ch] as i32;
                    prop_assert!(d.abs() <= 2, "({u},{v}) ch {ch} off by {d}");
                }
            }
        }
    }
}
