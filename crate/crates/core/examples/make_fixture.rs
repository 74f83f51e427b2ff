//! Regenerates the bundled test fixture:
//!
//! ```text
//! cargo run -p tpc-core --example make_fixture -- crates/core/tests/fixtures
//! ```

use std::path::PathBuf;

use tpc_core::io::{save_mask, save_png, KeypointDocument};
use tpc_core::pipeline::pose_mask_path;
use tpc_core::shape::{KeypointSet, Point2, ProcrustesTransform};
use tpc_core::synth::{render_figure, render_silhouette, upright_figure};

const SIZE: u32 = 128;

fn raise_arms(kps: &KeypointSet) -> KeypointSet {
    let mut pts = *kps.points();
    for (elbow, wrist, shoulder) in [(9, 11, 5), (10, 12, 6)] {
        let s = pts[shoulder];
        pts[elbow] = Point2::new(s.x + (pts[elbow].x - s.x) * 1.4, s.y - 12.0);
        pts[wrist] = Point2::new(s.x + (pts[wrist].x - s.x) * 1.6, s.y - 26.0);
    }
    KeypointSet::new(pts, *kps.visibility()).unwrap()
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir: PathBuf = std::env::args_os()
        .nth(1)
        .map(Into::into)
        .unwrap_or_else(|| "crates/core/tests/fixtures".into());
    std::fs::create_dir_all(dir.join("masks"))?;

    let centre = Point2::new(64.0, 64.0);
    let reference = upright_figure(centre, 90.0);
    let (image, mask) = render_figure(&reference, SIZE, SIZE)?;
    save_png(&image, &dir.join("reference.png"))?;
    save_mask(&mask, &dir.join("reference_mask.png"))?;
    KeypointDocument::from_sets(std::slice::from_ref(&reference), SIZE, SIZE, "synthetic")
        .save(&dir.join("reference.kp"))?;

    let motions = [
        (1.0, 0.0, 0.0, 0.0),
        (0.8, 0.0, 4.0, 6.0),
        (1.1, 0.15, -3.0, 0.0),
        (0.9, -0.3, 0.0, -4.0),
        (0.7, 0.6, 5.0, 5.0),
        (1.0, 0.0, 0.0, 0.0),
        (0.85, 0.1, -6.0, 2.0),
        (0.75, -0.8, 2.0, -2.0),
    ];
    let mut poses = Vec::new();
    for (i, &(s, angle, dx, dy)) in motions.iter().enumerate() {
        let t = ProcrustesTransform::about_pivot(s, angle, centre);
        let mut pose = reference.map_points(|p| {
            let q = t.apply(p);
            Point2::new(q.x + dx, q.y + dy)
        })?;
        match i {
            2 | 5 => pose = raise_arms(&pose),
            6 => pose = pose.with_hidden(13..17),
            _ => {}
        }
        save_mask(
            &render_silhouette(&pose, SIZE, SIZE)?,
            &pose_mask_path(&dir.join("masks"), i + 1),
        )?;
        poses.push(pose);
    }
    KeypointDocument::from_sets(&poses, SIZE, SIZE, "synthetic").save(&dir.join("poses.kp"))?;
    println!("wrote {} frames to {}", poses.len(), dir.display());
    Ok(())
}
