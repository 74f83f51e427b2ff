//! Keypoint sets, the Procrustes solver and scalar shape metrics.

mod keypoints;
mod metrics;
mod procrustes;

pub use keypoints::{
    BodyGroup, KeypointSet, Point2, LEFT_HIP, NOSE, NUM_KEYPOINTS, RIGHT_HIP, SLOT_NAMES,
};
pub use metrics::{bbox_iou, torso_axis_angle, wrap_angle};
pub use nalgebra::{Matrix2, Vector2};
pub use procrustes::{
    apply_transform, common_slots, common_visible, pairs_for_slots, residual, rotation_matrix,
    solve_procrustes, PairedPointSets, ProcrustesTransform, DEGENERACY_TOLERANCE, MIN_PAIRS,
};
