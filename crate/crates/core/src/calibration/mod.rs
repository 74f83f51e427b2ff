//! Warping the reference image onto each target pose.

mod mask;
mod raster;
mod select;
mod warp;

pub(crate) use mask::{convex_hull, fill_convex};
pub use mask::{keypoint_hull_mask, mask_iou};
pub use raster::{RasterImage, ShapeMask};
pub use select::{
    calibrate_sequence, enumerate_candidates, select_subset, CalibratedFrame, GroupSelection,
    PoseFrame, SubsetCandidate,
};
pub use warp::{warp_image, warp_mask};
