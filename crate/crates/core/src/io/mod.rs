//! File formats and configuration.
//!
//! All text documents start with a `<format> <version>` line followed by
//! whitespace-separated `key value` records.

mod config;
mod features;
mod images;
mod keypoints;
mod reports;
mod schedule;
mod text;

pub use config::{MaskSource, PipelineConfig};
pub use features::{features_to_text, load_features, parse_features, save_features};
pub use images::{load_image, load_mask, save_mask, save_png};
pub use keypoints::{load_keypoints, KeypointDocument, KeypointRecord};
pub use reports::{
    calibration_log, error_document, exit_code, misalignment_document, sweep_csv, SWEEP_HEADER,
};
pub use schedule::{load_schedule, parse_schedule, save_schedule, schedule_to_text};
pub use text::{fmt_f32, fmt_f64};
