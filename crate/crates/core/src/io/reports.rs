//! Output documents: calibration log, misalignment report, error report and
//! the sweep table.

use std::fmt::Write as _;

use super::text::fmt_f64;
use crate::calibration::CalibratedFrame;
use crate::diagnostics::{MisalignmentReport, SweepPoint, ROTATION_THRESHOLD, SCALE_IOU_THRESHOLD};
use crate::error::{ErrorClass, TpcError};

pub const LOG_FORMAT: &str = "tpc-calibration-log";
pub const MISALIGNMENT_FORMAT: &str = "tpc-misalignment";
pub const ERROR_FORMAT: &str = "tpc-error";

/// One block per frame with the transform, the chosen subset, and the score
/// of every candidate that was tried.
pub fn calibration_log(frames: &[CalibratedFrame]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{LOG_FORMAT} 1");
    let _ = writeln!(out, "frames {}", frames.len());
    for f in frames {
        let t = &f.transform;
        let r = &t.rotation;
        let _ = writeln!(out, "frame {}", f.frame_index);
        let _ = writeln!(out, "scale {}", fmt_f64(t.scale));
        let _ = writeln!(out, "angle {}", fmt_f64(t.angle()));
        let _ = writeln!(
            out,
            "rotation {} {} {} {}",
            fmt_f64(r[(0, 0)]),
            fmt_f64(r[(0, 1)]),
            fmt_f64(r[(1, 0)]),
            fmt_f64(r[(1, 1)])
        );
        let _ = writeln!(
            out,
            "translation {} {}",
            fmt_f64(t.translation.x),
            fmt_f64(t.translation.y)
        );
        let _ = writeln!(out, "subset {}", f.chosen_subset.groups);
        let slots: Vec<String> = f
            .chosen_subset
            .slots
            .iter()
            .map(|s| s.to_string())
            .collect();
        let _ = writeln!(out, "slots {}", slots.join(" "));
        let _ = writeln!(out, "score {}", fmt_f64(f.score));
        for (groups, score) in &f.candidate_scores {
            let _ = writeln!(out, "candidate {groups} {}", fmt_f64(*score));
        }
    }
    out
}

/// Per-frame misalignment; frames whose report could not be computed carry
/// the error code instead.
pub fn misalignment_document(reports: &[Result<MisalignmentReport, TpcError>]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{MISALIGNMENT_FORMAT} 1");
    let _ = writeln!(
        out,
        "thresholds rotation {} scale_iou {}",
        fmt_f64(ROTATION_THRESHOLD),
        fmt_f64(SCALE_IOU_THRESHOLD)
    );
    let _ = writeln!(out, "frames {}", reports.len());
    for (i, report) in reports.iter().enumerate() {
        match report {
            Ok(r) => {
                let _ = writeln!(
                    out,
                    "frame {} theta {} abs_theta {} box_iou {} rotation_misaligned {} scale_misaligned {} misaligned {}",
                    i + 1,
                    fmt_f64(r.theta),
                    fmt_f64(r.abs_theta),
                    fmt_f64(r.box_iou),
                    r.rotation_misaligned,
                    r.scale_misaligned,
                    r.misaligned
                );
            }
            Err(e) => {
                let _ = writeln!(out, "frame {} unavailable {}", i + 1, e.code());
            }
        }
    }
    out
}

/// Exit status for an error: 2 for bad input, 3 for numerical failure.
pub fn exit_code(error: &TpcError) -> i32 {
    match error.class() {
        ErrorClass::Input => 2,
        ErrorClass::Numerical => 3,
    }
}

pub fn error_document(stage: &str, error: &TpcError) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{ERROR_FORMAT} 1");
    let _ = writeln!(out, "stage {stage}");
    let _ = writeln!(out, "code {}", error.code());
    let class = match error.class() {
        ErrorClass::Input => "input",
        ErrorClass::Numerical => "numerical",
    };
    let _ = writeln!(out, "class {class}");
    let _ = writeln!(out, "exit {}", exit_code(error));
    if let TpcError::Frame { index, .. } = error {
        let _ = writeln!(out, "frame {index}");
    }
    match error.root() {
        TpcError::Io { path, .. }
        | TpcError::Parse { path, .. }
        | TpcError::Schema { path, .. }
        | TpcError::Image { path, .. } => {
            let _ = writeln!(out, "path {}", path.display());
        }
        _ => {}
    }
    let _ = writeln!(out, "message {}", error.to_string().replace('\n', " "));
    out
}

pub const SWEEP_HEADER: &str = "axis,value,pre_score,post_score";

/// Comma-separated sweep table. The leading `#` line notes that the scores
/// are silhouette IoU rather than video fidelity.
pub fn sweep_csv(points: &[SweepPoint]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "# scores: silhouette IoU with the target before (pre) and after (post) calibration"
    );
    let _ = writeln!(out, "{SWEEP_HEADER}");
    for p in points {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            p.axis,
            fmt_f64(p.value),
            fmt_f64(p.pre_score),
            fmt_f64(p.post_score)
        );
    }
    out
}
