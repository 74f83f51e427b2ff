//! End-to-end run: reference + poses -> calibrated images -> encoded
//! features -> propagated steps, plus misalignment diagnostics.
//!
//! Output tree under `out_dir`:
//!
//! ```text
//! calibrated/0001.png ...   RGBA calibrated references, background cleared
//! calibration_log.txt       transform, subset and scores per frame
//! features.txt              encoded calibrated frames (L x m x 3)
//! reference_features.txt    encoded reference (1 x m x 3)
//! propagated/step_0025.txt  propagated features for each denoising step
//! schedule.txt              partition and every pick
//! conditioning.txt          cross-attention output per frame at the last step
//! misalignment.txt          rotation / scale misalignment per frame
//! ```
//!
//! On failure `error.txt` is written instead of the remaining outputs.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use crate::calibration::{
    calibrate_sequence, keypoint_hull_mask, CalibratedFrame, PoseFrame, RasterImage, ShapeMask,
};
use crate::diagnostics::classify_misalignment;
use crate::error::{Result, TpcError};
use crate::io::{
    calibration_log, error_document, features_to_text, load_image, load_mask,
    misalignment_document, save_png, schedule_to_text, KeypointDocument, MaskSource,
    PipelineConfig,
};
use crate::propagation::{
    assemble_condition, cross_attention, encode_sequence, run_propagation, toy_patch_encode,
    FeatureSequence, PropagationSchedule,
};
use crate::shape::KeypointSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Config,
    Load,
    Calibrate,
    Encode,
    Propagate,
    Diagnose,
    Write,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stage::Config => "config",
            Stage::Load => "load",
            Stage::Calibrate => "calibrate",
            Stage::Encode => "encode",
            Stage::Propagate => "propagate",
            Stage::Diagnose => "diagnose",
            Stage::Write => "write",
        })
    }
}

#[derive(Debug)]
pub struct StageError {
    pub stage: Stage,
    pub error: TpcError,
}

impl fmt::Display for StageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} stage failed: {}", self.stage, self.error)
    }
}

impl std::error::Error for StageError {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        Some(&self.error)
    }
}

trait AtStage<T> {
    fn at(self, stage: Stage) -> std::result::Result<T, StageError>;
}

impl<T> AtStage<T> for Result<T> {
    fn at(self, stage: Stage) -> std::result::Result<T, StageError> {
        self.map_err(|error| StageError { stage, error })
    }
}

#[derive(Debug, Clone)]
pub struct PipelineInputs {
    pub ref_image: PathBuf,
    pub ref_keypoints: PathBuf,
    pub ref_mask: Option<PathBuf>,
    pub pose_keypoints: PathBuf,
    /// Directory of per-frame masks named `0001.png`, `0002.png`, ...
    pub pose_mask_dir: Option<PathBuf>,
}

#[derive(Debug, Clone)]
pub struct PipelineSummary {
    pub frames: usize,
    /// Group count actually used (capped at the frame count).
    pub groups: usize,
    pub mean_score: f64,
    pub misaligned_frames: usize,
}

/// Everything needed to calibrate, already in memory.
#[derive(Debug, Clone)]
pub struct LoadedInputs {
    pub ref_image: RasterImage,
    pub ref_keypoints: KeypointSet,
    pub ref_mask: ShapeMask,
    pub poses: Vec<PoseFrame>,
}

pub fn pose_mask_path(dir: &Path, frame_index: usize) -> PathBuf {
    dir.join(format!("{frame_index:04}.png"))
}

fn reference_keypoints(path: &Path, threshold: f64) -> Result<KeypointSet> {
    let doc = KeypointDocument::load(path)?;
    if doc.frames.len() != 1 {
        return Err(TpcError::Schema {
            path: path.to_path_buf(),
            frame: doc.frames.len(),
            message: "reference document must hold exactly one frame".into(),
        });
    }
    Ok(doc.to_sets(threshold)?.remove(0))
}

pub fn load_inputs(inputs: &PipelineInputs, config: &PipelineConfig) -> Result<LoadedInputs> {
    let ref_image = load_image(&inputs.ref_image)?;
    let ref_keypoints = reference_keypoints(&inputs.ref_keypoints, config.visibility_threshold)?;
    let (rw, rh) = ref_image.dims();
    let ref_mask = match (&inputs.ref_mask, config.mask_source) {
        (Some(path), MaskSource::File) => {
            let mask = load_mask(path)?;
            if mask.dims() != ref_image.dims() {
                return Err(TpcError::DimensionMismatch(format!(
                    "{}: mask {:?} vs reference image {:?}",
                    path.display(),
                    mask.dims(),
                    ref_image.dims()
                )));
            }
            mask
        }
        _ => keypoint_hull_mask(&ref_keypoints, rw, rh)?,
    };

    let doc = KeypointDocument::load(&inputs.pose_keypoints)?;
    if doc.frames.is_empty() {
        return Err(TpcError::InvalidInput(format!(
            "{}: no pose frames",
            inputs.pose_keypoints.display()
        )));
    }
    let sets = doc.to_sets(config.visibility_threshold)?;
    let mut poses = Vec::with_capacity(sets.len());
    for (i, keypoints) in sets.into_iter().enumerate() {
        let index = i + 1;
        let file = match (&inputs.pose_mask_dir, config.mask_source) {
            (Some(dir), MaskSource::File) => {
                Some(pose_mask_path(dir, index)).filter(|p| p.is_file())
            }
            _ => None,
        };
        let mask = match file {
            Some(path) => {
                let mask = load_mask(&path)?;
                if mask.dims() != (doc.width, doc.height) {
                    return Err(TpcError::DimensionMismatch(format!(
                        "{}: mask {:?} vs pose canvas {:?}",
                        path.display(),
                        mask.dims(),
                        (doc.width, doc.height)
                    )));
                }
                mask
            }
            None => keypoint_hull_mask(&keypoints, doc.width, doc.height)
                .map_err(|e| e.in_frame(index))?,
        };
        poses.push(PoseFrame { keypoints, mask });
    }
    Ok(LoadedInputs {
        ref_image,
        ref_keypoints,
        ref_mask,
        poses,
    })
}

/// In-memory results of a run.
#[derive(Debug, Clone)]
pub struct PipelineOutputs {
    pub frames: Vec<CalibratedFrame>,
    pub features: FeatureSequence,
    pub reference_features: FeatureSequence,
    pub steps: Vec<FeatureSequence>,
    pub schedule: PropagationSchedule,
    pub conditioning: FeatureSequence,
}

/// Query for frame `i`: the target silhouette as a white-on-black image.
fn silhouette_image(mask: &ShapeMask) -> RasterImage {
    let (w, h) = mask.dims();
    let data = mask
        .bits()
        .iter()
        .flat_map(|&b| if b { [255u8; 3] } else { [0u8; 3] })
        .collect();
    RasterImage::new(w, h, 3, data).expect("sized from mask")
}

pub fn process(
    loaded: &LoadedInputs,
    config: &PipelineConfig,
) -> std::result::Result<PipelineOutputs, StageError> {
    let frames = calibrate_sequence(
        &loaded.ref_image,
        &loaded.ref_keypoints,
        &loaded.ref_mask,
        &loaded.poses,
    )
    .at(Stage::Calibrate)?;

    let images: Vec<RasterImage> = frames.iter().map(|f| f.image.clone()).collect();
    let features = encode_sequence(&images, config.patch_grid).at(Stage::Encode)?;
    let reference = toy_patch_encode(&loaded.ref_image, config.patch_grid).at(Stage::Encode)?;
    let reference_features =
        FeatureSequence::from_frames(std::slice::from_ref(&reference)).at(Stage::Encode)?;

    let groups = config.groups_m.min(features.frames());
    let (steps, schedule) =
        run_propagation(&features, groups, config.denoise_t, config.seed).at(Stage::Propagate)?;

    let last = steps.last().expect("at least one step");
    let attended = loaded
        .poses
        .iter()
        .enumerate()
        .map(|(i, pose)| {
            let query = toy_patch_encode(&silhouette_image(&pose.mask), config.patch_grid)?;
            let kv = assemble_condition(&reference, &last.frame_matrix(i))?;
            cross_attention(&query, &kv, &kv, config.attention_scaling)
        })
        .collect::<Result<Vec<_>>>()
        .at(Stage::Propagate)?;
    let conditioning = FeatureSequence::from_frames(&attended).at(Stage::Propagate)?;

    Ok(PipelineOutputs {
        frames,
        features,
        reference_features,
        steps,
        schedule,
        conditioning,
    })
}

fn write(path: &Path, contents: impl AsRef<[u8]>) -> Result<()> {
    fs::write(path, contents).map_err(|e| TpcError::io(path, e))
}

fn create_dir(path: &Path) -> Result<()> {
    fs::create_dir_all(path).map_err(|e| TpcError::io(path, e))
}

/// Writes calibrated images and the calibration log.
pub fn write_calibration(frames: &[CalibratedFrame], out_dir: &Path) -> Result<()> {
    let dir = out_dir.join("calibrated");
    create_dir(&dir)?;
    for f in frames {
        save_png(&f.image, &pose_mask_path(&dir, f.frame_index))?;
    }
    write(
        &out_dir.join("calibration_log.txt"),
        calibration_log(frames),
    )
}

/// File name of a propagated step.
pub fn step_file_name(step: usize) -> String {
    format!("step_{step:04}.txt")
}

pub fn write_propagation(
    steps: &[FeatureSequence],
    schedule: &PropagationSchedule,
    out_dir: &Path,
) -> Result<()> {
    let dir = out_dir.join("propagated");
    create_dir(&dir)?;
    for (k, step) in steps.iter().enumerate() {
        write(
            &dir.join(step_file_name(schedule.step_label(k))),
            features_to_text(step),
        )?;
    }
    write(&out_dir.join("schedule.txt"), schedule_to_text(schedule)?)
}

/// Runs every stage and writes the output tree. On failure the error
/// document is written to `out_dir/error.txt` (best effort) and returned.
pub fn run_pipeline(
    inputs: &PipelineInputs,
    out_dir: &Path,
    config: &PipelineConfig,
) -> std::result::Result<PipelineSummary, StageError> {
    let result = run_stages(inputs, out_dir, config);
    if let Err(e) = &result {
        let _ = fs::create_dir_all(out_dir);
        let _ = fs::write(
            out_dir.join("error.txt"),
            error_document(&e.stage.to_string(), &e.error),
        );
    }
    result
}

fn run_stages(
    inputs: &PipelineInputs,
    out_dir: &Path,
    config: &PipelineConfig,
) -> std::result::Result<PipelineSummary, StageError> {
    config.validate().at(Stage::Config)?;
    let loaded = load_inputs(inputs, config).at(Stage::Load)?;
    let out = process(&loaded, config)?;

    let reports: Vec<Result<_>> = loaded
        .poses
        .iter()
        .map(|p| classify_misalignment(&loaded.ref_keypoints, &p.keypoints))
        .collect();

    create_dir(out_dir).at(Stage::Write)?;
    write_calibration(&out.frames, out_dir).at(Stage::Write)?;
    write(
        &out_dir.join("features.txt"),
        features_to_text(&out.features),
    )
    .at(Stage::Write)?;
    write(
        &out_dir.join("reference_features.txt"),
        features_to_text(&out.reference_features),
    )
    .at(Stage::Write)?;
    write_propagation(&out.steps, &out.schedule, out_dir).at(Stage::Write)?;
    write(
        &out_dir.join("conditioning.txt"),
        features_to_text(&out.conditioning),
    )
    .at(Stage::Write)?;
    write(
        &out_dir.join("misalignment.txt"),
        misalignment_document(&reports),
    )
    .at(Stage::Write)?;

    let n = out.frames.len();
    Ok(PipelineSummary {
        frames: n,
        groups: out.schedule.groups,
        mean_score: out.frames.iter().map(|f| f.score).sum::<f64>() / n as f64,
        misaligned_frames: reports
            .iter()
            .filter(|r| matches!(r, Ok(r) if r.misaligned))
            .count(),
    })
}
