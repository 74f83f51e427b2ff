use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use tpc_core::calibration::calibrate_sequence;
use tpc_core::diagnostics::{classify_misalignment, run_sweep, SweepAxis};
use tpc_core::io::{
    error_document, exit_code, load_features, load_image, load_keypoints, load_mask, load_schedule,
    misalignment_document, sweep_csv, MaskSource, PipelineConfig,
};
use tpc_core::pipeline::{
    load_inputs, run_pipeline, write_calibration, write_propagation, PipelineInputs,
};
use tpc_core::propagation::{replay, run_propagation, AttentionScaling};
use tpc_core::shape::Point2;
use tpc_core::synth::{render_figure, upright_figure};
use tpc_core::TpcError;

#[derive(Parser)]
#[command(
    name = "tpc",
    version,
    about = "Procrustes calibration of a reference human image"
)]
struct Cli {
    /// Worker threads for frame-parallel stages (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Warp the reference onto every target pose.
    Calibrate(CalibrateArgs),
    /// Propagate an encoded feature sequence across denoising steps.
    Propagate(PropagateArgs),
    /// Report rotation and scale misalignment per pose frame.
    Diagnose(DiagnoseArgs),
    /// Synthetic scale or rotation sensitivity table.
    Sweep(SweepArgs),
    /// Calibrate, encode, propagate and diagnose in one run.
    Pipeline(PipelineArgs),
}

#[derive(Args)]
struct SourceArgs {
    /// Reference image.
    #[arg(long)]
    ref_image: PathBuf,
    /// Reference keypoint document (one frame).
    #[arg(long)]
    ref_keypoints: PathBuf,
    /// Reference silhouette; the keypoint hull is used when absent.
    #[arg(long)]
    ref_mask: Option<PathBuf>,
    /// Target pose keypoint document.
    #[arg(long)]
    poses: PathBuf,
    /// Directory of target silhouettes named 0001.png, 0002.png, ...
    #[arg(long)]
    pose_masks: Option<PathBuf>,
}

#[derive(Args)]
struct CommonArgs {
    #[arg(long, default_value_t = 0.3)]
    visibility_threshold: f64,
    #[arg(long, default_value = "file", value_parser = parse_mask_source)]
    mask_source: MaskSource,
}

#[derive(Args)]
struct CalibrateArgs {
    #[command(flatten)]
    sources: SourceArgs,
    #[command(flatten)]
    common: CommonArgs,
    #[arg(long, env = "TPC_OUT_DIR")]
    out: PathBuf,
}

#[derive(Args)]
struct PropagateArgs {
    /// Feature sequence document.
    #[arg(long)]
    features: PathBuf,
    #[arg(long = "groups", default_value_t = 30)]
    groups_m: usize,
    #[arg(long = "steps", default_value_t = 25)]
    denoise_t: usize,
    #[arg(long, env = "TPC_SEED", default_value_t = 0)]
    seed: u64,
    /// Replay a recorded schedule instead of sampling.
    #[arg(long)]
    schedule: Option<PathBuf>,
    #[arg(long, env = "TPC_OUT_DIR")]
    out: PathBuf,
}

#[derive(Args)]
struct DiagnoseArgs {
    #[arg(long)]
    ref_keypoints: PathBuf,
    #[arg(long)]
    poses: PathBuf,
    #[arg(long, default_value_t = 0.3)]
    visibility_threshold: f64,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    ref_image: Option<PathBuf>,
    #[arg(long)]
    ref_keypoints: Option<PathBuf>,
    #[arg(long)]
    ref_mask: Option<PathBuf>,
    /// Use a built-in 256x256 stick figure as the reference.
    #[arg(long, conflicts_with_all = ["ref_image", "ref_keypoints", "ref_mask"])]
    synthetic: bool,
    #[arg(long, value_parser = parse_axis)]
    axis: SweepAxis,
    /// Comma-separated scale factors or angles in radians. Defaults to
    /// 1.0 down to 0.4 for scale and -pi..pi in pi/12 steps for rotation.
    #[arg(long, value_delimiter = ',')]
    steps: Vec<f64>,
    #[arg(long, default_value_t = 0.3)]
    visibility_threshold: f64,
    /// Write the table here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PipelineArgs {
    #[command(flatten)]
    sources: SourceArgs,
    #[command(flatten)]
    common: CommonArgs,
    #[arg(long = "groups", default_value_t = 30)]
    groups_m: usize,
    #[arg(long = "steps", default_value_t = 25)]
    denoise_t: usize,
    #[arg(long, env = "TPC_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "dim", value_parser = parse_scaling)]
    attention_scaling: AttentionScaling,
    #[arg(long, default_value_t = 8)]
    patch_grid: u32,
    #[arg(long, env = "TPC_OUT_DIR")]
    out: PathBuf,
}

fn parse_mask_source(s: &str) -> Result<MaskSource, String> {
    s.parse().map_err(|e: TpcError| e.to_string())
}

fn parse_scaling(s: &str) -> Result<AttentionScaling, String> {
    s.parse().map_err(|e: TpcError| e.to_string())
}

fn parse_axis(s: &str) -> Result<SweepAxis, String> {
    s.parse().map_err(|e: TpcError| e.to_string())
}

impl SourceArgs {
    fn inputs(&self) -> PipelineInputs {
        PipelineInputs {
            ref_image: self.ref_image.clone(),
            ref_keypoints: self.ref_keypoints.clone(),
            ref_mask: self.ref_mask.clone(),
            pose_keypoints: self.poses.clone(),
            pose_mask_dir: self.pose_masks.clone(),
        }
    }
}

impl CommonArgs {
    fn config(&self) -> PipelineConfig {
        PipelineConfig {
            visibility_threshold: self.visibility_threshold,
            mask_source: self.mask_source,
            ..Default::default()
        }
    }
}

fn write_or_print(out: Option<&Path>, text: &str) -> tpc_core::Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| TpcError::Io {
            path: path.to_path_buf(),
            source: e,
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn create_dir(path: &Path) -> tpc_core::Result<()> {
    std::fs::create_dir_all(path).map_err(|e| TpcError::Io {
        path: path.to_path_buf(),
        source: e,
    })
}

fn calibrate(args: &CalibrateArgs) -> tpc_core::Result<()> {
    let config = args.common.config();
    config.validate()?;
    let loaded = load_inputs(&args.sources.inputs(), &config)?;
    let frames = calibrate_sequence(
        &loaded.ref_image,
        &loaded.ref_keypoints,
        &loaded.ref_mask,
        &loaded.poses,
    )?;
    create_dir(&args.out)?;
    write_calibration(&frames, &args.out)?;
    for f in &frames {
        eprintln!(
            "frame {}: {} score {:.4} scale {:.4} angle {:.4}",
            f.frame_index,
            f.chosen_subset.groups,
            f.score,
            f.transform.scale,
            f.transform.angle()
        );
    }
    Ok(())
}

fn propagate(args: &PropagateArgs) -> tpc_core::Result<()> {
    let features = load_features(&args.features)?;
    let (steps, schedule) = match &args.schedule {
        Some(path) => {
            let schedule = load_schedule(path)?;
            (replay(&features, &schedule)?, schedule)
        }
        None => run_propagation(&features, args.groups_m, args.denoise_t, args.seed)?,
    };
    create_dir(&args.out)?;
    write_propagation(&steps, &schedule, &args.out)
}

fn diagnose(args: &DiagnoseArgs) -> tpc_core::Result<()> {
    let reference = load_keypoints(&args.ref_keypoints, args.visibility_threshold)?;
    let reference = reference.first().ok_or_else(|| {
        TpcError::InvalidInput(format!("{}: no frames", args.ref_keypoints.display()))
    })?;
    let poses = load_keypoints(&args.poses, args.visibility_threshold)?;
    let reports: Vec<_> = poses
        .iter()
        .map(|p| classify_misalignment(reference, p))
        .collect();
    write_or_print(args.out.as_deref(), &misalignment_document(&reports))
}

fn default_steps(axis: SweepAxis) -> Vec<f64> {
    match axis {
        SweepAxis::Scale => (0..=12).map(|i| 1.0 - 0.05 * i as f64).collect(),
        SweepAxis::Rotation => (-12..=12).map(|k| k as f64 * PI / 12.0).collect(),
    }
}

fn sweep(args: &SweepArgs) -> tpc_core::Result<()> {
    let (image, kps, mask) = if args.synthetic {
        let kps = upright_figure(Point2::new(128.0, 128.0), 120.0);
        let (image, mask) = render_figure(&kps, 256, 256)?;
        (image, kps, mask)
    } else {
        let (Some(img_path), Some(kp_path)) = (&args.ref_image, &args.ref_keypoints) else {
            return Err(TpcError::InvalidInput(
                "sweep needs --ref-image and --ref-keypoints, or --synthetic".into(),
            ));
        };
        let image = load_image(img_path)?;
        let kps = load_keypoints(kp_path, args.visibility_threshold)?
            .into_iter()
            .next()
            .ok_or_else(|| TpcError::InvalidInput(format!("{}: no frames", kp_path.display())))?;
        let mask = match &args.ref_mask {
            Some(p) => load_mask(p)?,
            None => tpc_core::calibration::keypoint_hull_mask(&kps, image.width(), image.height())?,
        };
        (image, kps, mask)
    };
    let steps = if args.steps.is_empty() {
        default_steps(args.axis)
    } else {
        args.steps.clone()
    };
    let points = run_sweep(&image, &kps, &mask, args.axis, &steps)?;
    write_or_print(args.out.as_deref(), &sweep_csv(&points))
}

fn pipeline(args: &PipelineArgs) -> Result<(), (String, TpcError)> {
    let config = PipelineConfig {
        groups_m: args.groups_m,
        denoise_t: args.denoise_t,
        seed: args.seed,
        attention_scaling: args.attention_scaling,
        patch_grid: args.patch_grid,
        ..args.common.config()
    };
    let summary = run_pipeline(&args.sources.inputs(), &args.out, &config)
        .map_err(|e| (e.stage.to_string(), e.error))?;
    eprintln!(
        "{} frames, {} groups, mean alignment {:.4}, {} misaligned",
        summary.frames, summary.groups, summary.mean_score, summary.misaligned_frames
    );
    Ok(())
}

fn run(cli: &Cli) -> Result<(), (String, TpcError)> {
    let tag = |stage: &str| {
        let stage = stage.to_owned();
        move |e| (stage, e)
    };
    match &cli.command {
        Command::Calibrate(a) => calibrate(a).map_err(tag("calibrate")),
        Command::Propagate(a) => propagate(a).map_err(tag("propagate")),
        Command::Diagnose(a) => diagnose(a).map_err(tag("diagnose")),
        Command::Sweep(a) => sweep(a).map_err(tag("sweep")),
        Command::Pipeline(a) => pipeline(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.threads {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| run(&cli)),
            Err(e) => Err((
                "config".to_owned(),
                TpcError::InvalidConfig(format!("thread pool: {e}")),
            )),
        },
        None => run(&cli),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err((stage, error)) => {
            eprint!("{}", error_document(&stage, &error));
            ExitCode::from(exit_code(&error) as u8)
        }
    }
}
