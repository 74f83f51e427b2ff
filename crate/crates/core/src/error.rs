use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = TpcError> = std::result::Result<T, E>;

/// Broad failure class, used to pick the CLI exit code and the C status code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    /// Bad files, bad arguments, inconsistent dimensions.
    Input,
    /// The data is well-formed but the geometry cannot be solved.
    Numerical,
}

#[derive(Debug, Error)]
pub enum TpcError {
    #[error("need at least 3 usable points, found {found}")]
    FewerThanThreePoints { found: usize },

    #[error("degenerate shape: {0}")]
    DegenerateShape(&'static str),

    #[error("nose and both hips must be visible in both keypoint sets")]
    MissingAxisPoints,

    #[error("keypoint set has no visible points")]
    EmptyShape,

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("no subset candidate has enough commonly visible keypoints")]
    NoFeasibleCandidate,

    #[error("invalid group count {groups} for {frames} frames")]
    InvalidGroupCount { frames: usize, groups: usize },

    #[error("image of {width}x{height} is not divisible into a {grid}x{grid} patch grid")]
    IndivisibleDimensions { width: u32, height: u32, grid: u32 },

    #[error("frame {index}: {source}")]
    Frame {
        index: usize,
        #[source]
        source: Box<TpcError>,
    },

    #[error("{}:{line}: {message}", path.display())]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("{}: frame {frame}: {message}", path.display())]
    Schema {
        path: PathBuf,
        frame: usize,
        message: String,
    },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{}: {message}", path.display())]
    Image { path: PathBuf, message: String },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl TpcError {
    pub fn class(&self) -> ErrorClass {
        match self {
            TpcError::FewerThanThreePoints { .. }
            | TpcError::DegenerateShape(_)
            | TpcError::MissingAxisPoints
            | TpcError::EmptyShape
            | TpcError::NoFeasibleCandidate => ErrorClass::Numerical,
            TpcError::Frame { source, .. } => source.class(),
            _ => ErrorClass::Input,
        }
    }

    /// Stable machine-readable name of the variant.
    pub fn code(&self) -> &'static str {
        match self {
            TpcError::FewerThanThreePoints { .. } => "FewerThanThreePoints",
            TpcError::DegenerateShape(_) => "DegenerateShape",
            TpcError::MissingAxisPoints => "MissingAxisPoints",
            TpcError::EmptyShape => "EmptyShape",
            TpcError::DimensionMismatch(_) => "DimensionMismatch",
            TpcError::NoFeasibleCandidate => "NoFeasibleCandidate",
            TpcError::InvalidGroupCount { .. } => "InvalidGroupCount",
            TpcError::IndivisibleDimensions { .. } => "IndivisibleDimensions",
            TpcError::Frame { source, .. } => source.code(),
            TpcError::Parse { .. } => "ParseError",
            TpcError::Schema { .. } => "SchemaError",
            TpcError::Io { .. } => "IoError",
            TpcError::Image { .. } => "ImageError",
            TpcError::InvalidConfig(_) => "InvalidConfig",
            TpcError::InvalidInput(_) => "InvalidInput",
        }
    }

    /// Innermost error, skipping frame wrappers.
    pub fn root(&self) -> &TpcError {
        match self {
            TpcError::Frame { source, .. } => source.root(),
            other => other,
        }
    }

    pub(crate) fn in_frame(self, index: usize) -> TpcError {
        TpcError::Frame {
            index,
            source: Box::new(self),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> TpcError {
        TpcError::Io {
            path: path.into(),
            source,
        }
    }
}
