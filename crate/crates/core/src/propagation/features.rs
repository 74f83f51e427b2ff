use nalgebra::DMatrix;

use crate::error::{Result, TpcError};

/// `frames x patches x dim` block of per-frame patch features, frame-major.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureSequence {
    frames: usize,
    patches: usize,
    dim: usize,
    data: Vec<f64>,
}

impl FeatureSequence {
    pub fn new(frames: usize, patches: usize, dim: usize, data: Vec<f64>) -> Result<Self> {
        if frames == 0 || patches == 0 || dim == 0 {
            return Err(TpcError::InvalidInput(
                "feature sequence dimensions must be at least 1".into(),
            ));
        }
        if data.len() != frames * patches * dim {
            return Err(TpcError::DimensionMismatch(format!(
                "{frames}x{patches}x{dim} features need {} values, got {}",
                frames * patches * dim,
                data.len()
            )));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(TpcError::InvalidInput("features must be finite".into()));
        }
        Ok(Self {
            frames,
            patches,
            dim,
            data,
        })
    }

    /// Stacks per-frame `patches x dim` matrices.
    pub fn from_frames(frames: &[DMatrix<f64>]) -> Result<Self> {
        let first = frames
            .first()
            .ok_or_else(|| TpcError::InvalidInput("no frames to stack".into()))?;
        let (patches, dim) = first.shape();
        let mut data = Vec::with_capacity(frames.len() * patches * dim);
        for (i, f) in frames.iter().enumerate() {
            if f.shape() != (patches, dim) {
                return Err(TpcError::DimensionMismatch(format!(
                    "frame {} is {:?}, expected {:?}",
                    i + 1,
                    f.shape(),
                    (patches, dim)
                )));
            }
            for r in 0..patches {
                data.extend(f.row(r).iter());
            }
        }
        Self::new(frames.len(), patches, dim, data)
    }

    pub fn frames(&self) -> usize {
        self.frames
    }

    pub fn patches(&self) -> usize {
        self.patches
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    /// Features of frame `i` (0-based), row-major `patches x dim`.
    pub fn frame(&self, i: usize) -> &[f64] {
        let len = self.patches * self.dim;
        &self.data[i * len..(i + 1) * len]
    }

    pub(crate) fn frame_mut(&mut self, i: usize) -> &mut [f64] {
        let len = self.patches * self.dim;
        &mut self.data[i * len..(i + 1) * len]
    }

    pub fn frame_matrix(&self, i: usize) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.patches, self.dim, self.frame(i))
    }
}
