use nalgebra::DMatrix;

use super::features::FeatureSequence;
use crate::calibration::RasterImage;
use crate::error::{Result, TpcError};

/// Deterministic stand-in for a latent image encoder: the image is cut into a
/// `grid x grid` array of equal patches and each patch becomes its mean R, G,
/// B in [0, 1]. Patches are numbered row by row. Alpha is ignored.
pub fn toy_patch_encode(image: &RasterImage, grid: u32) -> Result<DMatrix<f64>> {
    let (w, h) = image.dims();
    if grid == 0 || w % grid != 0 || h % grid != 0 {
        return Err(TpcError::IndivisibleDimensions {
            width: w,
            height: h,
            grid,
        });
    }
    let (pw, ph) = (w / grid, h / grid);
    let count = (pw * ph) as f64 * 255.0;
    let mut out = DMatrix::zeros((grid * grid) as usize, 3);
    for gy in 0..grid {
        for gx in 0..grid {
            let row = (gy * grid + gx) as usize;
            let mut sums = [0u64; 3];
            for y in gy * ph..(gy + 1) * ph {
                for x in gx * pw..(gx + 1) * pw {
                    let px = image.pixel(x, y);
                    for c in 0..3 {
                        sums[c] += px[c] as u64;
                    }
                }
            }
            for c in 0..3 {
                out[(row, c)] = sums[c] as f64 / count;
            }
        }
    }
    Ok(out)
}

pub fn encode_sequence(images: &[RasterImage], grid: u32) -> Result<FeatureSequence> {
    let frames = images
        .iter()
        .map(|img| toy_patch_encode(img, grid))
        .collect::<Result<Vec<_>>>()?;
    FeatureSequence::from_frames(&frames)
}
