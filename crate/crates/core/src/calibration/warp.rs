//! Inverse-mapping warps of images and masks under a similarity transform.
//!
//! Pixel `(u, v)` covers `[u, u+1) x [v, v+1)` and is sampled at its center
//! `(u + 0.5, v + 0.5)`, so keypoint coordinates and pixel data share one
//! continuous frame. A destination pixel whose pre-image falls outside the
//! span of source pixel centers is left zero.

use super::raster::{RasterImage, ShapeMask};
use crate::shape::{Point2, ProcrustesTransform};

const EDGE_EPS: f64 = 1e-9;

/// Bilinear footprint of a source location, in pixel-index space.
#[derive(Debug, Clone, Copy)]
struct Footprint {
    x0: u32,
    y0: u32,
    x1: u32,
    y1: u32,
    fx: f64,
    fy: f64,
}

fn footprint(p: Point2, width: u32, height: u32) -> Option<Footprint> {
    let x = p.x - 0.5;
    let y = p.y - 0.5;
    let max_x = (width - 1) as f64;
    let max_y = (height - 1) as f64;
    if !(x >= -EDGE_EPS && x <= max_x + EDGE_EPS && y >= -EDGE_EPS && y <= max_y + EDGE_EPS) {
        return None;
    }
    let x = x.clamp(0.0, max_x);
    let y = y.clamp(0.0, max_y);
    let x0 = (x.floor() as u32).min(width.saturating_sub(2));
    let y0 = (y.floor() as u32).min(height.saturating_sub(2));
    Some(Footprint {
        x0,
        y0,
        x1: (x0 + 1).min(width - 1),
        y1: (y0 + 1).min(height - 1),
        fx: x - x0 as f64,
        fy: y - y0 as f64,
    })
}

impl Footprint {
    fn blend(&self, mut sample: impl FnMut(u32, u32) -> f64) -> f64 {
        let top = sample(self.x0, self.y0) * (1.0 - self.fx) + sample(self.x1, self.y0) * self.fx;
        let bottom =
            sample(self.x0, self.y1) * (1.0 - self.fx) + sample(self.x1, self.y1) * self.fx;
        top * (1.0 - self.fy) + bottom * self.fy
    }
}

fn pixel_center(u: u32, v: u32) -> Point2 {
    Point2::new(u as f64 + 0.5, v as f64 + 0.5)
}

/// Warps `src` by `transform` onto a `width x height` canvas using inverse
/// mapping and bilinear sampling. Output keeps the source channel count.
pub fn warp_image(
    src: &RasterImage,
    transform: &ProcrustesTransform,
    width: u32,
    height: u32,
) -> RasterImage {
    let inverse = transform.inverse();
    let channels = src.channels() as usize;
    let mut out = vec![0u8; width as usize * height as usize * channels];
    for v in 0..height {
        for u in 0..width {
            let Some(fp) = footprint(inverse.apply(pixel_center(u, v)), src.width(), src.height())
            else {
                continue;
            };
            let base = (v as usize * width as usize + u as usize) * channels;
            for c in 0..channels {
                let value = fp.blend(|x, y| src.pixel(x, y)[c] as f64);
                out[base + c] = (value + 0.5).floor().clamp(0.0, 255.0) as u8;
            }
        }
    }
    RasterImage::new(width, height, src.channels(), out).expect("output buffer sized from dims")
}

/// Warps a mask the same way as [`warp_image`]; a destination cell is set
/// when the bilinear coverage of its pre-image reaches one half.
pub fn warp_mask(
    src: &ShapeMask,
    transform: &ProcrustesTransform,
    width: u32,
    height: u32,
) -> ShapeMask {
    let inverse = transform.inverse();
    ShapeMask::from_fn(width, height, |u, v| {
        footprint(inverse.apply(pixel_center(u, v)), src.width(), src.height())
            .map(|fp| fp.blend(|x, y| if src.get(x, y) { 1.0 } else { 0.0 }) >= 0.5)
            .unwrap_or(false)
    })
    .expect("dims are positive")
}
