//! PNG reading and writing for images and masks.

use std::path::Path;

use image::{GrayImage, ImageReader, RgbaImage};

use crate::calibration::{RasterImage, ShapeMask};
use crate::error::{Result, TpcError};

fn image_error(path: &Path, e: impl std::fmt::Display) -> TpcError {
    TpcError::Image {
        path: path.to_path_buf(),
        message: e.to_string(),
    }
}

fn open(path: &Path) -> Result<image::DynamicImage> {
    let reader = ImageReader::open(path).map_err(|e| TpcError::io(path, e))?;
    reader
        .with_guessed_format()
        .map_err(|e| TpcError::io(path, e))?
        .decode()
        .map_err(|e| image_error(path, e))
}

/// Loads any supported image as 8-bit RGBA.
pub fn load_image(path: &Path) -> Result<RasterImage> {
    let rgba = open(path)?.to_rgba8();
    let (w, h) = rgba.dimensions();
    RasterImage::new(w, h, 4, rgba.into_raw())
}

/// Writes an 8-bit RGBA PNG; RGB input is made opaque.
pub fn save_png(image: &RasterImage, path: &Path) -> Result<()> {
    let rgba = image.to_rgba();
    let (w, h) = rgba.dims();
    let buf = RgbaImage::from_raw(w, h, rgba.into_data()).expect("buffer matches dims");
    buf.save_with_format(path, image::ImageFormat::Png)
        .map_err(|e| image_error(path, e))
}

/// A mask pixel is set when its luma is at least 128.
pub fn load_mask(path: &Path) -> Result<ShapeMask> {
    let gray = open(path)?.to_luma8();
    let (w, h) = gray.dimensions();
    ShapeMask::new(w, h, gray.pixels().map(|p| p.0[0] >= 128).collect())
}

pub fn save_mask(mask: &ShapeMask, path: &Path) -> Result<()> {
    let (w, h) = mask.dims();
    let data = mask
        .bits()
        .iter()
        .map(|&b| if b { 255 } else { 0 })
        .collect();
    let buf = GrayImage::from_raw(w, h, data).expect("buffer matches dims");
    buf.save_with_format(path, image::ImageFormat::Png)
        .map_err(|e| image_error(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn png_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let img = RasterImage::new(3, 2, 4, (0..24).map(|i| i as u8 * 10).collect()).unwrap();
        let path = dir.path().join("a.png");
        save_png(&img, &path).unwrap();
        assert_eq!(load_image(&path).unwrap(), img);

        let mask = ShapeMask::from_fn(5, 4, |x, y| (x + y) % 3 == 0).unwrap();
        let path = dir.path().join("m.png");
        save_mask(&mask, &path).unwrap();
        assert_eq!(load_mask(&path).unwrap(), mask);
    }

    #[test]
    fn missing_file_is_io_error() {
        assert!(matches!(
            load_image(Path::new("/nonexistent/x.png")),
            Err(TpcError::Io { .. })
        ));
    }
}
