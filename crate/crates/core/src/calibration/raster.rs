use crate::error::{Result, TpcError};

/// 8-bit interleaved image, row-major, 3 (RGB) or 4 (RGBA) channels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RasterImage {
    width: u32,
    height: u32,
    channels: u8,
    data: Vec<u8>,
}

impl RasterImage {
    pub fn new(width: u32, height: u32, channels: u8, data: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(TpcError::InvalidInput(
                "image dimensions must be positive".into(),
            ));
        }
        if channels != 3 && channels != 4 {
            return Err(TpcError::InvalidInput(format!(
                "unsupported channel count {channels}"
            )));
        }
        let expected = width as usize * height as usize * channels as usize;
        if data.len() != expected {
            return Err(TpcError::DimensionMismatch(format!(
                "{width}x{height}x{channels} image needs {expected} bytes, got {}",
                data.len()
            )));
        }
        Ok(Self {
            width,
            height,
            channels,
            data,
        })
    }

    pub fn blank(width: u32, height: u32, channels: u8) -> Result<Self> {
        let len = width as usize * height as usize * channels as usize;
        Self::new(width, height, channels, vec![0; len])
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn dims(&self) -> (u32, u32) {
        (self.width, self.height)
    }

    pub fn channels(&self) -> u8 {
        self.channels
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    pub fn into_data(self) -> Vec<u8> {
        self.data
    }

    pub fn pixel(&self, x: u32, y: u32) -> &[u8] {
        let c = self.channels as usize;
        let i = (y as usize * self.width as usize + x as usize) * c;
        &self.data[i..i + c]
    }

    pub fn pixel_mut(&mut self, x: u32, y: u32) -> &mut [u8] {
        let c = self.channels as usize;
        let i = (y as usize * self.width as usize + x as usize) * c;
        &mut self.data[i..i + c]
    }

    /// RGBA copy; RGB input gets an opaque alpha channel.
    pub fn to_rgba(&self) -> RasterImage {
        if self.channels == 4 {
            return self.clone();
        }
        let data = self
            .data
            .chunks_exact(3)
            .flat_map(|px| [px[0], px[1], px[2], 255])
            .collect();
        RasterImage {
            width: self.width,
            height: self.height,
            channels: 4,
            data,
        }
    }

    /// Zeroes every pixel (alpha included) where the mask is unset.
    pub fn screen(&mut self, mask: &ShapeMask) -> Result<()> {
        if mask.dims() != self.dims() {
            return Err(TpcError::DimensionMismatch(format!(
                "mask {:?} vs image {:?}",
                mask.dims(),
                self.dims()
            )));
        }
        let c = self.channels as usize;
        for (px, &keep) in self.data.chunks_exact_mut(c).zip(mask.bits()) {
            if !keep {
                px.fill(0);
            }
        }
        Ok(())
    }
}

/// Binary silhouette raster, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShapeMask {
    width: u32,
    height: u32,
    bits: Vec<bool>,
}

impl ShapeMask {
    pub fn new(width: u32, height: u32, bits: Vec<bool>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(TpcError::InvalidInput(
                "mask dimensions must be positive".into(),
            ));
        }
        if bits.len() != width as usize * height as usize {
            return Err(TpcError::DimensionMismatch(format!(
                "{width}x{height} mask needs {} cells, got {}",
                width as usize * height as usize,
                bits.len()
            )));
        }
        Ok(Self {
            width,
            height,
            bits,
        })
    }

    pub fn empty(width: u32, height: u32) -> Result<Self> {
        Self::new(width, height, vec![false; width as usize * height as usize])
    }

    pub fn from_fn(width: u32, height: u32, mut f: impl FnMut(u32, u32) -> bool) -> Result<Self> {
        let bits = (0..height)
            .flat_map(|y| (0..width).map(move |x| (x, y)))
            .map(|(x, y)| f(x, y))
            .collect();
        Self::new(width, height, bits)
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn dims(&self) -> (u32, u32) {
        (self.width, self.height)
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn get(&self, x: u32, y: u32) -> bool {
        self.bits[y as usize * self.width as usize + x as usize]
    }

    pub fn set(&mut self, x: u32, y: u32, value: bool) {
        self.bits[y as usize * self.width as usize + x as usize] = value;
    }

    pub fn area(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }
}
