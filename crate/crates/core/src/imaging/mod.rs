//! Image containers, colour conversion, gradients and file I/O.
//!
//! Spatial coordinates follow the pixel-centre convention: the pixel in
//! column `c` and row `r` sits at `(c + 0.5, r + 0.5)`. A seed placed at
//! `S/2 + iS` is therefore the exact centre of its grid cell.

mod color;
mod io;

pub use color::{rgb_to_lab, srgb_pixel_to_lab};
pub use io::{load_image, read_label_map, render_overlay, save_image, write_label_map, CONTOUR_COLOR};

use crate::error::{Error, Result};

/// Smallest edge length accepted anywhere in the pipeline, set by the 3x3 window.
pub const MIN_EDGE: usize = 3;

/// 8-bit sRGB image, row-major, three interleaved channels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawImage {
    width: usize,
    height: usize,
    data: Vec<u8>,
}

impl RawImage {
    pub fn new(width: usize, height: usize, data: Vec<u8>) -> Result<Self> {
        if width < MIN_EDGE || height < MIN_EDGE {
            return Err(Error::ImageTooSmall { width, height });
        }
        if data.len() != width * height * 3 {
            return Err(Error::InvalidParameter(format!(
                "buffer of {} bytes does not match {width}x{height}x3",
                data.len()
            )));
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn from_fn(
        width: usize,
        height: usize,
        mut f: impl FnMut(usize, usize) -> [u8; 3],
    ) -> Result<Self> {
        let mut data = Vec::with_capacity(width * height * 3);
        for y in 0..height {
            for x in 0..width {
                data.extend_from_slice(&f(x, y));
            }
        }
        Self::new(width, height, data)
    }

    pub fn filled(width: usize, height: usize, rgb: [u8; 3]) -> Result<Self> {
        Self::from_fn(width, height, |_, _| rgb)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn len(&self) -> usize {
        self.width * self.height
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn pixel(&self, x: usize, y: usize) -> [u8; 3] {
        let i = (y * self.width + x) * 3;
        [self.data[i], self.data[i + 1], self.data[i + 2]]
    }

    pub fn set_pixel(&mut self, x: usize, y: usize, rgb: [u8; 3]) {
        let i = (y * self.width + x) * 3;
        self.data[i..i + 3].copy_from_slice(&rgb);
    }

    pub fn as_raw(&self) -> &[u8] {
        &self.data
    }

    pub fn as_raw_mut(&mut self) -> &mut [u8] {
        &mut self.data
    }

    pub fn into_raw(self) -> Vec<u8> {
        self.data
    }
}

/// Per-pixel CIELAB (D65) features with implicit pixel-centre coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct LabImage {
    width: usize,
    height: usize,
    data: Vec<[f64; 3]>,
}

impl LabImage {
    pub fn new(width: usize, height: usize, data: Vec<[f64; 3]>) -> Result<Self> {
        if width < MIN_EDGE || height < MIN_EDGE {
            return Err(Error::ImageTooSmall { width, height });
        }
        if data.len() != width * height {
            return Err(Error::InvalidParameter(format!(
                "{} lab pixels do not match {width}x{height}",
                data.len()
            )));
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn from_fn(
        width: usize,
        height: usize,
        mut f: impl FnMut(usize, usize) -> [f64; 3],
    ) -> Result<Self> {
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        Self::new(width, height, data)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    #[inline]
    pub fn lab(&self, index: usize) -> [f64; 3] {
        self.data[index]
    }

    #[inline]
    pub fn lab_at(&self, x: usize, y: usize) -> [f64; 3] {
        self.data[y * self.width + x]
    }

    /// Spatial coordinate `(x, y)` of the pixel at a row-major index.
    #[inline]
    pub fn position(&self, index: usize) -> (f64, f64) {
        let x = index % self.width;
        let y = index / self.width;
        (x as f64 + 0.5, y as f64 + 0.5)
    }

    /// Pixel containing the continuous coordinate `(x, y)`, clamped to the image.
    pub fn pixel_of(&self, x: f64, y: f64) -> (usize, usize) {
        let px = (x.floor().max(0.0) as usize).min(self.width - 1);
        let py = (y.floor().max(0.0) as usize).min(self.height - 1);
        (px, py)
    }

    pub fn pixels(&self) -> &[[f64; 3]] {
        &self.data
    }
}

/// Squared Lab gradient magnitude; border pixels are `+inf`.
#[derive(Debug, Clone, PartialEq)]
pub struct GradientMap {
    width: usize,
    height: usize,
    data: Vec<f64>,
}

impl GradientMap {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn at(&self, x: usize, y: usize) -> f64 {
        self.data[y * self.width + x]
    }

    pub fn values(&self) -> &[f64] {
        &self.data
    }
}

fn sq_dist3(a: [f64; 3], b: [f64; 3]) -> f64 {
    let d0 = a[0] - b[0];
    let d1 = a[1] - b[1];
    let d2 = a[2] - b[2];
    d0 * d0 + d1 * d1 + d2 * d2
}

/// Central-difference gradient `|x(right) - x(left)|^2 + |x(below) - x(above)|^2`.
pub fn compute_gradient(img: &LabImage) -> GradientMap {
    let (w, h) = img.dims();
    let mut data = vec![f64::INFINITY; w * h];
    for y in 1..h - 1 {
        for x in 1..w - 1 {
            let dx = sq_dist3(img.lab_at(x + 1, y), img.lab_at(x - 1, y));
            let dy = sq_dist3(img.lab_at(x, y + 1), img.lab_at(x, y - 1));
            data[y * w + x] = dx + dy;
        }
    }
    GradientMap {
        width: w,
        height: h,
        data,
    }
}
