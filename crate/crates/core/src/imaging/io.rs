use std::fs;
use std::path::Path;

use image::ImageFormat;

use super::RawImage;
use crate::connectivity::LabelMap;
use crate::error::{Error, Result};

/// Colour used for superpixel contours in overlays.
pub const CONTOUR_COLOR: [u8; 3] = [255, 0, 0];

fn io_err(path: &Path, source: std::io::Error) -> Error {
    Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Loads a PNG or PPM/PGM file; grayscale inputs are promoted to three channels.
pub fn load_image(path: impl AsRef<Path>) -> Result<RawImage> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| io_err(path, e))?;
    let format = image::guess_format(&bytes).map_err(|e| Error::Decode {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    if !matches!(format, ImageFormat::Png | ImageFormat::Pnm) {
        return Err(Error::Decode {
            path: path.to_path_buf(),
            message: format!("unsupported format {format:?}"),
        });
    }
    let decoded = image::load_from_memory_with_format(&bytes, format).map_err(|e| Error::Decode {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    let rgb = decoded.to_rgb8();
    let (w, h) = (rgb.width() as usize, rgb.height() as usize);
    RawImage::new(w, h, rgb.into_raw())
}

/// Writes an 8-bit RGB PNG.
pub fn save_image(img: &RawImage, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let buf = image::RgbImage::from_raw(img.width() as u32, img.height() as u32, img.as_raw().to_vec())
        .expect("buffer length checked by RawImage");
    buf.save_with_format(path, ImageFormat::Png)
        .map_err(|e| match e {
            image::ImageError::IoError(io) => io_err(path, io),
            other => Error::Encode {
                path: path.to_path_buf(),
                message: other.to_string(),
            },
        })
}

/// Draws `CONTOUR_COLOR` on every pixel whose label differs from its right or lower neighbour.
pub fn render_overlay(img: &RawImage, labels: &LabelMap, out: impl AsRef<Path>) -> Result<()> {
    let overlay = overlay_image(img, labels)?;
    save_image(&overlay, out)
}

pub(crate) fn overlay_image(img: &RawImage, labels: &LabelMap) -> Result<RawImage> {
    if (img.width(), img.height()) != labels.dims() {
        return Err(Error::DimensionMismatch {
            expected: (img.width(), img.height()),
            actual: labels.dims(),
        });
    }
    let mut out = img.clone();
    for (x, y) in labels.boundary_pixels() {
        out.set_pixel(x, y, CONTOUR_COLOR);
    }
    Ok(out)
}

/// Binary 16-bit PGM (P5, maxval 65535, big-endian samples).
pub fn write_label_map(labels: &LabelMap, out: impl AsRef<Path>) -> Result<()> {
    let path = out.as_ref();
    let (w, h) = labels.dims();
    let header = format!("P5\n{w} {h}\n65535\n");
    let mut bytes = Vec::with_capacity(header.len() + 2 * w * h);
    bytes.extend_from_slice(header.as_bytes());
    for &label in labels.as_slice() {
        let v = u16::try_from(label).map_err(|_| Error::LabelOverflow { label })?;
        bytes.extend_from_slice(&v.to_be_bytes());
    }
    fs::write(path, bytes).map_err(|e| io_err(path, e))
}

/// Reads a binary PGM label map (8-bit or 16-bit samples).
pub fn read_label_map(path: impl AsRef<Path>) -> Result<LabelMap> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| io_err(path, e))?;
    let malformed = |message: &str| Error::MalformedLabelMap {
        path: path.to_path_buf(),
        message: message.to_string(),
    };

    let mut pos = 0;
    let mut fields = Vec::with_capacity(4);
    while fields.len() < 4 {
        // skip whitespace and comments
        while pos < bytes.len() {
            match bytes[pos] {
                b'#' => {
                    while pos < bytes.len() && bytes[pos] != b'\n' {
                        pos += 1;
                    }
                }
                c if c.is_ascii_whitespace() => pos += 1,
                _ => break,
            }
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if start == pos {
            return Err(malformed("truncated header"));
        }
        fields.push(std::str::from_utf8(&bytes[start..pos]).map_err(|_| malformed("bad header"))?);
    }
    if fields[0] != "P5" {
        return Err(malformed("expected binary PGM (P5)"));
    }
    let parse = |s: &str| s.parse::<usize>().map_err(|_| malformed("bad header number"));
    let (w, h, maxval) = (parse(fields[1])?, parse(fields[2])?, parse(fields[3])?);
    if maxval == 0 || maxval > 65535 {
        return Err(malformed("maxval out of range"));
    }
    // exactly one whitespace byte separates the header from the raster
    pos += 1;
    let sample = if maxval > 255 { 2 } else { 1 };
    let raster = bytes.get(pos..).unwrap_or(&[]);
    if raster.len() < w * h * sample {
        return Err(malformed("truncated raster"));
    }
    let labels = if sample == 2 {
        raster
            .chunks_exact(2)
            .take(w * h)
            .map(|c| u16::from_be_bytes([c[0], c[1]]) as u32)
            .collect()
    } else {
        raster[..w * h].iter().map(|&v| v as u32).collect()
    };
    LabelMap::new(w, h, labels)
}
