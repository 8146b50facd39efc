use palette::white_point::D65;
use palette::{FromColor, Lab, Srgb};

use super::{LabImage, RawImage};

/// Converts one 8-bit sRGB triple to CIELAB under D65.
pub fn srgb_pixel_to_lab(rgb: [u8; 3]) -> [f64; 3] {
    let srgb = Srgb::new(rgb[0], rgb[1], rgb[2]).into_format::<f64>();
    let lab: Lab<D65, f64> = Lab::from_color(srgb.into_linear());
    [lab.l.clamp(0.0, 100.0), lab.a, lab.b]
}

pub fn rgb_to_lab(img: &RawImage) -> LabImage {
    let mut cache = std::collections::HashMap::new();
    let data = img
        .as_raw()
        .chunks_exact(3)
        .map(|c| {
            let key = [c[0], c[1], c[2]];
            *cache.entry(key).or_insert_with(|| srgb_pixel_to_lab(key))
        })
        .collect();
    LabImage::new(img.width(), img.height(), data).expect("dimensions validated by RawImage")
}
