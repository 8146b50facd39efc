//! Deterministic synthetic images with known region labels, used as a
//! stand-in benchmark corpus.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::connectivity::LabelMap;
use crate::error::{Error, Result};
use crate::imaging::RawImage;

/// An RGB image with the region map it was painted from.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticImage {
    pub image: RawImage,
    pub gt: LabelMap,
}

/// Voronoi partition of `w x h` around `regions` random sites.
fn voronoi(w: usize, h: usize, regions: usize, rng: &mut ChaCha8Rng) -> Result<LabelMap> {
    if regions == 0 {
        return Err(Error::InvalidParameter("at least one region required".into()));
    }
    let sites: Vec<(f64, f64)> = (0..regions)
        .map(|_| (rng.gen_range(0.0..w as f64), rng.gen_range(0.0..h as f64)))
        .collect();
    LabelMap::from_fn(w, h, |x, y| {
        let (px, py) = (x as f64 + 0.5, y as f64 + 0.5);
        let mut best = (f64::INFINITY, 0);
        for (k, &(sx, sy)) in sites.iter().enumerate() {
            let d = (px - sx).powi(2) + (py - sy).powi(2);
            if d < best.0 {
                best = (d, k);
            }
        }
        best.1 as u32
    })
}

/// Region colours spread so neighbouring regions rarely look alike.
fn palette(regions: usize, rng: &mut ChaCha8Rng) -> Vec<[u8; 3]> {
    (0..regions)
        .map(|_| [rng.gen_range(20..236), rng.gen_range(20..236), rng.gen_range(20..236)])
        .collect()
}

/// Flat-coloured Voronoi regions.
pub fn piecewise_constant(w: usize, h: usize, regions: usize, seed: u64) -> Result<SyntheticImage> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let gt = voronoi(w, h, regions, &mut rng)?;
    let colors = palette(regions, &mut rng);
    let image = RawImage::from_fn(w, h, |x, y| colors[gt.get(x, y) as usize])?;
    let (gt, _) = gt.densified();
    Ok(SyntheticImage { image, gt })
}

/// Smooth lattice noise in `[0, 1)`.
struct ValueNoise {
    cells: usize,
    lattice: Vec<f64>,
}

impl ValueNoise {
    fn new(cells: usize, rng: &mut ChaCha8Rng) -> Self {
        let lattice = (0..(cells + 1) * (cells + 1)).map(|_| rng.gen::<f64>()).collect();
        Self { cells, lattice }
    }

    /// `u, v` in `[0, 1]`.
    fn sample(&self, u: f64, v: f64) -> f64 {
        let (fx, fy) = (u * self.cells as f64, v * self.cells as f64);
        let (x0, y0) = ((fx as usize).min(self.cells - 1), (fy as usize).min(self.cells - 1));
        let smooth = |t: f64| t * t * (3.0 - 2.0 * t);
        let (tx, ty) = (smooth(fx - x0 as f64), smooth(fy - y0 as f64));
        let at = |x: usize, y: usize| self.lattice[y * (self.cells + 1) + x];
        let top = at(x0, y0) * (1.0 - tx) + at(x0 + 1, y0) * tx;
        let bottom = at(x0, y0 + 1) * (1.0 - tx) + at(x0 + 1, y0 + 1) * tx;
        top * (1.0 - ty) + bottom * ty
    }
}

/// Voronoi regions with per-region shading gradients and multi-octave
/// texture, loosely resembling a natural photograph.
pub fn textured(w: usize, h: usize, regions: usize, seed: u64) -> Result<SyntheticImage> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let gt = voronoi(w, h, regions, &mut rng)?;
    let colors = palette(regions, &mut rng);
    let slopes: Vec<(f64, f64)> = (0..regions)
        .map(|_| (rng.gen_range(-25.0..25.0), rng.gen_range(-25.0..25.0)))
        .collect();
    let octaves: Vec<(ValueNoise, f64)> = [(4, 18.0), (16, 9.0), (48, 5.0)]
        .into_iter()
        .map(|(cells, amp)| (ValueNoise::new(cells, &mut rng), amp))
        .collect();
    let image = RawImage::from_fn(w, h, |x, y| {
        let k = gt.get(x, y) as usize;
        let (u, v) = (x as f64 / w as f64, y as f64 / h as f64);
        let shade = slopes[k].0 * (u - 0.5) + slopes[k].1 * (v - 0.5);
        let texture: f64 = octaves.iter().map(|(n, amp)| (n.sample(u, v) - 0.5) * amp).sum();
        colors[k].map(|c| (c as f64 + shade + texture).round().clamp(0.0, 255.0) as u8)
    })?;
    let (gt, _) = gt.densified();
    Ok(SyntheticImage { image, gt })
}

/// Which generator a corpus entry used.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SyntheticKind {
    PiecewiseConstant,
    Textured,
}

/// `count` images alternating between the two generators, with sizes drawn
/// between 128x128 and 321x481 (either orientation).
pub fn mixed_corpus(count: usize, seed: u64) -> Result<Vec<(SyntheticKind, SyntheticImage)>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| {
            let (a, b) = (rng.gen_range(128..=321), rng.gen_range(128..=481));
            let (w, h) = if rng.gen_bool(0.5) { (a, b) } else { (b, a) };
            let regions = rng.gen_range(6..24);
            let sub = rng.gen::<u64>();
            if i % 2 == 0 {
                Ok((SyntheticKind::PiecewiseConstant, piecewise_constant(w, h, regions, sub)?))
            } else {
                Ok((SyntheticKind::Textured, textured(w, h, regions, sub)?))
            }
        })
        .collect()
}
