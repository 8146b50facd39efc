//! Seeded noise injection on normalised RGB intensities.

use std::fmt;
use std::str::FromStr;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::imaging::RawImage;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NoiseKind {
    Gaussian,
    Multiplicative,
    SaltPepper,
}

impl NoiseKind {
    pub fn name(self) -> &'static str {
        match self {
            NoiseKind::Gaussian => "gaussian",
            NoiseKind::Multiplicative => "multiplicative",
            NoiseKind::SaltPepper => "saltpepper",
        }
    }
}

impl fmt::Display for NoiseKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for NoiseKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gaussian" => Ok(NoiseKind::Gaussian),
            "multiplicative" => Ok(NoiseKind::Multiplicative),
            "saltpepper" | "salt_pepper" | "salt-pepper" => Ok(NoiseKind::SaltPepper),
            other => Err(Error::InvalidParameter(format!("unknown noise kind '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    pub kind: NoiseKind,
    /// Standard deviation for the Gaussian kinds, density for salt and pepper.
    pub level: f64,
    pub seed: u64,
}

impl NoiseSpec {
    pub fn new(kind: NoiseKind, level: f64, seed: u64) -> Result<Self> {
        let spec = Self { kind, level, seed };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.level >= 0.0 && self.level.is_finite()) {
            return Err(Error::InvalidParameter(format!("noise level {} must be >= 0", self.level)));
        }
        if self.kind == NoiseKind::SaltPepper && self.level > 1.0 {
            return Err(Error::InvalidParameter(format!(
                "salt-and-pepper density {} must be <= 1",
                self.level
            )));
        }
        Ok(())
    }

    pub fn apply(&self, img: &RawImage) -> Result<RawImage> {
        self.validate()?;
        Ok(match self.kind {
            NoiseKind::Gaussian => add_gaussian(img, self.level, self.seed),
            NoiseKind::Multiplicative => add_multiplicative(img, self.level, self.seed),
            NoiseKind::SaltPepper => add_salt_pepper(img, self.level, self.seed),
        })
    }
}

/// Clamps to `[0, 1]` and quantises with round-half-up.
#[inline]
pub fn quantize(v: f64) -> u8 {
    (v.clamp(0.0, 1.0) * 255.0 + 0.5).floor() as u8
}

/// Applies `f(intensity, n)` with `n ~ N(0, std^2)` drawn channel-major, then row-major.
fn perturb(img: &RawImage, std: f64, seed: u64, f: impl Fn(f64, f64) -> f64) -> RawImage {
    if std == 0.0 {
        return img.clone();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, std).expect("std validated non-negative");
    let mut out = img.clone();
    let data = out.as_raw_mut();
    for channel in 0..3 {
        for p in 0..img.len() {
            let i = p * 3 + channel;
            let n = normal.sample(&mut rng);
            data[i] = quantize(f(data[i] as f64 / 255.0, n));
        }
    }
    out
}

/// Additive zero-mean Gaussian noise.
pub fn add_gaussian(img: &RawImage, std: f64, seed: u64) -> RawImage {
    perturb(img, std, seed, |v, n| v + n)
}

/// `i * (1 + n)` with zero-mean Gaussian `n`.
pub fn add_multiplicative(img: &RawImage, std: f64, seed: u64) -> RawImage {
    perturb(img, std, seed, |v, n| v * (1.0 + n))
}

/// Sets exactly `round(density * N)` distinct pixels to black or white.
pub fn add_salt_pepper(img: &RawImage, density: f64, seed: u64) -> RawImage {
    let n = img.len();
    let count = ((density.clamp(0.0, 1.0) * n as f64).round() as usize).min(n);
    let mut out = img.clone();
    if count == 0 {
        return out;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let chosen = index::sample(&mut rng, n, count);
    let data = out.as_raw_mut();
    for p in chosen.iter() {
        let v = if rng.gen_bool(0.5) { 255 } else { 0 };
        data[p * 3..p * 3 + 3].fill(v);
    }
    out
}
