//! Boundary recall, under-segmentation error, compactness, count variance
//! and normalised AUC.

use std::collections::HashMap;
use std::f64::consts::PI;

use crate::connectivity::LabelMap;
use crate::error::{Error, Result};

/// Ground-truth region labels share the label-map representation.
pub type GroundTruth = LabelMap;

/// Default Chebyshev tolerance for [`boundary_recall`].
pub const DEFAULT_EPS: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricReport {
    pub br: f64,
    pub ue: f64,
    pub co: f64,
    pub m_p: usize,
    pub runtime: f64,
}

impl MetricReport {
    /// Scores `labels` against `gt` with the default tolerance.
    pub fn evaluate(labels: &LabelMap, gt: &GroundTruth, runtime: f64) -> Result<Self> {
        Ok(Self {
            br: boundary_recall(labels, gt, DEFAULT_EPS)?,
            ue: under_segmentation_error(labels, gt)?,
            co: compactness(labels),
            m_p: labels.distinct_count(),
            runtime,
        })
    }
}

fn check_dims(labels: &LabelMap, gt: &GroundTruth) -> Result<()> {
    if labels.dims() != gt.dims() {
        return Err(Error::DimensionMismatch {
            expected: gt.dims(),
            actual: labels.dims(),
        });
    }
    Ok(())
}

/// Fraction of gt boundary pixels with a predicted boundary pixel within
/// Chebyshev distance `eps`. A gt without boundaries scores 1.
pub fn boundary_recall(labels: &LabelMap, gt: &GroundTruth, eps: usize) -> Result<f64> {
    check_dims(labels, gt)?;
    let (w, h) = labels.dims();
    // 2-D prefix sums of the predicted boundary mask give O(1) window queries.
    let mut integral = vec![0u32; (w + 1) * (h + 1)];
    for y in 0..h {
        let mut row = 0;
        for x in 0..w {
            row += labels.is_boundary(x, y) as u32;
            integral[(y + 1) * (w + 1) + x + 1] = integral[y * (w + 1) + x + 1] + row;
        }
    }
    let window = |x0: usize, y0: usize, x1: usize, y1: usize| {
        let at = |x: usize, y: usize| integral[y * (w + 1) + x];
        at(x1, y1) + at(x0, y0) - at(x0, y1) - at(x1, y0)
    };

    let (mut total, mut hit) = (0usize, 0usize);
    for (x, y) in gt.boundary_pixels() {
        total += 1;
        let (x0, y0) = (x.saturating_sub(eps), y.saturating_sub(eps));
        let (x1, y1) = ((x + eps + 1).min(w), (y + eps + 1).min(h));
        if window(x0, y0, x1, y1) > 0 {
            hit += 1;
        }
    }
    Ok(if total == 0 { 1.0 } else { hit as f64 / total as f64 })
}

/// `(1/N) sum_g sum_s min(|s & g|, |s \ g|)` over overlapping pairs.
pub fn under_segmentation_error(labels: &LabelMap, gt: &GroundTruth) -> Result<f64> {
    check_dims(labels, gt)?;
    let mut overlap: HashMap<(u32, u32), usize> = HashMap::new();
    let mut size: HashMap<u32, usize> = HashMap::new();
    for (&s, &g) in labels.as_slice().iter().zip(gt.as_slice()) {
        *overlap.entry((g, s)).or_default() += 1;
        *size.entry(s).or_default() += 1;
    }
    let leak: usize = overlap
        .iter()
        .map(|(&(_, s), &inside)| inside.min(size[&s] - inside))
        .sum();
    Ok(leak as f64 / labels.len() as f64)
}

/// Area-weighted isoperimetric quotient `4 pi A / P^2`, each capped at 1.
/// Perimeters count unit pixel edges, image border included.
pub fn compactness(labels: &LabelMap) -> f64 {
    let (w, h) = labels.dims();
    let mut stats: HashMap<u32, (usize, usize)> = HashMap::new();
    for y in 0..h {
        for x in 0..w {
            let l = labels.get(x, y);
            let differs = |nx: Option<usize>, ny: Option<usize>| match (nx, ny) {
                (Some(nx), Some(ny)) if nx < w && ny < h => labels.get(nx, ny) != l,
                _ => true,
            };
            let edges = differs(x.checked_sub(1), Some(y)) as usize
                + differs(Some(x + 1), Some(y)) as usize
                + differs(Some(x), y.checked_sub(1)) as usize
                + differs(Some(x), Some(y + 1)) as usize;
            let e = stats.entry(l).or_default();
            e.0 += 1;
            e.1 += edges;
        }
    }
    let n = labels.len() as f64;
    stats
        .values()
        .map(|&(area, perim)| {
            let q = 4.0 * PI * area as f64 / (perim * perim) as f64;
            area as f64 / n * q.min(1.0)
        })
        .sum()
}

/// Population variance of superpixel counts.
pub fn vsn(counts: &[usize]) -> Result<f64> {
    if counts.is_empty() {
        return Err(Error::EmptyInput("superpixel counts"));
    }
    let n = counts.len() as f64;
    let mean = counts.iter().map(|&c| c as f64).sum::<f64>() / n;
    Ok(counts.iter().map(|&c| (c as f64 - mean).powi(2)).sum::<f64>() / n)
}

/// Trapezoidal area under `(xs, ys)` divided by the x extent.
pub fn normalized_auc(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() {
        return Err(Error::InvalidParameter(format!(
            "{} x values but {} y values",
            xs.len(),
            ys.len()
        )));
    }
    if xs.len() < 2 {
        return Err(Error::EmptyInput("curve needs at least two points"));
    }
    if xs.windows(2).any(|p| !(p[1] > p[0])) {
        return Err(Error::NonMonotone);
    }
    let area: f64 = xs
        .windows(2)
        .zip(ys.windows(2))
        .map(|(x, y)| (x[1] - x[0]) * (y[0] + y[1]) / 2.0)
        .sum();
    Ok(area / (xs[xs.len() - 1] - xs[0]))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn columns(w: usize, h: usize, split: usize) -> LabelMap {
        LabelMap::from_fn(w, h, |x, _| (x > split) as u32).unwrap()
    }

    #[test]
    fn br_identity_and_offsets() {
        let gt = columns(12, 6, 5);
        assert_eq!(boundary_recall(&gt, &gt, 2).unwrap(), 1.0);
        assert_eq!(boundary_recall(&columns(12, 6, 8), &gt, 2).unwrap(), 0.0);
        assert_eq!(boundary_recall(&columns(12, 6, 6), &gt, 2).unwrap(), 1.0);
        assert_eq!(boundary_recall(&columns(12, 6, 7), &gt, 2).unwrap(), 1.0);
        assert_eq!(boundary_recall(&columns(12, 6, 7), &gt, 1).unwrap(), 0.0);
    }

    #[test]
    fn br_without_gt_boundaries_is_one() {
        let gt = LabelMap::from_fn(5, 5, |_, _| 3).unwrap();
        let pred = LabelMap::from_fn(5, 5, |x, y| (x + y) as u32).unwrap();
        assert_eq!(boundary_recall(&pred, &gt, 0).unwrap(), 1.0);
    }

    #[test]
    fn br_dimension_mismatch() {
        let a = columns(6, 6, 2);
        let b = columns(7, 6, 2);
        assert!(matches!(boundary_recall(&a, &b, 2), Err(Error::DimensionMismatch { .. })));
        assert!(under_segmentation_error(&a, &b).is_err());
    }

    #[test]
    fn ue_examples() {
        let gt = LabelMap::from_fn(10, 10, |x, _| (x >= 5) as u32).unwrap();
        assert_eq!(under_segmentation_error(&gt, &gt).unwrap(), 0.0);
        let single = LabelMap::from_fn(10, 10, |_, _| 0).unwrap();
        assert_eq!(under_segmentation_error(&single, &gt).unwrap(), 1.0);
        let finer = LabelMap::from_fn(10, 10, |x, y| (x / 5 + 2 * (y / 3)) as u32).unwrap();
        assert_eq!(under_segmentation_error(&finer, &gt).unwrap(), 0.0);
    }

    #[test]
    fn co_examples() {
        let single = LabelMap::from_fn(10, 10, |_, _| 0).unwrap();
        assert!((compactness(&single) - PI / 4.0).abs() < 1e-12);
        for k in [1, 2, 4, 5] {
            let tiles = LabelMap::from_fn(20, 20, |x, y| ((y / k) * 20 + x / k) as u32).unwrap();
            assert!((compactness(&tiles) - PI / 4.0).abs() < 1e-12, "k = {k}");
        }
        let stripes = LabelMap::from_fn(10, 6, |_, y| y as u32).unwrap();
        let expected = 4.0 * PI * 10.0 / (22.0 * 22.0);
        assert!((compactness(&stripes) - expected).abs() < 1e-12);
        assert!((expected - 0.2596).abs() < 1e-4);
    }

    #[test]
    fn vsn_examples() {
        assert_eq!(vsn(&[100, 100, 100]).unwrap(), 0.0);
        assert_eq!(vsn(&[100, 102]).unwrap(), 1.0);
        assert_eq!(vsn(&[7]).unwrap(), 0.0);
        assert!(vsn(&[]).is_err());
    }

    #[test]
    fn auc_examples() {
        assert!((normalized_auc(&[50.0, 80.0, 200.0], &[0.8; 3]).unwrap() - 0.8).abs() < 1e-12);
        assert!((normalized_auc(&[100.0, 300.0], &[0.0, 1.0]).unwrap() - 0.5).abs() < 1e-12);
        assert!(normalized_auc(&[100.0], &[0.5]).is_err());
        assert!(matches!(normalized_auc(&[1.0, 1.0], &[0.0, 1.0]), Err(Error::NonMonotone)));
        assert!(normalized_auc(&[1.0, 2.0], &[0.0]).is_err());
    }

    #[test]
    fn report_ranges() {
        let gt = columns(16, 16, 7);
        let pred = LabelMap::from_fn(16, 16, |x, y| (x / 3 + 10 * (y / 4)) as u32).unwrap();
        let r = MetricReport::evaluate(&pred, &gt, 0.5).unwrap();
        assert!((0.0..=1.0).contains(&r.br));
        assert!(r.ue >= 0.0);
        assert!((0.0..=1.0).contains(&r.co));
        assert_eq!(r.m_p, pred.distinct_count());
    }
}
