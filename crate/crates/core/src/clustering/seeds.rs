//! Grid seeding, gradient perturbation and the labxy distance.

use crate::error::{Error, Result};
use crate::imaging::{GradientMap, LabImage};

/// Cluster centre in labxy space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClusterCentroid {
    pub l: f64,
    pub a: f64,
    pub b: f64,
    pub x: f64,
    pub y: f64,
}

impl ClusterCentroid {
    pub fn new(lab: [f64; 3], x: f64, y: f64) -> Self {
        Self {
            l: lab[0],
            a: lab[1],
            b: lab[2],
            x,
            y,
        }
    }

    pub fn lab(&self) -> [f64; 3] {
        [self.l, self.a, self.b]
    }
}

/// Grid interval `sqrt(N / m)`.
pub fn grid_interval(pixels: usize, clusters: usize) -> f64 {
    (pixels as f64 / clusters as f64).sqrt()
}

fn seeds_along(extent: usize, s: f64) -> Vec<f64> {
    let count = ((extent as f64 / s + 1e-9).floor() as usize).max(1);
    (0..count)
        .map(|i| {
            let c = s / 2.0 + i as f64 * s;
            if c < extent as f64 {
                c
            } else {
                extent as f64 / 2.0
            }
        })
        .collect()
}

/// Places `floor(w/S) * floor(h/S)` seeds at `(S/2 + iS, S/2 + jS)`.
pub fn initialize_seeds(img: &LabImage, clusters: usize) -> Result<Vec<ClusterCentroid>> {
    let n = img.len();
    if clusters == 0 {
        return Err(Error::InvalidParameter("cluster count must be at least 1".into()));
    }
    if clusters > n {
        return Err(Error::TooManyClusters {
            requested: clusters,
            pixels: n,
        });
    }
    let s = grid_interval(n, clusters);
    let xs = seeds_along(img.width(), s);
    let ys = seeds_along(img.height(), s);
    let mut seeds = Vec::with_capacity(xs.len() * ys.len());
    for &y in &ys {
        for &x in &xs {
            let (px, py) = img.pixel_of(x, y);
            seeds.push(ClusterCentroid::new(img.lab_at(px, py), x, y));
        }
    }
    Ok(seeds)
}

/// Moves each seed to the lowest-gradient pixel of its 3x3 neighbourhood.
/// Ties keep the current position.
pub fn perturb_seeds(img: &LabImage, seeds: &[ClusterCentroid], grad: &GradientMap) -> Vec<ClusterCentroid> {
    let (w, h) = img.dims();
    seeds
        .iter()
        .map(|seed| {
            let (px, py) = img.pixel_of(seed.x, seed.y);
            let mut best = (px, py);
            let mut best_g = grad.at(px, py);
            for ny in py.saturating_sub(1)..=(py + 1).min(h - 1) {
                for nx in px.saturating_sub(1)..=(px + 1).min(w - 1) {
                    let g = grad.at(nx, ny);
                    if g < best_g {
                        best_g = g;
                        best = (nx, ny);
                    }
                }
            }
            if best == (px, py) {
                *seed
            } else {
                ClusterCentroid::new(img.lab_at(best.0, best.1), best.0 as f64 + 0.5, best.1 as f64 + 0.5)
            }
        })
        .collect()
}

/// SLIC distance `sqrt(d_lab^2 + (C/S)^2 d_xy^2)`.
#[inline]
pub fn labxy_distance(lab: [f64; 3], pos: (f64, f64), centroid: &ClusterCentroid, s: f64, compactness: f64) -> f64 {
    let spatial_weight = (compactness / s).powi(2);
    labxy_distance_sq(lab, pos, centroid, spatial_weight).sqrt()
}

#[inline]
pub(crate) fn labxy_distance_sq(lab: [f64; 3], pos: (f64, f64), c: &ClusterCentroid, spatial_weight: f64) -> f64 {
    let dl = lab[0] - c.l;
    let da = lab[1] - c.a;
    let db = lab[2] - c.b;
    let dx = pos.0 - c.x;
    let dy = pos.1 - c.y;
    dl * dl + da * da + db * db + spatial_weight * (dx * dx + dy * dy)
}

/// Inclusive pixel ranges whose centres lie in the `2S x 2S` square around `c`.
#[inline]
pub fn search_window(c: &ClusterCentroid, s: f64, width: usize, height: usize) -> Option<(usize, usize, usize, usize)> {
    let span = |centre: f64, extent: usize| {
        let lo = (centre - s - 0.5).ceil().max(0.0);
        let hi = (centre + s - 0.5).floor().min(extent as f64 - 1.0);
        (lo <= hi).then_some((lo as usize, hi as usize))
    };
    let (x0, x1) = span(c.x, width)?;
    let (y0, y1) = span(c.y, height)?;
    Some((x0, x1, y0, y1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::imaging::compute_gradient;

    fn flat(w: usize, h: usize) -> LabImage {
        LabImage::from_fn(w, h, |_, _| [50.0, 0.0, 0.0]).unwrap()
    }

    #[test]
    fn grid_counts() {
        let img = flat(320, 480);
        let s = grid_interval(img.len(), 300);
        assert!((s - 512f64.sqrt()).abs() < 1e-12);
        assert_eq!(initialize_seeds(&img, 300).unwrap().len(), 14 * 21);

        let img = flat(10, 10);
        let seeds = initialize_seeds(&img, 100).unwrap();
        assert_eq!(seeds.len(), 100);
        let mut pixels: Vec<_> = seeds.iter().map(|c| img.pixel_of(c.x, c.y)).collect();
        pixels.sort();
        pixels.dedup();
        assert_eq!(pixels.len(), 100);

        assert!(matches!(
            initialize_seeds(&img, 101),
            Err(Error::TooManyClusters { .. })
        ));
        assert!(initialize_seeds(&img, 0).is_err());
    }

    #[test]
    fn seeds_sit_on_cell_centres() {
        let img = flat(64, 64);
        let seeds = initialize_seeds(&img, 16).unwrap();
        let xs: Vec<f64> = seeds.iter().take(4).map(|c| c.x).collect();
        assert_eq!(xs, vec![8.0, 24.0, 40.0, 56.0]);
        assert!(seeds.iter().all(|c| c.x > 0.0 && c.x < 64.0 && c.y > 0.0 && c.y < 64.0));
    }

    #[test]
    fn degenerate_single_cluster() {
        let img = flat(100, 3);
        // S is about 17.3: five columns fit, the short axis is clamped to one row
        let seeds = initialize_seeds(&img, 1).unwrap();
        assert_eq!(seeds.len(), 5);
        assert!(seeds.iter().all(|c| c.y == 1.5));
    }

    #[test]
    fn perturb_constant_image_is_identity() {
        let img = flat(40, 40);
        let seeds = initialize_seeds(&img, 16).unwrap();
        let moved = perturb_seeds(&img, &seeds, &compute_gradient(&img));
        assert_eq!(seeds, moved);
    }

    #[test]
    fn perturb_moves_off_edge() {
        // step edge between columns 4 and 5: gradient 100 at columns 4 and 5
        let img = LabImage::from_fn(10, 10, |x, _| [if x < 5 { 0.0 } else { 10.0 }, 0.0, 0.0]).unwrap();
        let grad = compute_gradient(&img);
        assert_eq!(grad.at(4, 4), 100.0);
        let seed = ClusterCentroid::new(img.lab_at(4, 4), 4.5, 4.5);
        let moved = perturb_seeds(&img, &[seed], &grad)[0];
        let (px, py) = img.pixel_of(moved.x, moved.y);
        assert_eq!(grad.at(px, py), 0.0);
        assert_eq!(px, 3);
        assert_eq!(py, 3);
        assert_eq!(moved.lab(), img.lab_at(3, 3));
    }

    #[test]
    fn perturb_never_lands_on_border() {
        let img = LabImage::from_fn(6, 6, |x, y| [(x * y) as f64, 0.0, 0.0]).unwrap();
        let grad = compute_gradient(&img);
        let seed = ClusterCentroid::new(img.lab_at(1, 1), 1.5, 1.5);
        let moved = perturb_seeds(&img, &[seed], &grad)[0];
        let (px, py) = img.pixel_of(moved.x, moved.y);
        assert!(px >= 1 && py >= 1 && px <= 4 && py <= 4);
    }

    #[test]
    fn distance_examples() {
        let c = ClusterCentroid::new([10.0, 20.0, 30.0], 4.0, 5.0);
        assert_eq!(labxy_distance([10.0, 20.0, 30.0], (4.0, 5.0), &c, 7.0, 15.0), 0.0);
        assert_eq!(labxy_distance([13.0, 24.0, 30.0], (4.0, 5.0), &c, 7.0, 15.0), 5.0);
        let d = labxy_distance([10.0, 20.0, 30.0], (11.0, 5.0), &c, 7.0, 15.0);
        assert!((d - 15.0).abs() < 1e-12);
    }

    #[test]
    fn window_spans_two_intervals() {
        let c = ClusterCentroid::new([0.0; 3], 24.0, 8.0);
        assert_eq!(search_window(&c, 16.0, 64, 64), Some((8, 39, 0, 23)));
    }
}
