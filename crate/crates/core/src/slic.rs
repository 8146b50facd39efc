//! Baseline SLIC: local K-means in labxy space.
//!
//! Uses the same seeding, perturbation, windows, distance and connectivity
//! enforcement as the fuzzy pipeline so the two differ only in how pixels
//! are assigned and centroids are weighted.

use crate::clustering::{
    apply_sums, grid_interval, initialize_seeds, labxy_distance, perturb_seeds, search_window, ClusterCentroid,
    Segmentation, SegmentationConfig,
};
use crate::connectivity::{enforce_connectivity, LabelMap};
use crate::error::Result;
use crate::imaging::{compute_gradient, LabImage};

const UNASSIGNED: u32 = u32::MAX;

/// Nearest-centroid assignment within `2S x 2S` windows. A pixel outside
/// every window keeps its previous label; on the first pass it takes its
/// globally nearest centroid.
pub fn assign_nearest(
    img: &LabImage,
    centroids: &[ClusterCentroid],
    labels: &mut [u32],
    best: &mut [f64],
    s: f64,
    compactness: f64,
) {
    let (w, h) = img.dims();
    best.fill(f64::INFINITY);
    for (j, c) in centroids.iter().enumerate() {
        let Some((x0, x1, y0, y1)) = search_window(c, s, w, h) else {
            continue;
        };
        for y in y0..=y1 {
            for x in x0..=x1 {
                let i = y * w + x;
                let d = labxy_distance(img.lab(i), (x as f64 + 0.5, y as f64 + 0.5), c, s, compactness);
                if d < best[i] {
                    best[i] = d;
                    labels[i] = j as u32;
                }
            }
        }
    }
    for i in 0..labels.len() {
        if labels[i] != UNASSIGNED {
            continue;
        }
        let (lab, pos) = (img.lab(i), img.position(i));
        if let Some((_, j)) = centroids
            .iter()
            .enumerate()
            .map(|(j, c)| (labxy_distance(lab, pos, c, s, compactness), j))
            .min_by(|a, b| a.0.total_cmp(&b.0))
        {
            labels[i] = j as u32;
        }
    }
}

/// Arithmetic labxy means of the assigned pixels; returns the mean displacement.
pub fn update_means(img: &LabImage, labels: &[u32], centroids: &mut [ClusterCentroid]) -> f64 {
    let mut sums = vec![[0.0f64; 6]; centroids.len()];
    for (i, &l) in labels.iter().enumerate() {
        let lab = img.lab(i);
        let (x, y) = img.position(i);
        let acc = &mut sums[l as usize];
        acc[0] += 1.0;
        acc[1] += lab[0];
        acc[2] += lab[1];
        acc[3] += lab[2];
        acc[4] += x;
        acc[5] += y;
    }
    apply_sums(centroids, &sums)
}

pub fn slic_segment(img: &LabImage, cfg: &SegmentationConfig) -> Result<Segmentation> {
    cfg.check_image(img)?;
    let (w, h) = img.dims();
    let n = img.len();
    let s = grid_interval(n, cfg.clusters);
    let seeds = initialize_seeds(img, cfg.clusters)?;
    let mut centroids = perturb_seeds(img, &seeds, &compute_gradient(img));

    let mut labels = vec![UNASSIGNED; n];
    let mut best = vec![f64::INFINITY; n];
    let mut iterations = 0;
    for iteration in 0..cfg.max_iterations {
        iterations = iteration + 1;
        assign_nearest(img, &centroids, &mut labels, &mut best, s, cfg.compactness);
        let residual = update_means(img, &labels, &mut centroids);
        if residual < cfg.residual_threshold {
            break;
        }
    }

    let raw = LabelMap::new(w, h, labels)?;
    let (labels, superpixels) = enforce_connectivity(&raw, n as f64 / cfg.clusters as f64);
    Ok(Segmentation {
        labels,
        superpixels,
        seeds: centroids.len(),
        iterations,
    })
}
