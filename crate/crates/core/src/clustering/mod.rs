//! Fuzzy SLIC: grid-seeded local spatial fuzzy C-means with at most three
//! candidate labels per pixel.
//!
//! One iteration of [`fuzzy_slic`] runs, in order:
//!
//! 1. [`assignment_pass`]: every pixel in the `2S x 2S` window of each
//!    centroid is offered to it; the three closest offers are kept.
//! 2. [`update_membership`]: fuzzy memberships `U` from the candidate distances.
//! 3. [`spatial_function`]: `H`, the sum of the 8 neighbours' memberships.
//! 4. [`combine_membership`]: `U'` from `U^p H^q`.
//! 5. [`update_centroids`]: `U'^t`-weighted labxy means.
//!
//! Iteration stops when the mean centroid displacement falls below the
//! residual threshold or the iteration cap is hit. Pixels are then hard
//! assigned by largest `U'` and connectivity is enforced.

mod lsfcm;
mod seeds;
mod table;

pub use lsfcm::{combine_membership, hard_assign, spatial_function, update_centroids, update_membership, FuzzyPartition};
pub(crate) use lsfcm::apply_sums;
pub use seeds::{grid_interval, initialize_seeds, labxy_distance, perturb_seeds, search_window, ClusterCentroid};
pub use table::{assignment_pass, CandidateTable, MAX_LABELS};

use crate::connectivity::{enforce_connectivity, LabelMap};
use crate::error::{Error, Result};
use crate::imaging::{compute_gradient, LabImage};

/// Parameters shared by every segmentation pipeline.
#[derive(Debug, Clone, PartialEq)]
pub struct SegmentationConfig {
    /// Requested cluster count `m`.
    pub clusters: usize,
    /// Compactness coefficient `C`.
    pub compactness: f64,
    /// Fuzzy exponent `t > 1`.
    pub fuzziness: f64,
    /// Exponent on the pixel's own membership.
    pub membership_exponent: f64,
    /// Exponent on the spatial function.
    pub spatial_exponent: f64,
    pub max_iterations: usize,
    /// Mean centroid displacement, in pixels, below which iteration stops.
    pub residual_threshold: f64,
    pub rng_seed: u64,
}

impl SegmentationConfig {
    pub const FUZZY_SLIC_COMPACTNESS: f64 = 15.0;
    pub const FUZZY_SLICNC_COMPACTNESS: f64 = 13.0;
    pub const SLIC_COMPACTNESS: f64 = 20.0;

    pub fn new(clusters: usize, compactness: f64) -> Self {
        Self {
            clusters,
            compactness,
            fuzziness: 2.0,
            membership_exponent: 0.0,
            spatial_exponent: 2.0,
            max_iterations: 10,
            residual_threshold: 0.25,
            rng_seed: 0,
        }
    }

    pub fn fuzzy_slic(clusters: usize) -> Self {
        Self::new(clusters, Self::FUZZY_SLIC_COMPACTNESS)
    }

    pub fn fuzzy_slicnc(clusters: usize) -> Self {
        Self::new(clusters, Self::FUZZY_SLICNC_COMPACTNESS)
    }

    pub fn slic(clusters: usize) -> Self {
        Self::new(clusters, Self::SLIC_COMPACTNESS)
    }

    pub fn with_clusters(&self, clusters: usize) -> Self {
        Self {
            clusters,
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidParameter(msg.to_string()));
        if self.clusters == 0 {
            return bad("cluster count must be at least 1");
        }
        if !(self.compactness > 0.0 && self.compactness.is_finite()) {
            return bad("compactness must be positive");
        }
        if !(self.fuzziness > 1.0 && self.fuzziness.is_finite()) {
            return bad("fuzzy exponent must be greater than 1");
        }
        if !(self.membership_exponent >= 0.0 && self.spatial_exponent >= 0.0) {
            return bad("membership and spatial exponents must be non-negative");
        }
        if self.max_iterations == 0 {
            return bad("max_iterations must be at least 1");
        }
        if !(self.residual_threshold >= 0.0) {
            return bad("residual threshold must be non-negative");
        }
        Ok(())
    }

    pub(crate) fn check_image(&self, img: &LabImage) -> Result<()> {
        self.validate()?;
        if self.clusters > img.len() {
            return Err(Error::TooManyClusters {
                requested: self.clusters,
                pixels: img.len(),
            });
        }
        Ok(())
    }
}

/// Output of a segmentation pipeline.
#[derive(Debug, Clone, PartialEq)]
pub struct Segmentation {
    pub labels: LabelMap,
    /// Distinct superpixels `m_p` after connectivity enforcement.
    pub superpixels: usize,
    /// Seeds `m_n` placed on the grid.
    pub seeds: usize,
    pub iterations: usize,
}

/// All per-pixel clustering buffers of one run.
#[derive(Debug, Clone)]
pub struct ClusteringState {
    pub table: CandidateTable,
    pub partition: FuzzyPartition,
}

impl ClusteringState {
    pub fn new(pixels: usize) -> Self {
        Self {
            table: CandidateTable::new(pixels),
            partition: FuzzyPartition::new(pixels),
        }
    }

    /// `(name, rows, columns)` of every per-pixel array held by the state.
    pub fn layout(&self) -> Vec<(&'static str, usize, usize)> {
        self.table.layout().into_iter().chain(self.partition.layout()).collect()
    }
}

/// Read-only snapshot handed to an observer after every iteration.
pub struct IterationView<'a> {
    pub iteration: usize,
    pub state: &'a ClusteringState,
    pub centroids: &'a [ClusterCentroid],
    pub residual: f64,
}

pub fn fuzzy_slic(img: &LabImage, cfg: &SegmentationConfig) -> Result<Segmentation> {
    fuzzy_slic_observed(img, cfg, |_| {})
}

/// [`fuzzy_slic`] with a callback invoked after each iteration.
pub fn fuzzy_slic_observed(
    img: &LabImage,
    cfg: &SegmentationConfig,
    mut observer: impl FnMut(&IterationView<'_>),
) -> Result<Segmentation> {
    cfg.check_image(img)?;
    let (w, h) = img.dims();
    let n = img.len();
    let s = grid_interval(n, cfg.clusters);

    let grad = compute_gradient(img);
    let seeds = initialize_seeds(img, cfg.clusters)?;
    let mut centroids = perturb_seeds(img, &seeds, &grad);

    let mut state = ClusteringState::new(n);
    let mut iterations = 0;
    for iteration in 0..cfg.max_iterations {
        iterations = iteration + 1;
        state.partition.reset();
        assignment_pass(img, &centroids, &mut state.table, s, cfg.compactness);
        update_membership(&state.table, &mut state.partition, cfg.fuzziness)?;
        spatial_function(&mut state.partition, &state.table, w, h);
        combine_membership(&mut state.partition, &state.table, cfg.membership_exponent, cfg.spatial_exponent);
        let residual = update_centroids(img, &state.partition, &state.table, &mut centroids, cfg.fuzziness);
        observer(&IterationView {
            iteration,
            state: &state,
            centroids: &centroids,
            residual,
        });
        if residual < cfg.residual_threshold {
            break;
        }
    }

    let raw = hard_assign(&state.partition, &state.table, w, h)?;
    let (labels, superpixels) = enforce_connectivity(&raw, n as f64 / cfg.clusters as f64);
    Ok(Segmentation {
        labels,
        superpixels,
        seeds: centroids.len(),
        iterations,
    })
}
