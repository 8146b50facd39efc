//! Per-pixel candidate tables and the local assignment pass.

use super::seeds::{labxy_distance_sq, search_window, ClusterCentroid};
use crate::imaging::LabImage;

/// Maximum number of candidate labels a pixel may carry.
pub const MAX_LABELS: usize = 3;

/// `D`, `G` and `f` of the assignment pass: up to three (distance, cluster)
/// candidates per pixel.
///
/// `D` and `G` persist across passes; `f` restarts at zero on each pass so
/// fresh offers overwrite the slots in order. A pixel that receives no offer
/// during a pass keeps the candidates it already had.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateTable {
    dist: Vec<[f64; MAX_LABELS]>,
    label: Vec<[i32; MAX_LABELS]>,
    count: Vec<u8>,
}

impl CandidateTable {
    pub fn new(pixels: usize) -> Self {
        Self {
            dist: vec![[f64::INFINITY; MAX_LABELS]; pixels],
            label: vec![[-1; MAX_LABELS]; pixels],
            count: vec![0; pixels],
        }
    }

    pub fn len(&self) -> usize {
        self.count.len()
    }

    pub fn is_empty(&self) -> bool {
        self.count.is_empty()
    }

    /// `f(i)`.
    #[inline]
    pub fn count(&self, pixel: usize) -> usize {
        self.count[pixel] as usize
    }

    #[inline]
    pub fn distances(&self, pixel: usize) -> &[f64] {
        &self.dist[pixel][..self.count(pixel)]
    }

    #[inline]
    pub fn labels(&self, pixel: usize) -> &[i32] {
        &self.label[pixel][..self.count(pixel)]
    }

    /// Raw slots, including those beyond `f(i)`.
    pub fn raw_slots(&self, pixel: usize) -> (&[f64; MAX_LABELS], &[i32; MAX_LABELS]) {
        (&self.dist[pixel], &self.label[pixel])
    }

    pub fn begin_pass(&mut self) {
        self.count.fill(0);
    }

    /// Offers `(d, cluster)`; appends below the cap, otherwise replaces the
    /// current maximum when `d` is smaller.
    #[inline]
    pub fn offer(&mut self, pixel: usize, d: f64, cluster: usize) {
        let f = self.count[pixel] as usize;
        if f < MAX_LABELS {
            self.dist[pixel][f] = d;
            self.label[pixel][f] = cluster as i32;
            self.count[pixel] += 1;
        } else {
            let slots = &mut self.dist[pixel];
            let mut worst = 0;
            for k in 1..MAX_LABELS {
                if slots[k] > slots[worst] {
                    worst = k;
                }
            }
            if d < slots[worst] {
                slots[worst] = d;
                self.label[pixel][worst] = cluster as i32;
            }
        }
    }

    /// Closes a pass. Pixels that received offers drop stale slots beyond
    /// `f(i)`; pixels that received none get their previous candidates back.
    /// Returns the pixels that still have no candidate at all.
    pub fn finish_pass(&mut self) -> Vec<usize> {
        let mut uncovered = Vec::new();
        for i in 0..self.count.len() {
            let f = self.count[i] as usize;
            if f > 0 {
                for k in f..MAX_LABELS {
                    self.dist[i][k] = f64::INFINITY;
                    self.label[i][k] = -1;
                }
            } else {
                let kept = self.label[i].iter().take_while(|&&l| l >= 0).count();
                self.count[i] = kept as u8;
                if kept == 0 {
                    uncovered.push(i);
                }
            }
        }
        uncovered
    }

    /// Size and shape of every per-pixel array: `(name, rows, columns)`.
    pub fn layout(&self) -> [(&'static str, usize, usize); 3] {
        [
            ("D", self.dist.len(), MAX_LABELS),
            ("G", self.label.len(), MAX_LABELS),
            ("f", self.count.len(), 1),
        ]
    }
}

/// Offers every pixel in each centroid's `2S x 2S` window to that centroid.
/// Pixels outside every window and without earlier candidates are offered
/// their nearest centroid over the whole image.
pub fn assignment_pass(
    img: &LabImage,
    centroids: &[ClusterCentroid],
    table: &mut CandidateTable,
    s: f64,
    compactness: f64,
) {
    let (w, h) = img.dims();
    let spatial_weight = (compactness / s).powi(2);
    table.begin_pass();
    for (j, c) in centroids.iter().enumerate() {
        let Some((x0, x1, y0, y1)) = search_window(c, s, w, h) else {
            continue;
        };
        for y in y0..=y1 {
            let row = y * w;
            let py = y as f64 + 0.5;
            for x in x0..=x1 {
                let i = row + x;
                let d = labxy_distance_sq(img.lab(i), (x as f64 + 0.5, py), c, spatial_weight).sqrt();
                table.offer(i, d, j);
            }
        }
    }
    for i in table.finish_pass() {
        let (lab, pos) = (img.lab(i), img.position(i));
        let nearest = centroids
            .iter()
            .enumerate()
            .map(|(j, c)| (labxy_distance_sq(lab, pos, c, spatial_weight).sqrt(), j))
            .min_by(|a, b| a.0.total_cmp(&b.0));
        if let Some((d, j)) = nearest {
            table.offer(i, d, j);
        }
    }
}
