//! Local spatial fuzzy C-means updates over the candidate table.

use super::seeds::ClusterCentroid;
use super::table::{CandidateTable, MAX_LABELS};
use crate::connectivity::LabelMap;
use crate::error::{Error, Result};
use crate::imaging::LabImage;

/// Memberships `U`, spatial function `H` and combined memberships `U'`,
/// slot-aligned with the candidate table.
#[derive(Debug, Clone, PartialEq)]
pub struct FuzzyPartition {
    pub u: Vec<[f64; MAX_LABELS]>,
    pub h: Vec<[f64; MAX_LABELS]>,
    pub uprime: Vec<[f64; MAX_LABELS]>,
}

impl FuzzyPartition {
    pub fn new(pixels: usize) -> Self {
        Self {
            u: vec![[0.0; MAX_LABELS]; pixels],
            h: vec![[0.0; MAX_LABELS]; pixels],
            uprime: vec![[0.0; MAX_LABELS]; pixels],
        }
    }

    pub fn reset(&mut self) {
        self.u.fill([0.0; MAX_LABELS]);
        self.h.fill([0.0; MAX_LABELS]);
        self.uprime.fill([0.0; MAX_LABELS]);
    }

    pub fn layout(&self) -> [(&'static str, usize, usize); 3] {
        [
            ("U", self.u.len(), MAX_LABELS),
            ("H", self.h.len(), MAX_LABELS),
            ("U'", self.uprime.len(), MAX_LABELS),
        ]
    }
}

/// `x^e` with `0^0 = 1`.
#[inline]
fn pow0(x: f64, e: f64) -> f64 {
    if e == 0.0 {
        1.0
    } else if e == 1.0 {
        x
    } else if e == 2.0 {
        x * x
    } else {
        x.powf(e)
    }
}

/// Membership from distances:
/// `u_ij = 1 / sum_k (D_ij / D_ik)^(2/(t-1))` over the pixel's candidates.
pub fn update_membership(table: &CandidateTable, partition: &mut FuzzyPartition, fuzziness: f64) -> Result<()> {
    let exponent = 2.0 / (fuzziness - 1.0);
    for i in 0..table.len() {
        let d = table.distances(i);
        if d.is_empty() {
            return Err(Error::NoCandidates { pixel: i });
        }
        let u = &mut partition.u[i];
        *u = [0.0; MAX_LABELS];
        if let Some(zero) = d.iter().position(|&v| v == 0.0) {
            u[zero] = 1.0;
            continue;
        }
        for j in 0..d.len() {
            let sum: f64 = d.iter().map(|&dk| pow0(d[j] / dk, exponent)).sum();
            u[j] = 1.0 / sum;
        }
    }
    Ok(())
}

/// `h_ij = sum over the 8-neighbourhood of u_kj`; a neighbour without label
/// `j` among its candidates contributes nothing.
pub fn spatial_function(partition: &mut FuzzyPartition, table: &CandidateTable, width: usize, height: usize) {
    for y in 0..height {
        for x in 0..width {
            let i = y * width + x;
            let own = table.labels(i);
            let mut h = [0.0; MAX_LABELS];
            for ny in y.saturating_sub(1)..=(y + 1).min(height - 1) {
                for nx in x.saturating_sub(1)..=(x + 1).min(width - 1) {
                    let n = ny * width + nx;
                    if n == i {
                        continue;
                    }
                    let neighbour = table.labels(n);
                    let un = &partition.u[n];
                    for (k, &label) in own.iter().enumerate() {
                        for (s, &nl) in neighbour.iter().enumerate() {
                            if nl == label {
                                h[k] += un[s];
                            }
                        }
                    }
                }
            }
            partition.h[i] = h;
        }
    }
}

/// `u'_ij = u^p h^q / sum_k u_ik^p h_ik^q`, falling back to `u` when the
/// denominator vanishes.
pub fn combine_membership(partition: &mut FuzzyPartition, table: &CandidateTable, p: f64, q: f64) {
    for i in 0..table.len() {
        let f = table.count(i);
        let (u, h) = (&partition.u[i], &partition.h[i]);
        let mut weights = [0.0; MAX_LABELS];
        let mut total = 0.0;
        for k in 0..f {
            weights[k] = pow0(u[k], p) * pow0(h[k], q);
            total += weights[k];
        }
        let out = &mut partition.uprime[i];
        if total > 0.0 && total.is_finite() {
            for k in 0..MAX_LABELS {
                out[k] = if k < f { weights[k] / total } else { 0.0 };
            }
        } else {
            *out = *u;
        }
    }
}

/// Weighted labxy means `c_j = sum u'^t x / sum u'^t` over pixels holding `j`.
/// Returns the mean `(x, y)` displacement of the centroids.
pub fn update_centroids(
    img: &LabImage,
    partition: &FuzzyPartition,
    table: &CandidateTable,
    centroids: &mut [ClusterCentroid],
    fuzziness: f64,
) -> f64 {
    // [weight, l, a, b, x, y]
    let mut sums = vec![[0.0f64; 6]; centroids.len()];
    for i in 0..table.len() {
        let lab = img.lab(i);
        let (px, py) = img.position(i);
        for (k, &label) in table.labels(i).iter().enumerate() {
            let w = pow0(partition.uprime[i][k], fuzziness);
            let acc = &mut sums[label as usize];
            acc[0] += w;
            acc[1] += w * lab[0];
            acc[2] += w * lab[1];
            acc[3] += w * lab[2];
            acc[4] += w * px;
            acc[5] += w * py;
        }
    }
    apply_sums(centroids, &sums)
}

pub(crate) fn apply_sums(centroids: &mut [ClusterCentroid], sums: &[[f64; 6]]) -> f64 {
    if centroids.is_empty() {
        return 0.0;
    }
    let mut displacement = 0.0;
    for (c, acc) in centroids.iter_mut().zip(sums) {
        if acc[0] <= 0.0 {
            continue;
        }
        let next = ClusterCentroid {
            l: acc[1] / acc[0],
            a: acc[2] / acc[0],
            b: acc[3] / acc[0],
            x: acc[4] / acc[0],
            y: acc[5] / acc[0],
        };
        displacement += ((next.x - c.x).powi(2) + (next.y - c.y).powi(2)).sqrt();
        *c = next;
    }
    displacement / centroids.len() as f64
}

/// Labels each pixel with its candidate of largest `u'`; ties go to the
/// earliest slot.
pub fn hard_assign(partition: &FuzzyPartition, table: &CandidateTable, width: usize, height: usize) -> Result<LabelMap> {
    let mut labels = Vec::with_capacity(table.len());
    for i in 0..table.len() {
        let g = table.labels(i);
        if g.is_empty() {
            return Err(Error::NoCandidates { pixel: i });
        }
        let up = &partition.uprime[i];
        let mut best = 0;
        for k in 1..g.len() {
            if up[k] > up[best] {
                best = k;
            }
        }
        labels.push(g[best] as u32);
    }
    LabelMap::new(width, height, labels)
}
