//! Onion peeling: exact superpixel-count control.
//!
//! When a run yields fewer superpixels than requested, the clustering is
//! rerun with an inflated cluster count. The surplus is then removed by
//! merging the smallest superpixels, one at a time, into their most similar
//! surviving neighbour. A superpixel enclosed entirely by other removal
//! candidates waits until one of them has merged outward.

use std::collections::{BTreeSet, VecDeque};

use crate::clustering::{fuzzy_slic, Segmentation, SegmentationConfig};
use crate::connectivity::{build_adjacency, AdjacencyGraph, LabelMap};
use crate::error::{Error, Result};
use crate::imaging::LabImage;

/// Default amplification coefficient `A`.
pub const AMPLIFICATION: f64 = 0.2;

/// Maximum number of regeneration runs before giving up.
pub const MAX_REGENERATIONS: usize = 3;

/// Cluster count for a regeneration run: `ceil(m^2 / m_p + m * A)`.
pub fn regeneration_count(requested: usize, generated: usize, amplification: f64) -> Result<usize> {
    if generated == 0 || generated >= requested {
        return Err(Error::RegenerationNotApplicable { requested, generated });
    }
    let m = requested as f64;
    let value = m * m / generated as f64 + m * amplification;
    Ok((value - 1e-9).ceil() as usize)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PeelPlan {
    pub target: usize,
    /// `m_p - m_s`.
    pub surplus: usize,
    /// Superpixel ids to delete, smallest area first.
    pub removal: Vec<u32>,
    pub amplification: f64,
}

/// Selects the `surplus` smallest superpixels; equal areas go to the lower id.
pub fn plan_peel(graph: &AdjacencyGraph, target: usize) -> Result<PeelPlan> {
    let mut live: Vec<(usize, u32)> = graph
        .nodes
        .iter()
        .enumerate()
        .filter(|(_, n)| n.area > 0)
        .map(|(id, n)| (n.area, id as u32))
        .collect();
    if target == 0 || live.len() < target {
        return Err(Error::TargetTooLarge {
            target,
            available: live.len(),
        });
    }
    live.sort_unstable();
    let surplus = live.len() - target;
    Ok(PeelPlan {
        target,
        surplus,
        removal: live.into_iter().take(surplus).map(|(_, id)| id).collect(),
        amplification: AMPLIFICATION,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct PeelResult {
    pub labels: LabelMap,
    pub superpixels: usize,
    pub merges: usize,
}

fn sq(a: f64) -> f64 {
    a * a
}

/// Merges every superpixel of the plan into its most alike surviving
/// neighbour: smallest mean-Lab distance, then nearest centroid, then lowest id.
pub fn execute_peel(labels: &LabelMap, graph: &AdjacencyGraph, plan: &PeelPlan) -> Result<PeelResult> {
    let mut graph = graph.clone();
    if plan.removal.is_empty() {
        let (labels, superpixels) = labels.densified();
        return Ok(PeelResult {
            labels,
            superpixels,
            merges: 0,
        });
    }
    if plan.removal.len() >= graph.live_count() {
        return Err(Error::UnresolvablePlan);
    }

    let mut pending: BTreeSet<u32> = plan.removal.iter().copied().collect();
    let mut queue: VecDeque<u32> = plan.removal.iter().copied().collect();
    let mut target_of: Vec<u32> = (0..graph.nodes.len() as u32).collect();
    let mut merges = 0;
    let mut stalled = 0;

    while let Some(id) = queue.pop_front() {
        let node = &graph.nodes[id as usize];
        let color = node.mean_color();
        let centre = node.centroid();
        let best = node
            .neighbors
            .iter()
            .filter(|n| !pending.contains(n))
            .map(|&n| {
                let other = &graph.nodes[n as usize];
                let c = other.mean_color();
                let p = other.centroid();
                let dc = sq(c[0] - color[0]) + sq(c[1] - color[1]) + sq(c[2] - color[2]);
                let dp = sq(p.0 - centre.0) + sq(p.1 - centre.1);
                (dc, dp, n)
            })
            .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)).then(a.2.cmp(&b.2)));

        let Some((_, _, into)) = best else {
            // enclosed by other removal candidates: retry after they peel
            queue.push_back(id);
            stalled += 1;
            if stalled >= queue.len() {
                return Err(Error::UnresolvablePlan);
            }
            continue;
        };
        stalled = 0;

        let removed = std::mem::replace(&mut graph.nodes[id as usize], empty_like());
        graph.nodes[into as usize].absorb_stats(&removed);
        for &n in &removed.neighbors {
            let neighbour = &mut graph.nodes[n as usize];
            neighbour.neighbors.remove(&id);
            if n != into {
                neighbour.neighbors.insert(into);
                graph.nodes[into as usize].neighbors.insert(n);
            }
        }
        graph.nodes[into as usize].neighbors.remove(&id);
        target_of[id as usize] = into;
        pending.remove(&id);
        merges += 1;
    }

    let merged = LabelMap::new(
        labels.width(),
        labels.height(),
        labels.as_slice().iter().map(|&l| target_of[l as usize]).collect(),
    )?;
    let (labels, superpixels) = merged.densified();
    Ok(PeelResult {
        labels,
        superpixels,
        merges,
    })
}

fn empty_like() -> crate::connectivity::RegionNode {
    crate::connectivity::RegionNode {
        area: 0,
        lab_sum: [0.0; 3],
        pos_sum: [0.0; 2],
        neighbors: BTreeSet::new(),
    }
}

/// Book-keeping of one exact-count run.
#[derive(Debug, Clone, PartialEq)]
pub struct PeelingOutcome {
    pub segmentation: Segmentation,
    /// Superpixels produced by the first clustering run.
    pub initial: usize,
    /// Superpixels produced by the run that was peeled.
    pub generated: usize,
    pub regenerations: usize,
    pub merges: usize,
}

/// Fuzzy SLIC followed by onion peeling; always returns exactly
/// `cfg.clusters` connected superpixels or an error.
pub fn fuzzy_slicnc(img: &LabImage, cfg: &SegmentationConfig) -> Result<Segmentation> {
    fuzzy_slicnc_detailed(img, cfg).map(|o| o.segmentation)
}

pub fn fuzzy_slicnc_detailed(img: &LabImage, cfg: &SegmentationConfig) -> Result<PeelingOutcome> {
    let target = cfg.clusters;
    let mut seg = fuzzy_slic(img, cfg)?;
    let initial = seg.superpixels;
    let mut regenerations = 0;
    while seg.superpixels < target {
        if regenerations == MAX_REGENERATIONS {
            return Err(Error::CannotReachTarget {
                target,
                generated: seg.superpixels,
            });
        }
        let count = regeneration_count(target, seg.superpixels, AMPLIFICATION)?.min(img.len());
        seg = fuzzy_slic(img, &cfg.with_clusters(count))?;
        regenerations += 1;
    }

    let generated = seg.superpixels;
    let mut merges = 0;
    if generated > target {
        let graph = build_adjacency(&seg.labels, img)?;
        let plan = plan_peel(&graph, target)?;
        let peeled = execute_peel(&seg.labels, &graph, &plan)?;
        merges = peeled.merges;
        seg.labels = peeled.labels;
        seg.superpixels = peeled.superpixels;
    }
    Ok(PeelingOutcome {
        segmentation: seg,
        initial,
        generated,
        regenerations,
        merges,
    })
}
