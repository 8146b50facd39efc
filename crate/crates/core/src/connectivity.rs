//! Label maps, 4-connected component analysis, orphan absorption and the
//! superpixel adjacency graph.

use std::collections::{BTreeSet, HashMap};

use crate::error::{Error, Result};
use crate::imaging::LabImage;

/// Per-pixel superpixel labels, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelMap {
    width: usize,
    height: usize,
    labels: Vec<u32>,
}

impl LabelMap {
    pub fn new(width: usize, height: usize, labels: Vec<u32>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::EmptyInput("label map"));
        }
        if labels.len() != width * height {
            return Err(Error::InvalidParameter(format!(
                "{} labels do not match {width}x{height}",
                labels.len()
            )));
        }
        Ok(Self {
            width,
            height,
            labels,
        })
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> u32) -> Result<Self> {
        let mut labels = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                labels.push(f(x, y));
            }
        }
        Self::new(width, height, labels)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> u32 {
        self.labels[y * self.width + x]
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.labels
    }

    pub fn into_vec(self) -> Vec<u32> {
        self.labels
    }

    /// Number of distinct label values.
    pub fn distinct_count(&self) -> usize {
        self.labels.iter().collect::<BTreeSet<_>>().len()
    }

    /// Pixels whose label differs from the right or lower neighbour.
    pub fn boundary_pixels(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.height).flat_map(move |y| {
            (0..self.width).filter_map(move |x| self.is_boundary(x, y).then_some((x, y)))
        })
    }

    #[inline]
    pub fn is_boundary(&self, x: usize, y: usize) -> bool {
        let l = self.get(x, y);
        (x + 1 < self.width && self.get(x + 1, y) != l) || (y + 1 < self.height && self.get(x, y + 1) != l)
    }

    /// Renumbers labels to `0..k` in order of first row-major appearance.
    pub fn densified(&self) -> (LabelMap, usize) {
        let mut remap = HashMap::new();
        let labels = self
            .labels
            .iter()
            .map(|&l| {
                let next = remap.len() as u32;
                *remap.entry(l).or_insert(next)
            })
            .collect();
        let count = remap.len();
        (
            LabelMap {
                width: self.width,
                height: self.height,
                labels,
            },
            count,
        )
    }
}

/// 4-connected components in row-major discovery order.
#[derive(Debug, Clone)]
pub struct Components {
    /// Component index per pixel.
    pub map: Vec<u32>,
    /// Pixel count per component.
    pub sizes: Vec<usize>,
    /// Label value carried by each component.
    pub labels: Vec<u32>,
    /// Row-major index of the first pixel of each component.
    pub first_pixel: Vec<usize>,
}

impl Components {
    pub fn count(&self) -> usize {
        self.sizes.len()
    }
}

pub fn label_components(labels: &LabelMap) -> Components {
    let (w, h) = labels.dims();
    let n = w * h;
    let mut map = vec![u32::MAX; n];
    let mut sizes = Vec::new();
    let mut comp_labels = Vec::new();
    let mut first_pixel = Vec::new();
    let mut stack = Vec::new();

    for start in 0..n {
        if map[start] != u32::MAX {
            continue;
        }
        let id = sizes.len() as u32;
        let label = labels.labels[start];
        map[start] = id;
        stack.push(start);
        let mut size = 0;
        while let Some(i) = stack.pop() {
            size += 1;
            let (x, y) = (i % w, i / w);
            let mut visit = |j: usize| {
                if map[j] == u32::MAX && labels.labels[j] == label {
                    map[j] = id;
                    stack.push(j);
                }
            };
            if x > 0 {
                visit(i - 1);
            }
            if x + 1 < w {
                visit(i + 1);
            }
            if y > 0 {
                visit(i - w);
            }
            if y + 1 < h {
                visit(i + w);
            }
        }
        sizes.push(size);
        comp_labels.push(label);
        first_pixel.push(start);
    }

    Components {
        map,
        sizes,
        labels: comp_labels,
        first_pixel,
    }
}

struct DisjointSet {
    parent: Vec<usize>,
}

impl DisjointSet {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            // keep the earlier-discovered root
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }
}

/// Makes every label a single 4-connected region.
///
/// For each label the largest component keeps it; every other component, and
/// any component smaller than `target_size_hint / 4`, is absorbed into its
/// first-scanned neighbouring component (the adjacent component with the
/// smallest discovery index). Output labels are dense, `0..m_p`.
pub fn enforce_connectivity(labels: &LabelMap, target_size_hint: f64) -> (LabelMap, usize) {
    let (w, h) = labels.dims();
    let comps = label_components(labels);
    let count = comps.count();
    let min_size = target_size_hint / 4.0;

    let mut largest: HashMap<u32, usize> = HashMap::new();
    for c in 0..count {
        largest
            .entry(comps.labels[c])
            .and_modify(|best| {
                if comps.sizes[c] > comps.sizes[*best] {
                    *best = c;
                }
            })
            .or_insert(c);
    }

    // For every component, the adjacent component with the smallest index.
    let mut first_neighbor = vec![usize::MAX; count];
    let mut note = |a: usize, b: usize| {
        first_neighbor[a] = first_neighbor[a].min(b);
        first_neighbor[b] = first_neighbor[b].min(a);
    };
    for y in 0..h {
        for x in 0..w {
            let i = y * w + x;
            let c = comps.map[i] as usize;
            if x + 1 < w {
                let r = comps.map[i + 1] as usize;
                if r != c {
                    note(c, r);
                }
            }
            if y + 1 < h {
                let d = comps.map[i + w] as usize;
                if d != c {
                    note(c, d);
                }
            }
        }
    }

    let keeps = |c: usize| {
        first_neighbor[c] == usize::MAX
            || (largest[&comps.labels[c]] == c && comps.sizes[c] as f64 >= min_size)
    };

    let mut sets = DisjointSet::new(count);
    for c in 1..count {
        if !keeps(c) {
            // c's first pixel has a left or upper neighbour, so the target is earlier
            sets.union(c, first_neighbor[c]);
        }
    }
    if count > 1 && !keeps(0) {
        // component 0 has only later neighbours; fold its whole group into the
        // first-scanned component outside the group
        let root = sets.find(0);
        let mut target = usize::MAX;
        for y in 0..h {
            for x in 0..w {
                let i = y * w + x;
                let a = comps.map[i] as usize;
                let mut consider = |b: usize| {
                    let (ra, rb) = (sets.find(a), sets.find(b));
                    if ra == root && rb != root {
                        target = target.min(b);
                    } else if rb == root && ra != root {
                        target = target.min(a);
                    }
                };
                if x + 1 < w {
                    consider(comps.map[i + 1] as usize);
                }
                if y + 1 < h {
                    consider(comps.map[i + w] as usize);
                }
            }
        }
        if target != usize::MAX {
            sets.union(0, target);
        }
    }

    let merged = LabelMap {
        width: w,
        height: h,
        labels: comps.map.iter().map(|&c| sets.find(c as usize) as u32).collect(),
    };
    merged.densified()
}

/// Per-superpixel statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionNode {
    pub area: usize,
    pub lab_sum: [f64; 3],
    pub pos_sum: [f64; 2],
    pub neighbors: BTreeSet<u32>,
}

impl RegionNode {
    fn empty() -> Self {
        Self {
            area: 0,
            lab_sum: [0.0; 3],
            pos_sum: [0.0; 2],
            neighbors: BTreeSet::new(),
        }
    }

    pub fn mean_color(&self) -> [f64; 3] {
        let n = self.area.max(1) as f64;
        [self.lab_sum[0] / n, self.lab_sum[1] / n, self.lab_sum[2] / n]
    }

    pub fn centroid(&self) -> (f64, f64) {
        let n = self.area.max(1) as f64;
        (self.pos_sum[0] / n, self.pos_sum[1] / n)
    }

    /// Folds `other`'s statistics into `self` (adjacency is handled by the graph).
    pub fn absorb_stats(&mut self, other: &RegionNode) {
        self.area += other.area;
        for k in 0..3 {
            self.lab_sum[k] += other.lab_sum[k];
        }
        self.pos_sum[0] += other.pos_sum[0];
        self.pos_sum[1] += other.pos_sum[1];
    }
}

/// Superpixel region adjacency graph indexed by label value.
#[derive(Debug, Clone, PartialEq)]
pub struct AdjacencyGraph {
    pub nodes: Vec<RegionNode>,
}

impl AdjacencyGraph {
    /// Labels with non-zero area.
    pub fn live_count(&self) -> usize {
        self.nodes.iter().filter(|n| n.area > 0).count()
    }

    pub fn total_area(&self) -> usize {
        self.nodes.iter().map(|n| n.area).sum()
    }
}

pub fn build_adjacency(labels: &LabelMap, img: &LabImage) -> Result<AdjacencyGraph> {
    if labels.dims() != img.dims() {
        return Err(Error::DimensionMismatch {
            expected: img.dims(),
            actual: labels.dims(),
        });
    }
    let (w, h) = labels.dims();
    let max = labels.labels.iter().copied().max().unwrap_or(0) as usize;
    let mut nodes = vec![RegionNode::empty(); max + 1];
    for (i, &l) in labels.labels.iter().enumerate() {
        let node = &mut nodes[l as usize];
        node.area += 1;
        let lab = img.lab(i);
        for k in 0..3 {
            node.lab_sum[k] += lab[k];
        }
        let (px, py) = img.position(i);
        node.pos_sum[0] += px;
        node.pos_sum[1] += py;
    }
    for y in 0..h {
        for x in 0..w {
            let l = labels.get(x, y);
            let mut link = |o: u32| {
                if o != l {
                    nodes[l as usize].neighbors.insert(o);
                    nodes[o as usize].neighbors.insert(l);
                }
            };
            if x + 1 < w {
                link(labels.get(x + 1, y));
            }
            if y + 1 < h {
                link(labels.get(x, y + 1));
            }
        }
    }
    Ok(AdjacencyGraph { nodes })
}
