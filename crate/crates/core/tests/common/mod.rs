//! Brute-force oracles shared by the oracle tests and the acceptance run.
//! Each check returns the number of cases examined or a description of the
//! first mismatch.

#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap, VecDeque};

use fuzzy_slic::clustering::{
    assignment_pass, grid_interval, initialize_seeds, update_centroids, CandidateTable, ClusterCentroid, FuzzyPartition,
};
use fuzzy_slic::connectivity::{enforce_connectivity, label_components, LabelMap};
use fuzzy_slic::imaging::LabImage;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn random_image(rng: &mut ChaCha8Rng, w: usize, h: usize) -> LabImage {
    LabImage::from_fn(w, h, |_, _| {
        [rng.gen_range(0.0..100.0), rng.gen_range(-60.0..60.0), rng.gen_range(-60.0..60.0)]
    })
    .unwrap()
}

fn jittered_centroids(rng: &mut ChaCha8Rng, img: &LabImage, m: usize) -> Vec<ClusterCentroid> {
    let (w, h) = img.dims();
    initialize_seeds(img, m)
        .unwrap()
        .into_iter()
        .map(|c| {
            let x = (c.x + rng.gen_range(-2.0..2.0)).clamp(0.0, w as f64 - 1e-6);
            let y = (c.y + rng.gen_range(-2.0..2.0)).clamp(0.0, h as f64 - 1e-6);
            ClusterCentroid::new([rng.gen_range(0.0..100.0), rng.gen_range(-50.0..50.0), 0.0], x, y)
        })
        .collect()
}

fn in_any_window(img: &LabImage, centroids: &[ClusterCentroid], s: f64, i: usize) -> bool {
    let (px, py) = img.position(i);
    centroids.iter().any(|k| (px - k.x).abs() <= s && (py - k.y).abs() <= s)
}

/// Every offer a pixel would see: centroids whose `2S x 2S` square contains
/// the pixel centre, or the globally nearest one when there are none.
fn all_offers(img: &LabImage, centroids: &[ClusterCentroid], s: f64, c: f64, i: usize) -> Vec<(f64, usize)> {
    let (px, py) = img.position(i);
    let lab = img.lab(i);
    let dist = |k: &ClusterCentroid| {
        let dl = (lab[0] - k.l).powi(2) + (lab[1] - k.a).powi(2) + (lab[2] - k.b).powi(2);
        let dxy = (px - k.x).powi(2) + (py - k.y).powi(2);
        (dl + (c / s).powi(2) * dxy).sqrt()
    };
    let mut offers: Vec<(f64, usize)> = centroids
        .iter()
        .enumerate()
        .filter(|(_, k)| (px - k.x).abs() <= s && (py - k.y).abs() <= s)
        .map(|(j, k)| (dist(k), j))
        .collect();
    if offers.is_empty() {
        let nearest = centroids
            .iter()
            .enumerate()
            .map(|(j, k)| (dist(k), j))
            .min_by(|a, b| a.0.total_cmp(&b.0))
            .unwrap();
        offers.push(nearest);
    }
    offers.sort_by(|a, b| a.0.total_cmp(&b.0));
    offers
}

/// Pixels outside every window keep `previous` candidates when they have any.
fn check_table(
    img: &LabImage,
    centroids: &[ClusterCentroid],
    table: &CandidateTable,
    previous: Option<&CandidateTable>,
    s: f64,
    c: f64,
) -> Result<(), String> {
    for i in 0..img.len() {
        if let Some(prev) = previous.filter(|p| p.count(i) > 0 && !in_any_window(img, centroids, s, i)) {
            if table.raw_slots(i) != prev.raw_slots(i) {
                return Err(format!("stale pixel {i} lost its candidates"));
            }
            continue;
        }
        let offers = all_offers(img, centroids, s, c, i);
        let keep = offers.len().min(3);
        if table.count(i) != keep {
            return Err(format!("pixel {i}: f = {} but {keep} offers qualify", table.count(i)));
        }
        let mut got: Vec<(f64, usize)> = table
            .distances(i)
            .iter()
            .zip(table.labels(i))
            .map(|(&d, &l)| (d, l as usize))
            .collect();
        got.sort_by(|a, b| a.0.total_cmp(&b.0));
        for k in 0..keep {
            if (got[k].0 - offers[k].0).abs() > 1e-9 {
                return Err(format!("pixel {i} slot {k}: {got:?} vs {offers:?}"));
            }
        }
        // Labels must match wherever the oracle's cut is unambiguous.
        if offers.len() <= 3 || offers[2].0 < offers[3].0 {
            let a: BTreeSet<usize> = got.iter().map(|g| g.1).collect();
            let b: BTreeSet<usize> = offers[..keep].iter().map(|o| o.1).collect();
            if a != b {
                return Err(format!("pixel {i}: labels {a:?} vs {b:?}"));
            }
        }
    }
    Ok(())
}

/// Two consecutive assignment passes per trial on images up to 32x32.
pub fn assignment_oracle(trials: usize, seed: u64) -> Result<usize, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..trials {
        let w = rng.gen_range(4..=32);
        let h = rng.gen_range(4..=32);
        let m = rng.gen_range(1..=((w * h) / 6).max(1));
        let c = rng.gen_range(1.0..40.0);
        let img = random_image(&mut rng, w, h);
        let s = grid_interval(img.len(), m);
        let centroids = jittered_centroids(&mut rng, &img, m);
        let mut table = CandidateTable::new(img.len());
        assignment_pass(&img, &centroids, &mut table, s, c);
        check_table(&img, &centroids, &table, None, s, c)?;

        // A second pass on the same table with moved centroids: every pixel
        // that is offered anything reflects only the fresh offers.
        let moved = jittered_centroids(&mut rng, &img, m);
        let previous = table.clone();
        assignment_pass(&img, &moved, &mut table, s, c);
        check_table(&img, &moved, &table, Some(&previous), s, c)?;
    }
    Ok(trials)
}

/// Random candidate sets and `U'` rows on 8x8 images.
pub fn centroid_oracle(trials: usize, seed: u64) -> Result<usize, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..trials {
        let (w, h) = (8, 8);
        let img = random_image(&mut rng, w, h);
        let m = rng.gen_range(2..=6);
        let t = rng.gen_range(1.1..3.0);
        let mut centroids: Vec<ClusterCentroid> =
            (0..m).map(|_| ClusterCentroid::new([50.0, 0.0, 0.0], 4.0, 4.0)).collect();
        let mut table = CandidateTable::new(w * h);
        let mut partition = FuzzyPartition::new(w * h);
        let mut chosen = Vec::new();
        table.begin_pass();
        for i in 0..w * h {
            let f = rng.gen_range(1..=3.min(m));
            let mut labels: Vec<usize> = (0..m).collect();
            for k in 0..f {
                let pick = rng.gen_range(k..m);
                labels.swap(k, pick);
            }
            let weights: Vec<f64> = (0..f).map(|_| rng.gen_range(0.01..1.0)).collect();
            let sum: f64 = weights.iter().sum();
            for k in 0..f {
                table.offer(i, rng.gen_range(1.0..10.0), labels[k]);
                partition.uprime[i][k] = weights[k] / sum;
            }
            chosen.push(labels[..f].to_vec());
        }
        table.finish_pass();

        let mut oracle: HashMap<usize, [f64; 6]> = HashMap::new();
        for i in 0..w * h {
            let lab = img.lab(i);
            let (x, y) = ((i % w) as f64 + 0.5, (i / w) as f64 + 0.5);
            for (k, &j) in chosen[i].iter().enumerate() {
                let wt = partition.uprime[i][k].powf(t);
                let e = oracle.entry(j).or_insert([0.0; 6]);
                for (acc, v) in e.iter_mut().zip([1.0, lab[0], lab[1], lab[2], x, y]) {
                    *acc += wt * v;
                }
            }
        }

        update_centroids(&img, &partition, &table, &mut centroids, t);
        for (j, c) in centroids.iter().enumerate() {
            let Some(e) = oracle.get(&j) else {
                continue;
            };
            let expect = [e[1] / e[0], e[2] / e[0], e[3] / e[0], e[4] / e[0], e[5] / e[0]];
            let got = [c.l, c.a, c.b, c.x, c.y];
            if got.iter().zip(expect).any(|(g, x)| (g - x).abs() > 1e-9) {
                return Err(format!("cluster {j}: {got:?} vs {expect:?}"));
            }
        }
    }
    Ok(trials)
}

/// Independent 4-connected component count by breadth-first search:
/// `(total, components per label)`.
pub fn count_components(map: &LabelMap) -> (usize, HashMap<u32, usize>) {
    let (w, h) = map.dims();
    let mut seen = vec![false; w * h];
    let mut per_label: HashMap<u32, usize> = HashMap::new();
    let mut total = 0;
    for start in 0..w * h {
        if seen[start] {
            continue;
        }
        total += 1;
        let label = map.as_slice()[start];
        *per_label.entry(label).or_default() += 1;
        let mut queue = VecDeque::from([start]);
        seen[start] = true;
        while let Some(i) = queue.pop_front() {
            let (x, y) = (i % w, i / w);
            let mut push = |j: usize| {
                if !seen[j] && map.as_slice()[j] == label {
                    seen[j] = true;
                    queue.push_back(j);
                }
            };
            if x > 0 {
                push(i - 1);
            }
            if x + 1 < w {
                push(i + 1);
            }
            if y > 0 {
                push(i - w);
            }
            if y + 1 < h {
                push(i + w);
            }
        }
    }
    (total, per_label)
}

/// Checks a map is a dense partition with one 4-connected region per label.
pub fn check_connected_partition(map: &LabelMap, count: usize) -> Result<(), String> {
    let (components, per_label) = count_components(map);
    if components != count || map.distinct_count() != count {
        return Err(format!(
            "{count} labels reported, {} distinct, {components} components",
            map.distinct_count()
        ));
    }
    if let Some((l, n)) = per_label.iter().find(|(_, &n)| n != 1) {
        return Err(format!("label {l} has {n} components"));
    }
    if map.as_slice().iter().any(|&l| l as usize >= count) {
        return Err("labels are not dense".into());
    }
    Ok(())
}

/// Random speckled block maps up to 32x32.
pub fn connectivity_oracle(trials: usize, seed: u64) -> Result<usize, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..trials {
        let w = rng.gen_range(1..=32);
        let h = rng.gen_range(1..=32);
        let palette = rng.gen_range(1..8);
        let block = rng.gen_range(1..6);
        let noise = rng.gen_range(0.0..0.4);
        let base: Vec<u32> = (0..64).map(|_| rng.gen_range(0..palette)).collect();
        let input = LabelMap::from_fn(w, h, |x, y| {
            if rng.gen_bool(noise) {
                rng.gen_range(0..palette)
            } else {
                base[((y / block) * 8 + x / block) % 64]
            }
        })
        .unwrap();
        let hint = rng.gen_range(1.0..60.0);
        let (out, count) = enforce_connectivity(&input, hint);
        check_connected_partition(&out, count)?;
        if count > count_components(&input).0 {
            return Err("more regions out than components in".into());
        }
        // No input component is ever split.
        let comps = label_components(&input);
        let mut owner: HashMap<u32, u32> = HashMap::new();
        for (i, &c) in comps.map.iter().enumerate() {
            let l = out.as_slice()[i];
            if *owner.entry(c).or_insert(l) != l {
                return Err(format!("input component {c} was split"));
            }
        }
    }
    Ok(trials)
}
