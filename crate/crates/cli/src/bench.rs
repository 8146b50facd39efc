//! Corpus sweep: every (image, method, m, noise) combination is segmented,
//! scored and written as one CSV row.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::str::FromStr;
use std::time::Instant;

use anyhow::{anyhow, bail, Result};
use clap::ValueEnum;
use fuzzy_slic::imaging::{load_image, read_label_map, rgb_to_lab, LabImage};
use fuzzy_slic::metrics::{normalized_auc, vsn, MetricReport};
use fuzzy_slic::noise::{NoiseKind, NoiseSpec};
use fuzzy_slic::{fuzzy_slic, fuzzy_slicnc, slic_segment, Segmentation, SegmentationConfig};
use rayon::prelude::*;

use crate::corpus::{CorpusEntry, CorpusManifest};

pub const CSV_HEADER: &str = "image,method,m,C,noise_kind,noise_level,seed,m_p,br,ue,co,runtime_s";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, ValueEnum)]
pub enum Method {
    FuzzySlic,
    FuzzySlicnc,
    Slic,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::FuzzySlic => "fuzzy-slic",
            Method::FuzzySlicnc => "fuzzy-slicnc",
            Method::Slic => "slic",
        }
    }

    pub fn default_compactness(self) -> f64 {
        match self {
            Method::FuzzySlic => SegmentationConfig::FUZZY_SLIC_COMPACTNESS,
            Method::FuzzySlicnc => SegmentationConfig::FUZZY_SLICNC_COMPACTNESS,
            Method::Slic => SegmentationConfig::SLIC_COMPACTNESS,
        }
    }

    pub fn run(self, img: &LabImage, cfg: &SegmentationConfig) -> fuzzy_slic::Result<Segmentation> {
        match self {
            Method::FuzzySlic => fuzzy_slic(img, cfg),
            Method::FuzzySlicnc => fuzzy_slicnc(img, cfg),
            Method::Slic => slic_segment(img, cfg),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        <Method as ValueEnum>::from_str(s, false).map_err(|e| anyhow!(e))
    }
}

/// One `--noise` flag: either `none` or `kind:level,level,...`.
#[derive(Debug, Clone, PartialEq)]
pub enum NoiseArg {
    None,
    Levels(NoiseKind, Vec<f64>),
}

impl FromStr for NoiseArg {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "none" {
            return Ok(NoiseArg::None);
        }
        let (kind, levels) = s
            .split_once(':')
            .ok_or_else(|| anyhow!("noise must be 'none' or 'kind:level[,level...]', got '{s}'"))?;
        let kind: NoiseKind = kind.parse()?;
        let levels = levels
            .split(',')
            .map(|l| l.trim().parse::<f64>().map_err(|_| anyhow!("bad noise level '{l}'")))
            .collect::<Result<Vec<_>>>()?;
        for &level in &levels {
            NoiseSpec::new(kind, level, 0)?;
        }
        Ok(NoiseArg::Levels(kind, levels))
    }
}

/// A single noise setting; `None` is the clean image.
pub type NoiseConfig = Option<(NoiseKind, f64)>;

pub fn expand_noise(args: &[NoiseArg]) -> Vec<NoiseConfig> {
    if args.is_empty() {
        return vec![None];
    }
    args.iter()
        .flat_map(|a| match a {
            NoiseArg::None => vec![None],
            NoiseArg::Levels(kind, levels) => levels.iter().map(|&l| Some((*kind, l))).collect(),
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct BenchOptions {
    pub methods: Vec<Method>,
    pub clusters: Vec<usize>,
    pub noise: Vec<NoiseConfig>,
    pub seed: u64,
    /// Record a runtime of zero so repeated runs produce identical bytes.
    pub no_timing: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchResultRow {
    pub image: String,
    pub method: Method,
    pub m: usize,
    pub compactness: f64,
    pub noise: NoiseConfig,
    /// Noise seed actually used for this image.
    pub seed: u64,
    pub report: MetricReport,
}

impl BenchResultRow {
    pub fn record(&self) -> [String; 12] {
        let (kind, level) = match self.noise {
            Some((k, l)) => (k.name().to_string(), l.to_string()),
            None => ("none".to_string(), "0".to_string()),
        };
        [
            self.image.clone(),
            self.method.name().to_string(),
            self.m.to_string(),
            self.compactness.to_string(),
            kind,
            level,
            self.seed.to_string(),
            self.report.m_p.to_string(),
            format!("{:.6}", self.report.br),
            format!("{:.6}", self.report.ue),
            format!("{:.6}", self.report.co),
            format!("{:.6}", self.report.runtime),
        ]
    }
}

/// Per-image noise seed: images get distinct streams, while every method,
/// m and noise level of one image share it.
pub fn image_seed(base: u64, index: usize) -> u64 {
    base.wrapping_add(index as u64)
}

/// Rows for one image plus `(context, error)` for every run that failed.
fn bench_image(index: usize, entry: &CorpusEntry, opts: &BenchOptions) -> (Vec<BenchResultRow>, Vec<(String, String)>) {
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    let loaded = load_image(&entry.image).and_then(|img| Ok((img, read_label_map(&entry.gt)?)));
    let (raw, gt) = match loaded {
        Ok(pair) => pair,
        Err(e) => {
            failures.push((entry.stem.clone(), e.to_string()));
            return (rows, failures);
        }
    };
    let seed = image_seed(opts.seed, index);
    for &method in &opts.methods {
        for &m in &opts.clusters {
            for &noise in &opts.noise {
                let run = || -> fuzzy_slic::Result<BenchResultRow> {
                    let noisy = match noise {
                        Some((kind, level)) => NoiseSpec::new(kind, level, seed)?.apply(&raw)?,
                        None => raw.clone(),
                    };
                    let lab = rgb_to_lab(&noisy);
                    let mut cfg = SegmentationConfig::new(m, method.default_compactness());
                    cfg.rng_seed = seed;
                    let start = Instant::now();
                    let seg = method.run(&lab, &cfg)?;
                    let runtime = if opts.no_timing { 0.0 } else { start.elapsed().as_secs_f64() };
                    Ok(BenchResultRow {
                        image: entry.stem.clone(),
                        method,
                        m,
                        compactness: cfg.compactness,
                        noise,
                        seed,
                        report: MetricReport::evaluate(&seg.labels, &gt, runtime)?,
                    })
                };
                match run() {
                    Ok(row) => rows.push(row),
                    Err(e) => {
                        let noise = match noise {
                            Some((k, l)) => format!("{k}:{l}"),
                            None => "none".into(),
                        };
                        failures.push((format!("{} {method} m={m} noise={noise}", entry.stem), e.to_string()));
                    }
                }
            }
        }
    }
    (rows, failures)
}

pub struct BenchOutcome {
    /// Rows in manifest order.
    pub rows: Vec<BenchResultRow>,
    /// `(run description, error)` for every skipped image or run.
    pub failures: Vec<(String, String)>,
}

/// Runs the sweep, images in parallel; rows come back in manifest order.
pub fn run_bench(manifest: &CorpusManifest, opts: &BenchOptions) -> BenchOutcome {
    let per_image: Vec<_> = manifest
        .entries
        .par_iter()
        .enumerate()
        .map(|(i, e)| bench_image(i, e, opts))
        .collect();
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for (r, f) in per_image {
        rows.extend(r);
        failures.extend(f);
    }
    BenchOutcome { rows, failures }
}

pub fn write_csv(rows: &[BenchResultRow], out: impl Write) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(CSV_HEADER.split(','))?;
    for row in rows {
        w.write_record(row.record())?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct MethodSummary {
    pub method: Method,
    pub rows: usize,
    pub br: f64,
    pub ue: f64,
    pub co: f64,
    /// Mean over (m, noise) groups of the count variance across images.
    pub vsn: f64,
    /// Normalised AUC of BR, UE and CO against m, averaged over noise
    /// settings. `None` with fewer than two distinct m.
    pub auc: Option<[f64; 3]>,
}

fn noise_key(n: NoiseConfig) -> (String, u64) {
    match n {
        Some((k, l)) => (k.name().to_string(), l.to_bits()),
        None => (String::new(), 0),
    }
}

pub fn summarize(rows: &[BenchResultRow]) -> Result<Vec<MethodSummary>> {
    let mut by_method: BTreeMap<Method, Vec<&BenchResultRow>> = BTreeMap::new();
    for r in rows {
        by_method.entry(r.method).or_default().push(r);
    }
    let mut out = Vec::new();
    for (method, rows) in by_method {
        let n = rows.len() as f64;
        let mean = |f: fn(&MetricReport) -> f64| rows.iter().map(|r| f(&r.report)).sum::<f64>() / n;

        let mut groups: BTreeMap<(usize, (String, u64)), Vec<usize>> = BTreeMap::new();
        let mut curves: BTreeMap<(String, u64), BTreeMap<usize, Vec<[f64; 3]>>> = BTreeMap::new();
        for r in &rows {
            groups.entry((r.m, noise_key(r.noise))).or_default().push(r.report.m_p);
            curves
                .entry(noise_key(r.noise))
                .or_default()
                .entry(r.m)
                .or_default()
                .push([r.report.br, r.report.ue, r.report.co]);
        }
        let mut vsn_sum = 0.0;
        for counts in groups.values() {
            vsn_sum += vsn(counts)?;
        }

        let mut auc = [0.0; 3];
        let mut curves_used = 0;
        for curve in curves.values() {
            if curve.len() < 2 {
                continue;
            }
            let xs: Vec<f64> = curve.keys().map(|&m| m as f64).collect();
            for (k, slot) in auc.iter_mut().enumerate() {
                let ys: Vec<f64> = curve
                    .values()
                    .map(|v| v.iter().map(|p| p[k]).sum::<f64>() / v.len() as f64)
                    .collect();
                *slot += normalized_auc(&xs, &ys)?;
            }
            curves_used += 1;
        }

        out.push(MethodSummary {
            method,
            rows: rows.len(),
            br: mean(|r| r.br),
            ue: mean(|r| r.ue),
            co: mean(|r| r.co),
            vsn: vsn_sum / groups.len() as f64,
            auc: (curves_used > 0).then(|| auc.map(|a| a / curves_used as f64)),
        });
    }
    Ok(out)
}

impl fmt::Display for MethodSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "method={} rows={} br={:.4} ue={:.4} co={:.4} vsn={:.4}",
            self.method, self.rows, self.br, self.ue, self.co, self.vsn
        )?;
        match self.auc {
            Some([br, ue, co]) => write!(f, " auc_br={br:.4} auc_ue={ue:.4} auc_co={co:.4}"),
            None => write!(f, " auc_br=n/a auc_ue=n/a auc_co=n/a"),
        }
    }
}

pub fn parse_clusters(s: &str) -> Result<Vec<usize>> {
    let values = s
        .split(',')
        .map(|v| v.trim().parse::<usize>().map_err(|_| anyhow!("bad cluster count '{v}'")))
        .collect::<Result<Vec<_>>>()?;
    if values.contains(&0) {
        bail!("cluster counts must be positive");
    }
    Ok(values)
}
