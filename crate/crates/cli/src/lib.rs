//! `fuzzyslic` command-line front end: segment one image, inject noise,
//! synthesise a corpus, or benchmark methods over a corpus.

pub mod bench;
pub mod corpus;

use std::ffi::OsString;
use std::fs::{self, File};
use std::io::BufWriter;
use std::path::PathBuf;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use fuzzy_slic::imaging::{load_image, render_overlay, rgb_to_lab, save_image, write_label_map};
use fuzzy_slic::noise::{NoiseKind, NoiseSpec};
use fuzzy_slic::synthetic::{mixed_corpus, piecewise_constant, textured, SyntheticImage};
use fuzzy_slic::SegmentationConfig;

use bench::{expand_noise, parse_clusters, run_bench, summarize, write_csv, BenchOptions, Method, NoiseArg};
use corpus::ingest_corpus;

#[derive(Debug, Parser)]
#[command(name = "fuzzyslic", version, about = "Fuzzy SLIC superpixel segmentation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Segment a single image.
    Segment(SegmentArgs),
    /// Write a noisy copy of an image.
    Noise(NoiseArgs),
    /// Score methods over a corpus and write a CSV table.
    Bench(BenchArgs),
    /// Generate a synthetic corpus with ground truth.
    Synth(SynthArgs),
}

#[derive(Debug, Args)]
pub struct SegmentArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum)]
    pub method: Method,
    #[arg(long)]
    pub clusters: usize,
    /// Defaults to 15 (fuzzy-slic), 13 (fuzzy-slicnc) or 20 (slic).
    #[arg(long)]
    pub compactness: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// 16-bit PGM label map output.
    #[arg(long)]
    pub labels: Option<PathBuf>,
    /// PNG with superpixel contours drawn over the input.
    #[arg(long)]
    pub overlay: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct NoiseArgs {
    #[arg(long, value_parser = parse_kind)]
    pub kind: NoiseKind,
    /// Standard deviation, or density for saltpepper.
    #[arg(long)]
    pub level: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub input: PathBuf,
    /// PNG output.
    #[arg(long)]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Directory with `images/` and `gt/` subdirectories.
    #[arg(long)]
    pub corpus: PathBuf,
    /// Comma-separated: fuzzy-slic, fuzzy-slicnc, slic.
    #[arg(long, value_delimiter = ',', required = true)]
    pub methods: Vec<Method>,
    /// Comma-separated cluster counts.
    #[arg(long, value_parser = parse_clusters)]
    pub clusters: std::vec::Vec<usize>,
    /// `none` or `kind:level,level,...`; may be repeated.
    #[arg(long)]
    pub noise: Vec<NoiseArg>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
    /// Write runtime_s as 0 so reruns are byte-identical.
    #[arg(long)]
    pub no_timing: bool,
    /// Worker threads; all cores by default.
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 10)]
    pub count: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Fixed size `WxH`; mixed sizes from 128x128 to 321x481 otherwise.
    #[arg(long, value_parser = parse_size)]
    pub size: Option<(usize, usize)>,
    /// Regions per image when a fixed size is given.
    #[arg(long, default_value_t = 12)]
    pub regions: usize,
}

fn parse_kind(s: &str) -> Result<NoiseKind, String> {
    s.parse().map_err(|e: fuzzy_slic::Error| e.to_string())
}

fn parse_size(s: &str) -> Result<(usize, usize), String> {
    let (w, h) = s.split_once('x').ok_or("size must look like 481x321")?;
    let parse = |v: &str| v.parse::<usize>().map_err(|_| format!("bad size component '{v}'"));
    Ok((parse(w)?, parse(h)?))
}

/// Parses `args` (program name first) and runs the command; returns the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
        }
    };
    let result = match cli.command {
        Command::Segment(a) => cmd_segment(&a),
        Command::Noise(a) => cmd_noise(&a),
        Command::Bench(a) => cmd_bench(&a),
        Command::Synth(a) => cmd_synth(&a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            1
        }
    }
}

pub fn cmd_segment(args: &SegmentArgs) -> Result<i32> {
    let raw = load_image(&args.input)?;
    let lab = rgb_to_lab(&raw);
    let mut cfg = SegmentationConfig::new(
        args.clusters,
        args.compactness.unwrap_or_else(|| args.method.default_compactness()),
    );
    cfg.rng_seed = args.seed;
    let start = Instant::now();
    let seg = args.method.run(&lab, &cfg)?;
    let runtime = start.elapsed().as_secs_f64();
    if let Some(path) = &args.labels {
        write_label_map(&seg.labels, path)?;
    }
    if let Some(path) = &args.overlay {
        render_overlay(&raw, &seg.labels, path)?;
    }
    println!("m_p={} runtime_s={runtime:.6}", seg.superpixels);
    Ok(0)
}

pub fn cmd_noise(args: &NoiseArgs) -> Result<i32> {
    let spec = NoiseSpec::new(args.kind, args.level, args.seed)?;
    let raw = load_image(&args.input)?;
    save_image(&spec.apply(&raw)?, &args.output)?;
    Ok(0)
}

pub fn cmd_bench(args: &BenchArgs) -> Result<i32> {
    if args.clusters.is_empty() {
        bail!("--clusters needs at least one value");
    }
    let manifest = ingest_corpus(&args.corpus)?;
    let opts = BenchOptions {
        methods: args.methods.clone(),
        clusters: args.clusters.clone(),
        noise: expand_noise(&args.noise),
        seed: args.seed,
        no_timing: args.no_timing,
    };
    let outcome = match args.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .context("cannot start worker threads")?
            .install(|| run_bench(&manifest, &opts)),
        None => run_bench(&manifest, &opts),
    };
    for (what, err) in &outcome.failures {
        eprintln!("error: skipped {what}: {err}");
    }
    let file = File::create(&args.out).with_context(|| format!("cannot create {}", args.out.display()))?;
    write_csv(&outcome.rows, BufWriter::new(file))?;
    for summary in summarize(&outcome.rows)? {
        println!("{summary}");
    }
    Ok(if outcome.failures.is_empty() { 0 } else { 1 })
}

pub fn cmd_synth(args: &SynthArgs) -> Result<i32> {
    let images = args.out.join("images");
    let gt = args.out.join("gt");
    fs::create_dir_all(&images)?;
    fs::create_dir_all(&gt)?;
    let corpus: Vec<SyntheticImage> = match args.size {
        Some((w, h)) => (0..args.count)
            .map(|i| {
                let seed = args.seed.wrapping_add(i as u64);
                if i % 2 == 0 {
                    piecewise_constant(w, h, args.regions, seed)
                } else {
                    textured(w, h, args.regions, seed)
                }
            })
            .collect::<fuzzy_slic::Result<_>>()?,
        None => mixed_corpus(args.count, args.seed)?.into_iter().map(|(_, s)| s).collect(),
    };
    let width = args.count.max(1).to_string().len().max(3);
    for (i, s) in corpus.iter().enumerate() {
        let stem = format!("img{i:0width$}");
        save_image(&s.image, images.join(format!("{stem}.png")))?;
        write_label_map(&s.gt, gt.join(format!("{stem}.pgm")))?;
    }
    println!("wrote {} images to {}", corpus.len(), args.out.display());
    Ok(0)
}
