//! Corpus discovery: `images/<stem>.{png,ppm,pnm}` paired with `gt/<stem>.pgm`.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use fuzzy_slic::imaging::{load_image, read_label_map};

const IMAGE_EXTENSIONS: [&str; 3] = ["png", "ppm", "pnm"];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusEntry {
    pub stem: String,
    pub image: PathBuf,
    pub gt: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CorpusManifest {
    pub root: PathBuf,
    /// Sorted by stem.
    pub entries: Vec<CorpusEntry>,
}

impl CorpusManifest {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

fn files_by_stem(dir: &Path, accept: impl Fn(&str) -> bool) -> Result<BTreeMap<String, PathBuf>> {
    let mut out = BTreeMap::new();
    for entry in fs::read_dir(dir).with_context(|| format!("cannot read {}", dir.display()))? {
        let path = entry?.path();
        if !path.is_file() {
            continue;
        }
        let ext = path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase);
        let Some(stem) = path.file_stem().and_then(|s| s.to_str()) else {
            continue;
        };
        if !ext.as_deref().is_some_and(&accept) {
            continue;
        }
        if let Some(previous) = out.insert(stem.to_string(), path.clone()) {
            bail!(
                "duplicate stem '{stem}': {} and {}",
                previous.display(),
                path.display()
            );
        }
    }
    Ok(out)
}

/// Pairs images with ground truth by stem and checks their dimensions agree.
pub fn ingest_corpus(root: impl AsRef<Path>) -> Result<CorpusManifest> {
    let root = root.as_ref();
    if !root.is_dir() {
        bail!("corpus directory {} does not exist", root.display());
    }
    let images = files_by_stem(&root.join("images"), |e| IMAGE_EXTENSIONS.contains(&e))?;
    let mut gts = files_by_stem(&root.join("gt"), |e| e == "pgm")?;

    let mut entries = Vec::with_capacity(images.len());
    for (stem, image) in images {
        let Some(gt) = gts.remove(&stem) else {
            bail!("image '{stem}' has no ground truth gt/{stem}.pgm");
        };
        let img = load_image(&image)?;
        let labels = read_label_map(&gt)?;
        if (img.width(), img.height()) != labels.dims() {
            bail!(
                "'{stem}': image is {}x{} but ground truth is {}x{}",
                img.width(),
                img.height(),
                labels.width(),
                labels.height()
            );
        }
        entries.push(CorpusEntry { stem, image, gt });
    }
    if let Some(stem) = gts.keys().next() {
        bail!("ground truth '{stem}' has no matching image");
    }
    if entries.is_empty() {
        eprintln!("warning: corpus {} contains no image/ground-truth pairs", root.display());
    }
    Ok(CorpusManifest {
        root: root.to_path_buf(),
        entries,
    })
}
