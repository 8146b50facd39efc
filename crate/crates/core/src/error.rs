use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("failed to decode image {path}: {message}")]
    Decode { path: PathBuf, message: String },

    #[error("failed to encode image {path}: {message}")]
    Encode { path: PathBuf, message: String },

    #[error("image too small: {width}x{height} (minimum 3x3)")]
    ImageTooSmall { width: usize, height: usize },

    #[error("dimension mismatch: expected {expected:?}, got {actual:?}")]
    DimensionMismatch {
        expected: (usize, usize),
        actual: (usize, usize),
    },

    #[error("label overflow: label {label} does not fit in 16 bits")]
    LabelOverflow { label: u32 },

    #[error("malformed label map {path}: {message}")]
    MalformedLabelMap { path: PathBuf, message: String },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("requested {requested} clusters but the image has only {pixels} pixels")]
    TooManyClusters { requested: usize, pixels: usize },

    #[error("pixel {pixel} has no candidate clusters")]
    NoCandidates { pixel: usize },

    #[error("regeneration not applicable: generated {generated} >= requested {requested}")]
    RegenerationNotApplicable { requested: usize, generated: usize },

    #[error("target count {target} exceeds available superpixels {available}")]
    TargetTooLarge { target: usize, available: usize },

    #[error("unresolvable peel plan: no removal candidate has a surviving neighbour")]
    UnresolvablePlan,

    #[error("cannot reach target count {target}: last attempt generated {generated}")]
    CannotReachTarget { target: usize, generated: usize },

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("x values must be strictly increasing")]
    NonMonotone,
}
