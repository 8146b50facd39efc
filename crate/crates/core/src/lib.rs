//! Superpixel segmentation with local spatial fuzzy C-means.
//!
//! Three pipelines share one set of building blocks:
//!
//! * [`fuzzy_slic`]: fuzzy clustering over at most three candidate
//!   superpixels per pixel, followed by connectivity enforcement.
//! * [`fuzzy_slicnc`]: the same, then regenerates and merges smallest
//!   regions until exactly the requested count remains.
//! * [`slic_segment`]: hard local K-means, kept as a baseline.
//!
//! [`noise`] injects seeded corruption and [`metrics`] scores results
//! against region ground truth.

pub mod clustering;
pub mod connectivity;
pub mod error;
pub mod imaging;
pub mod metrics;
pub mod noise;
pub mod peeling;
pub mod slic;
pub mod synthetic;

pub use clustering::{fuzzy_slic, fuzzy_slic_observed, Segmentation, SegmentationConfig};
pub use connectivity::LabelMap;
pub use error::{Error, Result};
pub use imaging::{rgb_to_lab, LabImage, RawImage};
pub use peeling::fuzzy_slicnc;
pub use slic::slic_segment;
