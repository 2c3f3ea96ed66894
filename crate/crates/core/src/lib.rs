//! Slide layout retrieval engine.
//!
//! Layouts are sets of labeled, axis-aligned boxes in normalized canvas
//! coordinates. They are rasterized into per-category occupancy grids, which
//! feed two consumers: the retrieval descriptor (three concatenated grids,
//! L2-normalized, compared by cosine) and the corpus heatmap used as shadow
//! guidance while drawing. The [`hash`] and [`detector`] modules turn a stream
//! of decoded video frames into distinct slides.
//!
//! The geometry is generic over the scalar type. Occupancy grids and heatmaps
//! only need field arithmetic, so they also run over exact rationals;
//! descriptors and retrieval need a square root and require a float.

pub mod descriptor;
pub mod detector;
pub mod error;
pub mod hash;
pub mod heatmap;
pub mod index;
pub mod layout;
pub mod raster;
pub mod record;
pub mod scalar;

pub use descriptor::{embed, similarity, FeatureVector};
pub use detector::{detect_slides, Detection, ExtractorConfig, SlideDetector};
pub use error::{Error, LayoutError};
pub use hash::{dhash, FrameHash, RgbFrame};
pub use heatmap::{compute_heatmap, overlay_heatmap, HeatmapGrid, HeatmapMode};
pub use index::{BuildOutcome, CorpusIndex, Hit, RetrievalResult};
pub use layout::{ElementCategory, LayoutElement, Rect, SlideLayout};
pub use raster::{rasterize, Grid};
pub use scalar::{Real, Scalar};

/// Descriptor grid size used when none is configured (768 dimensions).
pub const DEFAULT_DESCRIPTOR_G: usize = 16;
/// Heatmap grid size used when none is configured.
pub const DEFAULT_HEATMAP_G: usize = 32;
/// Number of results returned when a query does not ask for a specific count.
pub const DEFAULT_K: usize = 8;

pub type Rect64 = Rect<f64>;
pub type Rect32 = Rect<f32>;
pub type LayoutElement64 = LayoutElement<f64>;
pub type LayoutElement32 = LayoutElement<f32>;
pub type SlideLayout64 = SlideLayout<f64>;
pub type SlideLayout32 = SlideLayout<f32>;
pub type Grid64 = Grid<f64>;
pub type Grid32 = Grid<f32>;
pub type FeatureVector64 = FeatureVector<f64>;
pub type FeatureVector32 = FeatureVector<f32>;
pub type HeatmapGrid64 = HeatmapGrid<f64>;
pub type HeatmapGrid32 = HeatmapGrid<f32>;
pub type CorpusIndex64 = CorpusIndex<f64>;
pub type CorpusIndex32 = CorpusIndex<f32>;
pub type RetrievalResult64 = RetrievalResult<f64>;
