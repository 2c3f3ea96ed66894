use thiserror::Error;

/// Why an annotation record could not become a [`crate::SlideLayout`].
#[derive(Debug, Clone, PartialEq, Error)]
pub enum LayoutError {
    #[error("record has no id")]
    MissingId,
    #[error("unknown category {0:?} (expected title, text or figure)")]
    UnknownCategory(String),
    #[error("element {element}: bbox must have 4 numbers, got {len}")]
    MalformedBbox { element: usize, len: usize },
    #[error("element {element}: bbox contains a non-finite value")]
    NonFinite { element: usize },
    #[error("element {element}: {axis} extent must be positive, got {value}")]
    NonPositiveSize {
        element: usize,
        axis: &'static str,
        value: f64,
    },
    #[error("element {element}: {axis} = {value} lies outside [0, 1]")]
    OutOfRange {
        element: usize,
        axis: &'static str,
        value: f64,
    },
    #[error("invalid record: {0}")]
    Parse(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Layout(#[from] LayoutError),
    #[error("layout has no elements")]
    EmptyLayout,
    #[error("layout {0:?} has no positive-area coverage")]
    DegenerateLayout(String),
    #[error("query draft has no elements")]
    EmptyQuery,
    #[error("corpus is empty")]
    EmptyCorpus,
    #[error("duplicate layout id {0:?}")]
    DuplicateId(String),
    #[error("feature dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("invalid feature vector: {0}")]
    InvalidFeature(String),
    #[error("grid size must be at least 1")]
    ZeroGrid,
    #[error("k must be at least 1")]
    ZeroK,
    #[error("frame is {width}x{height}, hashing needs at least 9x8")]
    FrameTooSmall { width: usize, height: usize },
    #[error("frame buffer holds {actual} bytes, expected {expected}")]
    FrameBuffer { expected: usize, actual: usize },
    #[error("no frames to extract from")]
    NoFrames,
    #[error("invalid extractor config: {0}")]
    Config(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
