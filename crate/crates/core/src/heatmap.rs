//! Corpus layout density ("shadow guidance") grids.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::layout::{ElementCategory, SlideLayout};
use crate::raster::rasterize;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HeatmapMode {
    Title,
    Text,
    Figure,
    All,
}

impl HeatmapMode {
    pub const ALL: [HeatmapMode; 4] = [Self::Title, Self::Text, Self::Figure, Self::All];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Title => "title",
            Self::Text => "text",
            Self::Figure => "figure",
            Self::All => "all",
        }
    }

    pub fn category(self) -> Option<ElementCategory> {
        match self {
            Self::Title => Some(ElementCategory::Title),
            Self::Text => Some(ElementCategory::Text),
            Self::Figure => Some(ElementCategory::Figure),
            Self::All => None,
        }
    }
}

impl fmt::Display for HeatmapMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnknownMode(pub String);

impl fmt::Display for UnknownMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "unknown heatmap mode {:?} (expected title, text, figure or all)", self.0)
    }
}

impl std::error::Error for UnknownMode {}

impl FromStr for HeatmapMode {
    type Err = UnknownMode;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "title" => Ok(Self::Title),
            "text" => Ok(Self::Text),
            "figure" => Ok(Self::Figure),
            "all" => Ok(Self::All),
            _ => Err(UnknownMode(s.to_string())),
        }
    }
}

/// Max-normalized density grid for one mode.
///
/// Keeps the per-cell coverage sums and the number of contributing layouts
/// so a draft can be folded in without the corpus.
#[derive(Debug, Clone, PartialEq)]
pub struct HeatmapGrid<T> {
    mode: HeatmapMode,
    g: usize,
    count: usize,
    sums: Vec<T>,
    cells: Vec<T>,
}

impl<T: Scalar> HeatmapGrid<T> {
    fn from_sums(mode: HeatmapMode, g: usize, count: usize, sums: Vec<T>) -> Self {
        let n = T::of_usize(count);
        let raw: Vec<T> = sums.iter().map(|&s| s / n).collect();
        let max = raw.iter().fold(T::zero(), |m, &v| m.max_of(v));
        let cells = if max > T::zero() {
            raw.iter().map(|&v| v / max).collect()
        } else {
            vec![T::zero(); g * g]
        };
        Self {
            mode,
            g,
            count,
            sums,
            cells,
        }
    }

    pub fn mode(&self) -> HeatmapMode {
        self.mode
    }

    pub fn g(&self) -> usize {
        self.g
    }

    /// Number of layouts folded into the grid.
    pub fn count(&self) -> usize {
        self.count
    }

    /// Normalized cells in `[0, 1]`, row-major.
    pub fn cells(&self) -> &[T] {
        &self.cells
    }

    pub fn get(&self, row: usize, col: usize) -> T {
        self.cells[row * self.g + col]
    }

    /// Mean coverage per cell before max-normalization.
    pub fn raw_cells(&self) -> Vec<T> {
        let n = T::of_usize(self.count);
        self.sums.iter().map(|&s| s / n).collect()
    }

    pub fn max(&self) -> T {
        self.cells.iter().fold(T::zero(), |m, &v| m.max_of(v))
    }
}

/// Per-cell contribution of one layout to a mode.
fn contribution<T: Scalar>(layout: &SlideLayout<T>, mode: HeatmapMode, g: usize) -> Vec<T> {
    match mode.category() {
        Some(c) => rasterize(layout, c, g).into_cells(),
        None => {
            let [t, x, f] = ElementCategory::ALL.map(|c| rasterize(layout, c, g).into_cells());
            t.iter().zip(&x).zip(&f).map(|((&a, &b), &c)| a + b + c).collect()
        }
    }
}

/// Density of a corpus: mean per-cell coverage over all slides, divided by
/// its maximum. A mode with no boxes anywhere yields all zeros.
///
/// Each cell sums its contributions in ascending order, so the result does
/// not depend on corpus order.
pub fn compute_heatmap<T: Scalar>(corpus: &[SlideLayout<T>], mode: HeatmapMode, g: usize) -> Result<HeatmapGrid<T>> {
    if g == 0 {
        return Err(Error::ZeroGrid);
    }
    if corpus.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let per_slide: Vec<Vec<T>> = corpus.iter().map(|l| contribution(l, mode, g)).collect();
    let mut column = Vec::with_capacity(corpus.len());
    let sums = (0..g * g)
        .map(|cell| {
            column.clear();
            column.extend(per_slide.iter().map(|c| c[cell]).filter(|v| *v != T::zero()));
            column.sort_by(|a, b| a.partial_cmp(b).expect("coverage is never NaN"));
            column.iter().fold(T::zero(), |s, &v| s + v)
        })
        .collect();
    Ok(HeatmapGrid::from_sums(mode, g, corpus.len(), sums))
}

/// Folds an in-progress draft into a corpus heatmap as one more corpus
/// member. An empty draft returns the grid unchanged.
pub fn overlay_heatmap<T: Scalar>(corpus_grid: &HeatmapGrid<T>, draft: &SlideLayout<T>) -> HeatmapGrid<T> {
    if draft.is_empty() {
        return corpus_grid.clone();
    }
    let add = contribution(draft, corpus_grid.mode, corpus_grid.g);
    let sums = corpus_grid.sums.iter().zip(&add).map(|(&s, &a)| s + a).collect();
    HeatmapGrid::from_sums(corpus_grid.mode, corpus_grid.g, corpus_grid.count + 1, sums)
}
