//! Occupancy-grid layout descriptors and cosine similarity.
//!
//! A descriptor concatenates the title, text and figure coverage grids
//! (row-major, in that order) and scales the whole vector to unit L2 norm.
//! Normalizing the whole vector rather than each channel keeps the relative
//! mass of the categories, so a mostly-figure layout stays far from a
//! mostly-text one.

use crate::error::{Error, Result};
use crate::layout::{ElementCategory, SlideLayout};
use crate::raster::rasterize;
use crate::record::FeatureRecord;
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector<T> {
    g: usize,
    values: Vec<T>,
}

impl<T: Real> FeatureVector<T> {
    /// Scales non-negative raw values to unit norm. An all-zero input is
    /// rejected since it can never be ranked.
    pub fn normalized(g: usize, mut values: Vec<T>) -> Result<Self> {
        if g == 0 {
            return Err(Error::ZeroGrid);
        }
        let dim = 3 * g * g;
        if values.len() != dim {
            return Err(Error::DimensionMismatch {
                left: values.len(),
                right: dim,
            });
        }
        if values.iter().any(|v| !v.is_finite() || *v < T::zero()) {
            return Err(Error::InvalidFeature("entries must be finite and non-negative".into()));
        }
        let norm = l2_norm(&values);
        if norm == T::zero() {
            return Err(Error::InvalidFeature("all entries are zero".into()));
        }
        for v in &mut values {
            *v = *v / norm;
        }
        Ok(Self { g, values })
    }

    /// Imports an externally computed descriptor. Values are renormalized.
    pub fn from_record(record: &FeatureRecord) -> Result<Self> {
        let values = record.values.iter().map(|&v| T::of(v)).collect();
        Self::normalized(record.g, values)
    }

    pub fn to_record(&self, id: &str) -> FeatureRecord {
        FeatureRecord {
            id: id.to_string(),
            g: self.g,
            values: self.values.iter().map(|v| v.to_f64_lossy()).collect(),
        }
    }

    pub fn g(&self) -> usize {
        self.g
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn channel(&self, category: ElementCategory) -> &[T] {
        let n = self.g * self.g;
        let start = category.channel() * n;
        &self.values[start..start + n]
    }

    pub fn norm(&self) -> T {
        l2_norm(&self.values)
    }
}

fn l2_norm<T: Real>(values: &[T]) -> T {
    values.iter().fold(T::zero(), |s, &v| s + v * v).sqrt()
}

/// Embeds a layout on a `g`-grid.
pub fn embed<T: Real>(layout: &SlideLayout<T>, g: usize) -> Result<FeatureVector<T>> {
    if g == 0 {
        return Err(Error::ZeroGrid);
    }
    if layout.is_empty() {
        return Err(Error::EmptyLayout);
    }
    let mut values = Vec::with_capacity(3 * g * g);
    for category in ElementCategory::ALL {
        values.extend_from_slice(rasterize(layout, category, g).cells());
    }
    FeatureVector::normalized(g, values).map_err(|_| Error::DegenerateLayout(layout.id.clone()))
}

/// Cosine similarity of two unit descriptors, in `[0, 1]`.
pub fn similarity<T: Real>(a: &FeatureVector<T>, b: &FeatureVector<T>) -> Result<T> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            left: a.dim(),
            right: b.dim(),
        });
    }
    Ok(dot(&a.values, &b.values))
}

/// Dot product clamped to `[0, 1]`; rounding can push the dot of two unit
/// vectors a few ulps past 1.
pub(crate) fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    let d = a.iter().zip(b).fold(T::zero(), |s, (&x, &y)| s + x * y);
    d.max_of(T::zero()).min_of(T::one())
}
