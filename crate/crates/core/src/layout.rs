//! Layout domain types.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::LayoutError;
use crate::scalar::Scalar;

/// How far outside `[0, 1]` an ingested coordinate may stray before it is
/// rejected instead of clamped.
pub const INGEST_TOLERANCE: f64 = 1e-6;
/// Slack allowed on stored rectangles (`x + w <= 1 + STORED_TOLERANCE`).
pub const STORED_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ElementCategory {
    Title,
    Text,
    Figure,
}

impl ElementCategory {
    /// Channel order used by descriptors.
    pub const ALL: [ElementCategory; 3] = [Self::Title, Self::Text, Self::Figure];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Title => "title",
            Self::Text => "text",
            Self::Figure => "figure",
        }
    }

    pub fn channel(self) -> usize {
        self as usize
    }
}

impl fmt::Display for ElementCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ElementCategory {
    type Err = LayoutError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "title" => Ok(Self::Title),
            "text" => Ok(Self::Text),
            "figure" => Ok(Self::Figure),
            _ => Err(LayoutError::UnknownCategory(s.to_string())),
        }
    }
}

/// Axis-aligned rectangle in normalized canvas coordinates.
///
/// Always satisfies `0 <= x`, `0 <= y`, `w > 0`, `h > 0`, and `x + w`,
/// `y + h` no larger than 1 (up to [`STORED_TOLERANCE`] of float noise).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect<T> {
    x: T,
    y: T,
    w: T,
    h: T,
}

impl<T: Scalar> Rect<T> {
    /// Validates and clamps a rectangle.
    ///
    /// `x` and `y` may overshoot `[0, 1]` by at most [`INGEST_TOLERANCE`] and
    /// are clamped into range; the far edges are clamped to the canvas.
    pub fn new(x: T, y: T, w: T, h: T) -> Result<Self, LayoutError> {
        Self::new_for_element(0, x, y, w, h)
    }

    pub(crate) fn new_for_element(element: usize, x: T, y: T, w: T, h: T) -> Result<Self, LayoutError> {
        let zero = T::zero();
        let one = T::one();
        let tol = T::of(INGEST_TOLERANCE);
        for (axis, value) in [("w", w), ("h", h)] {
            if value <= zero {
                return Err(LayoutError::NonPositiveSize {
                    element,
                    axis,
                    value: value.to_f64_lossy(),
                });
            }
        }
        for (axis, value) in [("x", x), ("y", y)] {
            if value < zero - tol || value > one + tol {
                return Err(LayoutError::OutOfRange {
                    element,
                    axis,
                    value: value.to_f64_lossy(),
                });
            }
        }
        let x = x.max_of(zero).min_of(one);
        let y = y.max_of(zero).min_of(one);
        let w = w.min_of(one - x);
        let h = h.min_of(one - y);
        for (axis, value) in [("w", w), ("h", h)] {
            if value <= zero {
                return Err(LayoutError::NonPositiveSize {
                    element,
                    axis,
                    value: value.to_f64_lossy(),
                });
            }
        }
        Ok(Self { x, y, w, h })
    }

    /// Builds a rectangle from an `[x, y, w, h]` array of doubles.
    pub fn from_bbox(bbox: [f64; 4]) -> Result<Self, LayoutError> {
        Self::from_bbox_for_element(0, bbox)
    }

    pub(crate) fn from_bbox_for_element(element: usize, bbox: [f64; 4]) -> Result<Self, LayoutError> {
        if bbox.iter().any(|v| !v.is_finite()) {
            return Err(LayoutError::NonFinite { element });
        }
        let [x, y, w, h] = bbox;
        Self::new_for_element(element, T::of(x), T::of(y), T::of(w), T::of(h))
    }

    pub fn x(&self) -> T {
        self.x
    }

    pub fn y(&self) -> T {
        self.y
    }

    pub fn w(&self) -> T {
        self.w
    }

    pub fn h(&self) -> T {
        self.h
    }

    pub fn right(&self) -> T {
        self.x + self.w
    }

    pub fn bottom(&self) -> T {
        self.y + self.h
    }

    pub fn area(&self) -> T {
        self.w * self.h
    }

    pub fn to_bbox(&self) -> [f64; 4] {
        [
            self.x.to_f64_lossy(),
            self.y.to_f64_lossy(),
            self.w.to_f64_lossy(),
            self.h.to_f64_lossy(),
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LayoutElement<T> {
    pub category: ElementCategory,
    pub rect: Rect<T>,
}

impl<T: Scalar> LayoutElement<T> {
    pub fn new(category: ElementCategory, rect: Rect<T>) -> Self {
        Self { category, rect }
    }
}

/// One slide's labeled boxes plus where the slide came from.
#[derive(Debug, Clone, PartialEq)]
pub struct SlideLayout<T> {
    pub id: String,
    pub source: String,
    pub image_ref: Option<String>,
    pub elements: Vec<LayoutElement<T>>,
}

impl<T: Scalar> SlideLayout<T> {
    pub fn new(id: impl Into<String>, elements: Vec<LayoutElement<T>>) -> Self {
        Self {
            id: id.into(),
            source: String::new(),
            image_ref: None,
            elements,
        }
    }

    /// An unnamed layout, as drawn on the canvas.
    pub fn draft(elements: Vec<LayoutElement<T>>) -> Self {
        Self::new("", elements)
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn rects_of(&self, category: ElementCategory) -> impl Iterator<Item = &Rect<T>> + '_ {
        self.elements
            .iter()
            .filter(move |e| e.category == category)
            .map(|e| &e.rect)
    }

    pub fn count_of(&self, category: ElementCategory) -> usize {
        self.rects_of(category).count()
    }
}
