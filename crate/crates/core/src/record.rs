//! Line-delimited JSON records: corpus annotations, feature vectors and
//! heatmap grids.

use std::collections::HashMap;
use std::io::BufRead;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::error::LayoutError;
use crate::heatmap::{HeatmapGrid, HeatmapMode};
use crate::layout::{ElementCategory, LayoutElement, Rect, SlideLayout};
use crate::scalar::Scalar;

/// One element of an annotation record, as it appears on the wire.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ElementRecord {
    pub category: String,
    pub bbox: Vec<f64>,
}

/// One corpus line: `{"id", "source", "image", "elements"}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnotationRecord {
    #[serde(default)]
    pub id: Option<String>,
    #[serde(default)]
    pub source: String,
    #[serde(default)]
    pub image: Option<String>,
    #[serde(default)]
    pub elements: Vec<ElementRecord>,
}

pub fn validate_element<T: Scalar>(
    index: usize,
    raw: &ElementRecord,
) -> Result<LayoutElement<T>, LayoutError> {
    let category: ElementCategory = raw.category.parse()?;
    let bbox: [f64; 4] = raw.bbox.as_slice().try_into().map_err(|_| LayoutError::MalformedBbox {
        element: index,
        len: raw.bbox.len(),
    })?;
    Ok(LayoutElement::new(category, Rect::from_bbox_for_element(index, bbox)?))
}

pub fn validate_elements<T: Scalar>(raw: &[ElementRecord]) -> Result<Vec<LayoutElement<T>>, LayoutError> {
    raw.iter()
        .enumerate()
        .map(|(i, e)| validate_element(i, e))
        .collect()
}

/// Turns a decoded annotation record into a validated layout. Rectangles are
/// clamped onto the canvas and category names are matched case-insensitively.
pub fn validate_layout<T: Scalar>(raw: &AnnotationRecord) -> Result<SlideLayout<T>, LayoutError> {
    let id = match raw.id.as_deref().map(str::trim) {
        Some(id) if !id.is_empty() => id.to_string(),
        _ => return Err(LayoutError::MissingId),
    };
    Ok(SlideLayout {
        id,
        source: raw.source.clone(),
        image_ref: raw.image.clone().filter(|s| !s.is_empty()),
        elements: validate_elements(&raw.elements)?,
    })
}

pub fn element_record<T: Scalar>(element: &LayoutElement<T>) -> ElementRecord {
    ElementRecord {
        category: element.category.as_str().to_string(),
        bbox: element.rect.to_bbox().to_vec(),
    }
}

pub fn to_record<T: Scalar>(layout: &SlideLayout<T>) -> AnnotationRecord {
    AnnotationRecord {
        id: Some(layout.id.clone()),
        source: layout.source.clone(),
        image: layout.image_ref.clone(),
        elements: layout.elements.iter().map(element_record).collect(),
    }
}

/// Parses and validates a single JSON line.
pub fn parse_line<T: Scalar>(line: &str) -> Result<SlideLayout<T>, LayoutError> {
    let raw: AnnotationRecord =
        serde_json::from_str(line).map_err(|e| LayoutError::Parse(e.to_string()))?;
    validate_layout(&raw)
}

/// Outcome of one non-blank corpus line; `line` is 1-based.
#[derive(Debug, Clone)]
pub struct CorpusLine<T> {
    pub line: usize,
    pub result: Result<SlideLayout<T>, LayoutError>,
}

/// Reads every non-blank line, keeping per-line failures instead of stopping
/// at the first one.
pub fn read_corpus_lines<T: Scalar, R: BufRead>(reader: R) -> std::io::Result<Vec<CorpusLine<T>>> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(CorpusLine {
            line: i + 1,
            result: parse_line(&line),
        });
    }
    Ok(out)
}

/// An id that appears more than once: the line it first appeared on and the
/// repeating line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DuplicateLine {
    pub id: String,
    pub first_line: usize,
    pub line: usize,
}

pub fn find_duplicates<T>(lines: &[CorpusLine<T>]) -> Vec<DuplicateLine> {
    let mut seen: HashMap<&str, usize> = HashMap::new();
    let mut dups = Vec::new();
    for entry in lines {
        if let Ok(layout) = &entry.result {
            match seen.get(layout.id.as_str()) {
                Some(&first_line) => dups.push(DuplicateLine {
                    id: layout.id.clone(),
                    first_line,
                    line: entry.line,
                }),
                None => {
                    seen.insert(layout.id.as_str(), entry.line);
                }
            }
        }
    }
    dups
}

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("line {line}: {source}")]
    Invalid { line: usize, source: LayoutError },
    #[error("line {line}: duplicate id {id:?} (first seen on line {first_line})")]
    Duplicate { id: String, first_line: usize, line: usize },
}

/// Strict corpus load: the first invalid line or repeated id aborts.
pub fn read_corpus<T: Scalar, R: BufRead>(reader: R) -> Result<Vec<SlideLayout<T>>, CorpusError> {
    let lines = read_corpus_lines(reader)?;
    if let Some(d) = find_duplicates(&lines).into_iter().next() {
        return Err(CorpusError::Duplicate {
            id: d.id,
            first_line: d.first_line,
            line: d.line,
        });
    }
    lines
        .into_iter()
        .map(|l| l.result.map_err(|source| CorpusError::Invalid { line: l.line, source }))
        .collect()
}

pub fn write_corpus<T: Scalar, W: std::io::Write>(mut out: W, corpus: &[SlideLayout<T>]) -> std::io::Result<()> {
    for layout in corpus {
        serde_json::to_writer(&mut out, &to_record(layout))?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

/// Externally computed (or exported) descriptor: `{"id", "g", "values"}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureRecord {
    pub id: String,
    pub g: usize,
    pub values: Vec<f64>,
}

/// `{"mode", "g", "cells"}` with cells as row-major rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeatmapRecord {
    pub mode: HeatmapMode,
    pub g: usize,
    pub cells: Vec<Vec<f64>>,
}

impl HeatmapRecord {
    pub fn normalized<T: Scalar>(grid: &HeatmapGrid<T>) -> Self {
        Self::from_cells(grid.mode(), grid.g(), grid.cells())
    }

    /// Unnormalized mean coverage, used to check mode additivity.
    pub fn raw<T: Scalar>(grid: &HeatmapGrid<T>) -> Self {
        Self::from_cells(grid.mode(), grid.g(), &grid.raw_cells())
    }

    fn from_cells<T: Scalar>(mode: HeatmapMode, g: usize, cells: &[T]) -> Self {
        Self {
            mode,
            g,
            cells: cells
                .chunks(g.max(1))
                .map(|row| row.iter().map(|v| v.to_f64_lossy()).collect())
                .collect(),
        }
    }
}
