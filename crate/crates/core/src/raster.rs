//! Exact rectangle-to-grid coverage.

use crate::layout::{ElementCategory, Rect, SlideLayout};
use crate::scalar::Scalar;

/// Square grid stored row-major; cell `(r, c)` spans
/// `x in [c/G, (c+1)/G]`, `y in [r/G, (r+1)/G]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid<T> {
    g: usize,
    cells: Vec<T>,
}

impl<T: Scalar> Grid<T> {
    pub fn zeros(g: usize) -> Self {
        Self {
            g,
            cells: vec![T::zero(); g * g],
        }
    }

    pub fn from_cells(g: usize, cells: Vec<T>) -> Self {
        assert_eq!(cells.len(), g * g, "grid of size {g} needs {} cells", g * g);
        Self { g, cells }
    }

    pub fn g(&self) -> usize {
        self.g
    }

    pub fn get(&self, row: usize, col: usize) -> T {
        self.cells[row * self.g + col]
    }

    pub fn cells(&self) -> &[T] {
        &self.cells
    }

    pub fn into_cells(self) -> Vec<T> {
        self.cells
    }

    pub fn max(&self) -> T {
        self.cells.iter().fold(T::zero(), |m, &v| m.max_of(v))
    }

    pub fn sum(&self) -> T {
        self.cells.iter().fold(T::zero(), |s, &v| s + v)
    }
}

/// Fraction of cell `(row, col)` covered by `rect` on a `g`-grid.
///
/// Works in grid units so cell edges are exact integers; a rectangle that
/// only touches a cell edge contributes zero.
pub fn cell_coverage<T: Scalar>(rect: &Rect<T>, g: usize, row: usize, col: usize) -> T {
    let scale = T::of_usize(g);
    let span = |lo: T, hi: T, cell: usize| {
        let (a, b) = (T::of_usize(cell), T::of_usize(cell + 1));
        let overlap = (hi * scale).min_of(b) - (lo * scale).max_of(a);
        if overlap > T::zero() {
            overlap.min_of(T::one())
        } else {
            T::zero()
        }
    };
    let fx = span(rect.x(), rect.right(), col);
    if fx == T::zero() {
        return T::zero();
    }
    fx * span(rect.y(), rect.bottom(), row)
}

/// Cells a rectangle may touch along one axis, padded by one on each side so
/// float rounding of the bounds can never drop a covered cell.
fn cell_range<T: Scalar>(lo: T, hi: T, g: usize) -> std::ops::Range<usize> {
    let gf = g as f64;
    let first = (lo.to_f64_lossy() * gf).floor() - 1.0;
    let last = (hi.to_f64_lossy() * gf).ceil() + 1.0;
    let first = if first.is_finite() { first.max(0.0) as usize } else { 0 };
    let last = if last.is_finite() { (last.max(0.0) as usize).min(g) } else { g };
    first.min(last)..last
}

/// Coverage grid of one category: each cell holds the largest fraction of
/// its area covered by any single box of that category.
///
/// # Panics
/// If `g` is zero.
pub fn rasterize<T: Scalar>(layout: &SlideLayout<T>, category: ElementCategory, g: usize) -> Grid<T> {
    assert!(g >= 1, "grid size must be at least 1");
    let mut grid = Grid::<T>::zeros(g);
    for rect in layout.rects_of(category) {
        for row in cell_range(rect.y(), rect.bottom(), g) {
            for col in cell_range(rect.x(), rect.right(), g) {
                let v = cell_coverage(rect, g, row, col);
                let cell: &mut T = &mut grid.cells[row * g + col];
                *cell = cell.max_of(v);
            }
        }
    }
    grid
}
