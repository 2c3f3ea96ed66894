//! Numeric traits shared by the layout math.

use std::fmt::Debug;

use num_traits::{Float, FromPrimitive, Num, ToPrimitive};

/// Field-like scalar used for rectangles, occupancy grids and heatmaps.
///
/// Implemented for `f32`, `f64` and any other type meeting the bounds, which
/// includes `num_rational::Ratio<i64>` for exact rasterization.
pub trait Scalar:
    Num + Copy + PartialOrd + FromPrimitive + ToPrimitive + Debug + Send + Sync + 'static
{
    /// Converts an `f64` literal or decoded value. Panics only for types that
    /// cannot represent finite doubles at all.
    fn of(v: f64) -> Self {
        Self::from_f64(v).expect("scalar type cannot represent a finite f64")
    }

    fn of_usize(n: usize) -> Self {
        Self::from_usize(n).expect("scalar type cannot represent a grid index")
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    fn max_of(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    fn min_of(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }
}

impl<T> Scalar for T where
    T: Num + Copy + PartialOrd + FromPrimitive + ToPrimitive + Debug + Send + Sync + 'static
{
}

/// Scalar with a square root, needed for descriptor normalization.
pub trait Real: Scalar + Float {}

impl<T: Scalar + Float> Real for T {}
