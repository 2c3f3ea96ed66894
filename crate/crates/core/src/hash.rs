//! Difference hashing of video frames.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

const COLS: usize = 9;
const ROWS: usize = 8;

/// 64-bit difference hash. Bit 63 holds cell (0, 0); bits run row-major, so
/// the hex form reads top-left to bottom-right.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct FrameHash(pub u64);

impl FrameHash {
    /// Number of differing bits.
    pub fn distance(self, other: FrameHash) -> u32 {
        (self.0 ^ other.0).count_ones()
    }
}

impl fmt::Display for FrameHash {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:016x}", self.0)
    }
}

impl FromStr for FrameHash {
    type Err = std::num::ParseIntError;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        u64::from_str_radix(s, 16).map(FrameHash)
    }
}

/// Borrowed packed RGB8 raster.
#[derive(Debug, Clone, Copy)]
pub struct RgbFrame<'a> {
    pub width: usize,
    pub height: usize,
    pub data: &'a [u8],
}

impl<'a> RgbFrame<'a> {
    pub fn new(width: usize, height: usize, data: &'a [u8]) -> Result<Self> {
        let expected = width * height * 3;
        if data.len() != expected {
            return Err(Error::FrameBuffer {
                expected,
                actual: data.len(),
            });
        }
        Ok(Self { width, height, data })
    }
}

/// Overlap, in units of 1/`parts` pixel, of each source pixel with each of
/// `parts` equal output bins spanning `len` pixels.
fn bin_weights(len: usize, parts: usize) -> Vec<Vec<(usize, u64)>> {
    // Source pixel p covers [p*parts, (p+1)*parts); bin b covers [b*len, (b+1)*len).
    (0..parts)
        .map(|b| {
            let (lo, hi) = (b * len, (b + 1) * len);
            (lo / parts..hi.div_ceil(parts))
                .filter_map(|p| {
                    let overlap = hi.min((p + 1) * parts).saturating_sub(lo.max(p * parts));
                    (overlap > 0).then_some((p, overlap as u64))
                })
                .collect()
        })
        .collect()
}

/// Hashes a frame: luma (0.299 R + 0.587 G + 0.114 B), area-averaged down to
/// 9 columns by 8 rows, then one bit per horizontally adjacent pair set when
/// the left cell is strictly brighter.
///
/// The downsample is done in integers (luma scaled by 1000, overlaps in
/// sub-pixel units). Every cell has the same area, so comparing the weighted
/// sums is exact and equal brightness never sets a bit.
pub fn dhash(frame: &RgbFrame<'_>) -> Result<FrameHash> {
    if frame.width < COLS || frame.height < ROWS {
        return Err(Error::FrameTooSmall {
            width: frame.width,
            height: frame.height,
        });
    }
    let xs = bin_weights(frame.width, COLS);
    let ys = bin_weights(frame.height, ROWS);
    let luma = |x: usize, y: usize| -> u64 {
        let i = (y * frame.width + x) * 3;
        let d = frame.data;
        299 * d[i] as u64 + 587 * d[i + 1] as u64 + 114 * d[i + 2] as u64
    };
    let mut cells = [[0u128; COLS]; ROWS];
    for (r, row_w) in ys.iter().enumerate() {
        for (c, col_w) in xs.iter().enumerate() {
            let mut acc = 0u128;
            for &(y, wy) in row_w {
                let mut line = 0u128;
                for &(x, wx) in col_w {
                    line += (wx * luma(x, y)) as u128;
                }
                acc += line * wy as u128;
            }
            cells[r][c] = acc;
        }
    }
    let mut bits = 0u64;
    for row in &cells {
        for c in 0..COLS - 1 {
            bits = (bits << 1) | u64::from(row[c] > row[c + 1]);
        }
    }
    Ok(FrameHash(bits))
}
