//! Hierarchical interval-subdivision encoding of pixel coordinates.
//!
//! A coordinate in `[0, 2^m)` is located by `m` nested halvings of its range;
//! digit `v` of the resulting 2-adic integer records the branch taken at
//! subdivision level `v` (0 = left half, 1 = right half). Truncating the code
//! modulo `2^k` therefore means "same cell at resolution k". The map `iota`
//! sends a code back into the real interval `[0, 2)` while contracting
//! 2-adic distance into euclidean distance.

use crate::padic::TruncatedPadic;
use num_bigint::BigUint;
use num_traits::{One, Zero};
use std::cmp::Ordering;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EncodingError {
    #[error("coordinate {coord} out of range for depth {depth} (must be < 2^{depth})")]
    OutOfRange { coord: u64, depth: u32 },
    #[error("grid dimension {0} too small; need at least 2 pixels per axis")]
    GridTooSmall(u64),
    #[error("grid dimension {0} exceeds the supported 2^32 pixels")]
    GridTooLarge(u64),
}

/// Pixel grid dimensions together with the subdivision depths covering them.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PixelGrid {
    width: u64,
    height: u64,
    width_exp: u32,
    height_exp: u32,
}

impl PixelGrid {
    /// Builds a grid of `width x height` pixels.
    ///
    /// The exponents are the smallest `m`, `h` with `width <= 2^m` and
    /// `height <= 2^h`. One-pixel axes are rejected: they carry no
    /// subdivision information and would need a zero-digit code.
    pub fn new(width: u64, height: u64) -> Result<Self, EncodingError> {
        let width_exp = axis_exponent(width)?;
        let height_exp = axis_exponent(height)?;
        Ok(Self {
            width,
            height,
            width_exp,
            height_exp,
        })
    }

    pub fn width(&self) -> u64 {
        self.width
    }

    pub fn height(&self) -> u64 {
        self.height
    }

    /// Subdivision depth for the x axis.
    pub fn width_exp(&self) -> u32 {
        self.width_exp
    }

    /// Subdivision depth for the y axis.
    pub fn height_exp(&self) -> u32 {
        self.height_exp
    }
}

fn axis_exponent(len: u64) -> Result<u32, EncodingError> {
    if len < 2 {
        return Err(EncodingError::GridTooSmall(len));
    }
    if len > (1u64 << 32) {
        return Err(EncodingError::GridTooLarge(len));
    }
    Ok(64 - (len - 1).leading_zeros())
}

/// An image point with both coordinates encoded as truncated 2-adic integers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EncodedPoint {
    pub x: TruncatedPadic,
    pub y: TruncatedPadic,
}

/// An exact nonnegative dyadic rational `numerator / 2^exponent` in `[0, 2)`.
#[derive(Debug, Clone)]
pub struct DyadicRational {
    numerator: BigUint,
    exponent: u32,
}

impl PartialEq for DyadicRational {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for DyadicRational {}

impl DyadicRational {
    /// # Panics
    ///
    /// Panics if the value is not below 2.
    pub fn new(numerator: BigUint, exponent: u32) -> Self {
        assert!(
            numerator < (BigUint::one() << (exponent + 1)),
            "dyadic rational must lie in [0, 2)"
        );
        Self {
            numerator,
            exponent,
        }
    }

    /// `2^(-k)`, as a comparison threshold.
    pub fn pow2_neg(k: u32) -> Self {
        Self::new(BigUint::one(), k)
    }

    pub fn numerator(&self) -> &BigUint {
        &self.numerator
    }

    pub fn exponent(&self) -> u32 {
        self.exponent
    }

    /// Exact absolute difference `|self - other|`.
    pub fn abs_diff(&self, other: &Self) -> Self {
        let e = self.exponent.max(other.exponent);
        let a = &self.numerator << (e - self.exponent);
        let b = &other.numerator << (e - other.exponent);
        let num = if a >= b { a - b } else { b - a };
        Self {
            numerator: num,
            exponent: e,
        }
    }

    /// Approximate float value, for display only.
    pub fn to_f64(&self) -> f64 {
        use num_traits::ToPrimitive;
        self.numerator.to_f64().unwrap_or(f64::NAN) / 2f64.powi(self.exponent as i32)
    }
}

impl PartialOrd for DyadicRational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for DyadicRational {
    fn cmp(&self, other: &Self) -> Ordering {
        let e = self.exponent.max(other.exponent);
        let a = &self.numerator << (e - self.exponent);
        let b = &other.numerator << (e - other.exponent);
        a.cmp(&b)
    }
}

impl fmt::Display for DyadicRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/2^{}", self.numerator, self.exponent)
    }
}

/// Encodes a coordinate by tracing its subdivision path from the root.
///
/// Digit `v` of the result is the branch choice at level `v`; the digit
/// sequence is the `m`-bit binary representation of `x` read most-significant
/// bit first.
pub fn encode_coord(x: u64, depth: u32) -> Result<TruncatedPadic, EncodingError> {
    assert!((1..=32).contains(&depth), "depth must be in 1..=32");
    if x >= 1u64 << depth {
        return Err(EncodingError::OutOfRange { coord: x, depth });
    }
    let mut digits = Vec::with_capacity(depth as usize);
    for level in 0..depth {
        let bit = (x >> (depth - 1 - level)) & 1;
        digits.push(bit as u32);
    }
    Ok(TruncatedPadic::from_digits(2, &digits))
}

/// Inverse of [`encode_coord`]: reassembles the pixel index from the path.
pub fn decode_coord(r: &TruncatedPadic, depth: u32) -> u64 {
    assert_eq!(r.prime(), 2, "encoded coordinates are 2-adic");
    assert_eq!(r.precision(), depth, "precision must equal the depth");
    let digits = r.digits();
    let mut x = 0u64;
    for (level, &d) in digits.iter().enumerate() {
        x |= (d as u64) << (depth - 1 - level as u32);
    }
    x
}

/// The geometry-respecting map into `[0, 2)`: digit `v` contributes `2^(-v)`.
///
/// Computed exactly as a dyadic rational so the contraction property can be
/// checked with strict inequalities.
pub fn iota(a: &TruncatedPadic) -> DyadicRational {
    assert_eq!(a.prime(), 2, "iota is defined for 2-adic values");
    let digits = a.digits();
    let shift = digits.len() as u32 - 1;
    let mut numerator = BigUint::zero();
    for (v, &d) in digits.iter().enumerate() {
        if d == 1 {
            numerator += BigUint::one() << (shift - v as u32);
        }
    }
    DyadicRational::new(numerator, shift)
}

/// Encodes both pixel coordinates against a grid.
pub fn encode_pixel(x: u64, y: u64, grid: &PixelGrid) -> Result<EncodedPoint, EncodingError> {
    if x >= grid.width() {
        return Err(EncodingError::OutOfRange {
            coord: x,
            depth: grid.width_exp(),
        });
    }
    if y >= grid.height() {
        return Err(EncodingError::OutOfRange {
            coord: y,
            depth: grid.height_exp(),
        });
    }
    Ok(EncodedPoint {
        x: encode_coord(x, grid.width_exp())?,
        y: encode_coord(y, grid.height_exp())?,
    })
}
