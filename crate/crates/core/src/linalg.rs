//! Exact linear algebra over GF(2) and `Z/2^N`.
//!
//! The mod-2 side provides the staircase (reduced row echelon) normal form,
//! nullspace bases in normal form, and the affine solve used by every Hensel
//! correction step. The `Z/2^N` side lifts a mod-2 nullspace basis digit by
//! digit: each basis vector is refined through N-1 correction steps, and the
//! unit-pivot elimination doubles as the finite-precision witness that the
//! rank of the matrix does not drop modulo 2.

use crate::padic::TruncatedPadic;
use num_bigint::BigUint;
use num_traits::{One, Zero};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LinalgError {
    /// The mod-2 coefficient matrix has rank below the number of equations.
    #[error("coefficient matrix is rank deficient modulo 2")]
    RankDeficient,
    /// Elimination over `Z/2^N` left a residual row that is even but nonzero:
    /// the rank modulo 2 is smaller than the rank of the matrix itself.
    #[error("rank drops modulo 2: elimination left a nonzero row without a unit pivot")]
    RankDrop,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
}

/// A dense matrix over GF(2).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    bits: Vec<bool>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            bits: vec![false; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    /// Builds from row-major 0/1 entries.
    ///
    /// # Panics
    ///
    /// Panics if `entries.len() != rows * cols`.
    pub fn from_rows(rows: usize, cols: usize, entries: &[u8]) -> Self {
        assert_eq!(entries.len(), rows * cols, "entry count mismatch");
        Self {
            rows,
            cols,
            bits: entries.iter().map(|&e| e % 2 == 1).collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        self.bits[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        self.bits[r * self.cols + c] = value;
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.bits.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    /// Adds row `src` into row `dst` (XOR).
    fn add_row(&mut self, dst: usize, src: usize) {
        for c in 0..self.cols {
            let v = self.get(src, c);
            if v {
                let cur = self.get(dst, c);
                self.set(dst, c, !cur);
            }
        }
    }

    /// Matrix-vector product over GF(2).
    pub fn mul_vec(&self, v: &[bool]) -> Vec<bool> {
        assert_eq!(v.len(), self.cols, "vector length mismatch");
        (0..self.rows)
            .map(|r| (0..self.cols).fold(false, |acc, c| acc ^ (self.get(r, c) && v[c])))
            .collect()
    }
}

impl fmt::Display for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.rows {
            for c in 0..self.cols {
                write!(f, "{}", u8::from(self.get(r, c)))?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Result of reduction to the staircase normal form.
#[derive(Debug, Clone)]
pub struct Staircase {
    pub form: BitMatrix,
    pub rank: usize,
    pub pivot_cols: Vec<usize>,
}

/// Reduced row echelon form over GF(2).
pub fn rref_mod2(a: &BitMatrix) -> Staircase {
    let mut m = a.clone();
    let mut pivot_cols = Vec::new();
    let mut pivot_row = 0;
    for col in 0..m.cols() {
        if pivot_row >= m.rows() {
            break;
        }
        let Some(hit) = (pivot_row..m.rows()).find(|&r| m.get(r, col)) else {
            continue;
        };
        m.swap_rows(pivot_row, hit);
        for r in 0..m.rows() {
            if r != pivot_row && m.get(r, col) {
                m.add_row(r, pivot_row);
            }
        }
        pivot_cols.push(col);
        pivot_row += 1;
    }
    Staircase {
        form: m,
        rank: pivot_cols.len(),
        pivot_cols,
    }
}

/// A nullspace basis in normal form.
///
/// Vector `b` has a 1 in coordinate `pivot_rows[b]`, zeros below it, and
/// every other basis vector is zero there; the pivot coordinates are strictly
/// increasing. These are the free columns of the staircase form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitBasis {
    pub vectors: Vec<Vec<bool>>,
    pub pivot_rows: Vec<usize>,
}

impl BitBasis {
    pub fn dimension(&self) -> usize {
        self.vectors.len()
    }
}

/// Basis of `{ x : A x = 0 }` over GF(2), read off the staircase form.
pub fn nullspace_mod2(a: &BitMatrix) -> BitBasis {
    let stair = rref_mod2(a);
    let n = a.cols();
    let mut is_pivot = vec![false; n];
    for &c in &stair.pivot_cols {
        is_pivot[c] = true;
    }
    let mut vectors = Vec::new();
    let mut pivot_rows = Vec::new();
    for free_col in (0..n).filter(|&c| !is_pivot[c]) {
        let mut v = vec![false; n];
        v[free_col] = true;
        for (row, &pivot_col) in stair.pivot_cols.iter().enumerate() {
            if stair.form.get(row, free_col) {
                v[pivot_col] = true;
            }
        }
        vectors.push(v);
        pivot_rows.push(free_col);
    }
    BitBasis {
        vectors,
        pivot_rows,
    }
}

/// Solves `J t = a` over GF(2) with free components of `t` set to zero.
///
/// The right-hand side enters the Hensel step as `-a`, which is the same
/// vector modulo 2. Requires `J` to have full row rank; a consistent
/// solution then always exists.
pub fn solve_affine_mod2(j: &BitMatrix, a: &[bool]) -> Result<Vec<bool>, LinalgError> {
    if a.len() != j.rows() {
        return Err(LinalgError::DimensionMismatch {
            expected: j.rows(),
            got: a.len(),
        });
    }
    // eliminate the augmented matrix [J | a]
    let mut aug = BitMatrix::zeros(j.rows(), j.cols() + 1);
    for (r, &rhs) in a.iter().enumerate() {
        for c in 0..j.cols() {
            aug.set(r, c, j.get(r, c));
        }
        aug.set(r, j.cols(), rhs);
    }
    let mut pivot_row = 0;
    let mut pivots = Vec::new();
    for col in 0..j.cols() {
        if pivot_row >= aug.rows() {
            break;
        }
        let Some(hit) = (pivot_row..aug.rows()).find(|&r| aug.get(r, col)) else {
            continue;
        };
        aug.swap_rows(pivot_row, hit);
        for r in 0..aug.rows() {
            if r != pivot_row && aug.get(r, col) {
                aug.add_row(r, pivot_row);
            }
        }
        pivots.push(col);
        pivot_row += 1;
    }
    if pivots.len() < j.rows() {
        return Err(LinalgError::RankDeficient);
    }
    let mut t = vec![false; j.cols()];
    for (row, &col) in pivots.iter().enumerate() {
        t[col] = aug.get(row, j.cols());
    }
    Ok(t)
}

/// A matrix of truncated 2-adic residues at a common precision.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResidueMatrix {
    rows: usize,
    cols: usize,
    precision: u32,
    entries: Vec<BigUint>,
}

impl ResidueMatrix {
    /// Builds from row-major entries, reducing each modulo `2^precision`.
    pub fn from_rows(rows: usize, cols: usize, precision: u32, entries: Vec<BigUint>) -> Self {
        assert_eq!(entries.len(), rows * cols, "entry count mismatch");
        assert!(precision >= 1);
        let modulus = BigUint::one() << precision;
        Self {
            rows,
            cols,
            precision,
            entries: entries.into_iter().map(|e| e % &modulus).collect(),
        }
    }

    pub fn from_padics(rows: usize, cols: usize, entries: &[TruncatedPadic]) -> Self {
        assert_eq!(entries.len(), rows * cols, "entry count mismatch");
        assert!(
            !entries.is_empty(),
            "cannot infer precision of an empty matrix"
        );
        let precision = entries[0].precision();
        assert!(
            entries
                .iter()
                .all(|e| e.prime() == 2 && e.precision() == precision),
            "entries must be 2-adic at a uniform precision"
        );
        Self {
            rows,
            cols,
            precision,
            entries: entries.iter().map(|e| e.residue().clone()).collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn get(&self, r: usize, c: usize) -> &BigUint {
        &self.entries[r * self.cols + c]
    }

    pub fn entry_padic(&self, r: usize, c: usize) -> TruncatedPadic {
        TruncatedPadic::new(2, self.precision, self.get(r, c).clone())
    }

    /// The matrix reduced modulo 2.
    pub fn mod2(&self) -> BitMatrix {
        let mut m = BitMatrix::zeros(self.rows, self.cols);
        for r in 0..self.rows {
            for c in 0..self.cols {
                m.set(r, c, self.get(r, c).bit(0));
            }
        }
        m
    }

    /// `A x mod 2^precision` for an integer vector `x`.
    pub fn mul_vec(&self, x: &[BigUint]) -> Vec<BigUint> {
        assert_eq!(x.len(), self.cols, "vector length mismatch");
        let modulus = BigUint::one() << self.precision;
        (0..self.rows)
            .map(|r| {
                let mut acc = BigUint::zero();
                for (c, xc) in x.iter().enumerate() {
                    acc += self.get(r, c) * xc;
                }
                acc % &modulus
            })
            .collect()
    }
}

/// A mod-2 nullspace basis lifted to `Z/2^N`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LiftedBasis {
    /// One integer vector modulo `2^N` per mod-2 seed, in seed order.
    pub vectors: Vec<Vec<BigUint>>,
    pub precision: u32,
    /// Correction steps consumed per vector (`N - 1` when starting mod 2).
    pub iterations: u32,
}

/// Unit-pivot staircase elimination of a residue matrix.
///
/// Row operations are invertible, so `R x = 0` and `A x = 0` have the same
/// solutions modulo `2^N`. Fails with `RankDrop` when a leftover row is even
/// but nonzero, i.e. the mod-2 rank undercounts the rank of `A`.
fn unit_pivot_staircase(a: &ResidueMatrix) -> Result<ResidueMatrix, LinalgError> {
    let modulus = BigUint::one() << a.precision();
    let mut entries: Vec<Vec<BigUint>> = (0..a.rows())
        .map(|r| (0..a.cols()).map(|c| a.get(r, c).clone()).collect())
        .collect();

    let mut pivot_row = 0;
    for col in 0..a.cols() {
        if pivot_row >= entries.len() {
            break;
        }
        // first row with an odd entry in this column
        let Some(hit) = (pivot_row..entries.len()).find(|&r| entries[r][col].bit(0)) else {
            continue;
        };
        entries.swap(pivot_row, hit);
        let inv = TruncatedPadic::new(2, a.precision(), entries[pivot_row][col].clone())
            .invert_unit()
            .expect("odd pivot is a unit");
        for r in 0..entries.len() {
            if r == pivot_row || entries[r][col].is_zero() {
                continue;
            }
            let factor = &entries[r][col] * inv.residue() % &modulus;
            let pivot_entries = entries[pivot_row].clone();
            for (cur, p) in entries[r].iter_mut().zip(&pivot_entries) {
                let sub = &factor * p % &modulus;
                *cur = if *cur >= sub {
                    &*cur - &sub
                } else {
                    &*cur + &modulus - &sub
                };
            }
        }
        pivot_row += 1;
    }

    // rows without a unit pivot must vanish entirely modulo 2^N
    for row in entries.iter().skip(pivot_row) {
        if row.iter().any(|e| !e.is_zero()) {
            return Err(LinalgError::RankDrop);
        }
    }
    entries.truncate(pivot_row);

    let rows = entries.len();
    Ok(ResidueMatrix::from_rows(
        rows,
        a.cols(),
        a.precision(),
        entries.into_iter().flatten().collect(),
    ))
}

/// Lifts a mod-2 nullspace basis to solutions of `A x = 0 mod 2^N`.
///
/// Each seed is refined through `N - 1` correction steps: at level `k` the
/// residual `A x / 2^(k-1)` is cancelled modulo 2 by solving the staircase
/// system, exactly as in the multivariate lifting step specialized to a
/// linear map. Every returned vector reduces to its seed modulo 2.
pub fn lift_nullspace(
    a: &ResidueMatrix,
    basis: &BitBasis,
    precision: u32,
) -> Result<LiftedBasis, LinalgError> {
    assert_eq!(
        precision,
        a.precision(),
        "matrix must be given at the target precision"
    );
    let staircase = unit_pivot_staircase(a)?;
    let jacobian = staircase.mod2();
    let mut vectors = Vec::with_capacity(basis.dimension());
    let mut iterations = 0u32;

    for seed in &basis.vectors {
        let mut x: Vec<BigUint> = seed
            .iter()
            .map(|&b| if b { BigUint::one() } else { BigUint::zero() })
            .collect();
        let mut steps = 0u32;
        for k in 2..=precision {
            let values = staircase.mul_vec(&x);
            // f(x) = 2^(k-1) a; the correction t solves J t = a mod 2
            let carry: Vec<bool> = values.iter().map(|v| v.bit((k - 1) as u64)).collect();
            debug_assert!(
                values
                    .iter()
                    .all(|v| v.trailing_zeros().unwrap_or(u64::MAX) >= (k - 1) as u64),
                "residual must vanish mod 2^(k-1)"
            );
            let t = solve_affine_mod2(&jacobian, &carry)?;
            for (xi, &ti) in x.iter_mut().zip(t.iter()) {
                if ti {
                    *xi += BigUint::one() << (k - 1);
                }
            }
            steps += 1;
        }
        debug_assert!(staircase.mul_vec(&x).iter().all(BigUint::is_zero));
        iterations = steps;
        vectors.push(x);
    }

    Ok(LiftedBasis {
        vectors,
        precision,
        iterations,
    })
}
