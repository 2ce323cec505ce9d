//! Small 3x3 matrix algebra over the rings the solvers work in: truncated
//! 2-adic residues for candidates, integer polynomials for the symbolic
//! constraint expansion.

use crate::padic::TruncatedPadic;
use crate::poly::IntPolynomial;

/// Entry operations needed by the 3x3 helpers.
pub trait Ring: Clone {
    fn add(&self, rhs: &Self) -> Self;
    fn sub(&self, rhs: &Self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;

    fn double(&self) -> Self {
        self.add(self)
    }
}

impl Ring for TruncatedPadic {
    fn add(&self, rhs: &Self) -> Self {
        TruncatedPadic::add(self, rhs)
    }
    fn sub(&self, rhs: &Self) -> Self {
        TruncatedPadic::sub(self, rhs)
    }
    fn mul(&self, rhs: &Self) -> Self {
        TruncatedPadic::mul(self, rhs)
    }
}

impl Ring for IntPolynomial {
    fn add(&self, rhs: &Self) -> Self {
        IntPolynomial::add(self, rhs)
    }
    fn sub(&self, rhs: &Self) -> Self {
        IntPolynomial::sub(self, rhs)
    }
    fn mul(&self, rhs: &Self) -> Self {
        IntPolynomial::mul(self, rhs)
    }
}

/// A 3x3 matrix stored row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mat3<T> {
    entries: Vec<T>,
}

pub type ResidueMat3 = Mat3<TruncatedPadic>;
pub type PolyMat3 = Mat3<IntPolynomial>;

impl<T> Mat3<T> {
    pub fn from_vec(entries: Vec<T>) -> Self {
        assert_eq!(entries.len(), 9, "a 3x3 matrix has nine entries");
        Self { entries }
    }

    pub fn get(&self, r: usize, c: usize) -> &T {
        &self.entries[3 * r + c]
    }

    pub fn entries(&self) -> &[T] {
        &self.entries
    }

    pub fn map<U>(&self, f: impl Fn(&T) -> U) -> Mat3<U> {
        Mat3 {
            entries: self.entries.iter().map(f).collect(),
        }
    }
}

impl<T: Ring> Mat3<T> {
    pub fn transpose(&self) -> Self {
        let e = &self.entries;
        Self::from_vec(vec![
            e[0].clone(),
            e[3].clone(),
            e[6].clone(),
            e[1].clone(),
            e[4].clone(),
            e[7].clone(),
            e[2].clone(),
            e[5].clone(),
            e[8].clone(),
        ])
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        let mut out = Vec::with_capacity(9);
        for r in 0..3 {
            for c in 0..3 {
                let mut acc = self.get(r, 0).mul(rhs.get(0, c));
                for k in 1..3 {
                    acc = acc.add(&self.get(r, k).mul(rhs.get(k, c)));
                }
                out.push(acc);
            }
        }
        Self::from_vec(out)
    }

    pub fn add(&self, rhs: &Self) -> Self {
        Self::from_vec(
            self.entries
                .iter()
                .zip(&rhs.entries)
                .map(|(a, b)| a.add(b))
                .collect(),
        )
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        Self::from_vec(
            self.entries
                .iter()
                .zip(&rhs.entries)
                .map(|(a, b)| a.sub(b))
                .collect(),
        )
    }

    pub fn scale(&self, factor: &T) -> Self {
        Self::from_vec(self.entries.iter().map(|e| e.mul(factor)).collect())
    }

    pub fn trace(&self) -> T {
        self.get(0, 0).add(self.get(1, 1)).add(self.get(2, 2))
    }

    pub fn det(&self) -> T {
        let m = |r: usize, c: usize| self.get(r, c);
        let cof = |a: &T, b: &T, c: &T, d: &T| a.mul(d).sub(&b.mul(c));
        let c0 = cof(m(1, 1), m(1, 2), m(2, 1), m(2, 2));
        let c1 = cof(m(1, 0), m(1, 2), m(2, 0), m(2, 2));
        let c2 = cof(m(1, 0), m(1, 1), m(2, 0), m(2, 1));
        m(0, 0)
            .mul(&c0)
            .sub(&m(0, 1).mul(&c1))
            .add(&m(0, 2).mul(&c2))
    }

    /// Determinant of the 2x2 submatrix with row `i` and column `j` removed.
    pub fn minor(&self, i: usize, j: usize) -> T {
        let rows: Vec<usize> = (0..3).filter(|&r| r != i).collect();
        let cols: Vec<usize> = (0..3).filter(|&c| c != j).collect();
        self.get(rows[0], cols[0])
            .mul(self.get(rows[1], cols[1]))
            .sub(&self.get(rows[0], cols[1]).mul(self.get(rows[1], cols[0])))
    }

    /// The nine entries of `2 E E^T E - Trace(E E^T) E`, row-major.
    ///
    /// These vanish exactly on essential matrices and are cubic in the
    /// entries of `E`.
    pub fn trace_condition(&self) -> Vec<T> {
        let gram = self.matmul(&self.transpose());
        let cubic = gram.matmul(self);
        let scaled = self.scale(&gram.trace());
        cubic
            .entries
            .iter()
            .zip(&scaled.entries)
            .map(|(a, b)| a.double().sub(b))
            .collect()
    }
}

impl ResidueMat3 {
    pub fn from_residue_vec(v: &[num_bigint::BigUint], precision: u32) -> Self {
        assert_eq!(v.len(), 9);
        Self::from_vec(
            v.iter()
                .map(|r| TruncatedPadic::new(2, precision, r.clone()))
                .collect(),
        )
    }

    pub fn from_integers(v: &[i64; 9], precision: u32) -> Self {
        Self::from_vec(
            v.iter()
                .map(|&n| TruncatedPadic::from_integer(n, 2, precision))
                .collect(),
        )
    }

    pub fn precision(&self) -> u32 {
        self.entries[0].precision()
    }

    /// Reduces every entry to a lower precision.
    pub fn truncate(&self, k: u32) -> Self {
        self.map(|e| e.truncate(k))
    }

    /// Constant-polynomial view of the matrix in `num_vars` variables.
    pub fn to_poly(&self, num_vars: usize) -> PolyMat3 {
        self.map(|e| IntPolynomial::constant(num_vars, e.to_bigint()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;

    fn skew_x(precision: u32) -> ResidueMat3 {
        ResidueMat3::from_integers(&[0, 0, 0, 0, 0, -1, 0, 1, 0], precision)
    }

    #[test]
    fn trace_condition_vanishes_on_a_skew_product() {
        let tc = skew_x(8).trace_condition();
        assert!(tc.iter().all(|e| e.residue().is_zero()));
    }

    #[test]
    fn trace_condition_on_identity_is_minus_identity() {
        let id = ResidueMat3::from_integers(&[1, 0, 0, 0, 1, 0, 0, 0, 1], 6);
        let tc = id.trace_condition();
        let minus_one = TruncatedPadic::from_integer(-1, 2, 6);
        for (k, e) in tc.iter().enumerate() {
            if k % 4 == 0 {
                assert_eq!(e, &minus_one);
            } else {
                assert!(e.residue().is_zero());
            }
        }
    }

    #[test]
    fn trace_condition_on_zero_is_zero() {
        let z = ResidueMat3::from_integers(&[0; 9], 6);
        assert!(z.trace_condition().iter().all(|e| e.residue().is_zero()));
    }

    #[test]
    fn det_and_minor_agree_with_integers() {
        let m = ResidueMat3::from_integers(&[2, 3, 1, 0, 1, 4, 5, 6, 0], 10);
        // det = 2(0-24) - 3(0-20) + 1(0-5) = 7
        assert_eq!(m.det(), TruncatedPadic::from_integer(7, 2, 10));
        // delete row 0, col 0: det [[1,4],[6,0]] = -24
        assert_eq!(m.minor(0, 0), TruncatedPadic::from_integer(-24, 2, 10));
        // delete row 1, col 2: det [[2,3],[5,6]] = -3
        assert_eq!(m.minor(1, 2), TruncatedPadic::from_integer(-3, 2, 10));
    }
}
