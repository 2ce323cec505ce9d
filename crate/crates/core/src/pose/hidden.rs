//! Hidden-variable elimination for the 5-point solver.
//!
//! With `E = x E1 + y E2 + z E3 + w E4` and `w = 1`, the nine trace-condition
//! entries plus `det(E)` are ten cubics in `(x, y, z)`. Hiding `z` inside the
//! coefficients rewrites them as `C(z) . X = 0` where `X` collects the ten
//! possible `(x, y)` monomials of degree up to three and `C(z)` is a square
//! matrix of univariate integer polynomials. Solutions require
//! `det(C(z)) = 0`, a polynomial of degree at most 10.

use super::mat3::PolyMat3;
use super::PoseError;
use crate::poly::IntPolynomial;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// The `(x, y)` exponent pairs of the monomial vector
/// `(x^3, y^3, x^2 y, x y^2, x^2, y^2, x y, x, y, 1)`.
pub const MONOMIALS: [(u32, u32); 10] = [
    (3, 0),
    (0, 3),
    (2, 1),
    (1, 2),
    (2, 0),
    (0, 2),
    (1, 1),
    (1, 0),
    (0, 1),
    (0, 0),
];

/// The ten dehomogenized constraint cubics and their hidden-variable form.
#[derive(Debug, Clone)]
pub struct HiddenVarSystem {
    /// Nine trace-condition entries followed by the determinant, as exact
    /// polynomials in `(x, y, z)` after setting `w = 1`.
    pub equations: Vec<IntPolynomial>,
    /// `coeff_matrix[i][j]` is the univariate polynomial in `z` multiplying
    /// monomial `j` in equation `i`.
    pub coeff_matrix: Vec<Vec<IntPolynomial>>,
}

/// Expands the constraints of a four-matrix pencil into hidden-variable form.
///
/// `pencil_poly` must be the symbolic matrix `x E1 + y E2 + z E3 + w E4` in
/// the variables `(x, y, z, w)`. The defining identity
/// `C(z) . X = equations` is re-verified symbolically before returning.
pub fn build_hidden_var_system(pencil_poly: &PolyMat3) -> HiddenVarSystem {
    let one = BigInt::one();
    let dehomogenize = |p: &IntPolynomial| p.substitute(3, &one).restrict(&[0, 1, 2]);

    let mut equations: Vec<IntPolynomial> = pencil_poly
        .trace_condition()
        .iter()
        .map(&dehomogenize)
        .collect();
    equations.push(dehomogenize(&pencil_poly.det()));

    let coeff_matrix: Vec<Vec<IntPolynomial>> = equations
        .iter()
        .map(|eq| {
            MONOMIALS
                .iter()
                .map(|&(ex, ey)| {
                    // every term with this (x, y) part contributes coeff * z^ez
                    let mut poly = IntPolynomial::zero(1);
                    for (exps, coeff) in eq.terms() {
                        if exps[0] == ex && exps[1] == ey {
                            poly =
                                poly.add(&IntPolynomial::monomial(1, vec![exps[2]], coeff.clone()));
                        }
                    }
                    poly
                })
                .collect()
        })
        .collect();

    // defining identity: sum_j C[i][j](z) x^a y^b == equation i
    for (eq, row) in equations.iter().zip(&coeff_matrix) {
        let mut reassembled = IntPolynomial::zero(3);
        for (&(ex, ey), cz) in MONOMIALS.iter().zip(row) {
            for (exps, coeff) in cz.terms() {
                reassembled = reassembled.add(&IntPolynomial::monomial(
                    3,
                    vec![ex, ey, exps[0]],
                    coeff.clone(),
                ));
            }
        }
        assert_eq!(
            &reassembled, eq,
            "hidden-variable decomposition must be exact"
        );
    }

    HiddenVarSystem {
        equations,
        coeff_matrix,
    }
}

/// `det(C(z))` computed by evaluation at 31 integer points and exact
/// interpolation (entry degrees of at most 3 bound the determinant degree by
/// 30 before cancellation). Degrees above 10 flag a construction bug.
pub fn det_poly(coeff_matrix: &[Vec<IntPolynomial>]) -> Result<IntPolynomial, PoseError> {
    let n = coeff_matrix.len();
    assert!(
        coeff_matrix.iter().all(|row| row.len() == n),
        "matrix must be square"
    );
    for row in coeff_matrix {
        for entry in row {
            assert!(entry.num_vars() == 1, "entries must be univariate");
            assert!(entry.degree_in(0) <= 3, "entry degree bound exceeded");
        }
    }

    let points: Vec<BigInt> = (0..=3 * n as i64).map(|k| BigInt::from(k - 15)).collect();
    let values: Vec<BigInt> = points
        .iter()
        .map(|z| {
            let scalar: Vec<Vec<BigInt>> = coeff_matrix
                .iter()
                .map(|row| {
                    row.iter()
                        .map(|p| p.eval(std::slice::from_ref(z)))
                        .collect()
                })
                .collect();
            integer_determinant(scalar)
        })
        .collect();

    let g = interpolate_integer_poly(&points, &values);
    let degree = g.degree_in(0);
    if !g.is_zero() && degree > 10 {
        return Err(PoseError::DegreeAnomaly { degree });
    }
    Ok(g)
}

/// Exact determinant of an integer matrix by fraction-free (Bareiss)
/// elimination; every division is exact.
pub fn integer_determinant(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut sign = false;
    let mut previous_pivot = BigInt::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            let Some(swap) = (k + 1..n).find(|&r| !m[r][k].is_zero()) else {
                return BigInt::zero();
            };
            m.swap(k, swap);
            sign = !sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                m[i][j] = num / &previous_pivot;
            }
            m[i][k] = BigInt::zero();
        }
        previous_pivot = m[k][k].clone();
    }
    let det = m[n - 1][n - 1].clone();
    if sign {
        -det
    } else {
        det
    }
}

/// Newton interpolation through integer samples; the result must come out
/// with integer coefficients.
fn interpolate_integer_poly(points: &[BigInt], values: &[BigInt]) -> IntPolynomial {
    assert_eq!(points.len(), values.len());
    let n = points.len();
    let mut diffs: Vec<BigRational> = values
        .iter()
        .map(|v| BigRational::from_integer(v.clone()))
        .collect();
    for level in 1..n {
        for i in (level..n).rev() {
            let dx = BigRational::from_integer(&points[i] - &points[i - level]);
            diffs[i] = (&diffs[i] - &diffs[i - 1]) / dx;
        }
    }

    // expand sum_i diffs[i] * prod_{j<i} (X - points[j])
    let mut coeffs = vec![BigRational::zero(); n];
    let mut basis = vec![BigRational::zero(); n];
    basis[0] = BigRational::one();
    let mut basis_len = 1;
    for (i, dd) in diffs.iter().enumerate() {
        for (c, b) in coeffs.iter_mut().zip(&basis) {
            *c += dd * b;
        }
        if i + 1 < n {
            // basis *= (X - points[i]):  b'_j = b_{j-1} - root * b_j
            let root = BigRational::from_integer(points[i].clone());
            let mut next = vec![BigRational::zero(); basis_len + 1];
            for (j, b) in basis.iter().take(basis_len).enumerate() {
                next[j + 1] += b;
                next[j] -= b * &root;
            }
            basis[..=basis_len].clone_from_slice(&next);
            basis_len += 1;
        }
    }

    let int_coeffs: Vec<BigInt> = coeffs
        .iter()
        .map(|c| {
            assert!(c.denom().abs().is_one(), "interpolation must be integral");
            c.numer() / c.denom()
        })
        .collect();
    IntPolynomial::univariate(&int_coeffs)
}
