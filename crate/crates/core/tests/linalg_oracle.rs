//! Brute-force oracle for the nullspace lifting: over small moduli the span
//! of the lifted basis must equal the full solution set of `A x = 0`.

use dyadic_core::linalg::{lift_nullspace, nullspace_mod2, LinalgError, ResidueMatrix};
use dyadic_core::TruncatedPadic;
use num_bigint::BigUint;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Enumerates all of `(Z/2^n)^cols` and keeps the solutions of `A x = 0`.
fn brute_force_solutions(a: &ResidueMatrix, precision: u32) -> Vec<Vec<BigUint>> {
    let modulus = 1u64 << precision;
    let cols = a.cols();
    let total = modulus.pow(cols as u32);
    let mut solutions = Vec::new();
    for code in 0..total {
        let mut x = Vec::with_capacity(cols);
        let mut rest = code;
        for _ in 0..cols {
            x.push(BigUint::from(rest % modulus));
            rest /= modulus;
        }
        if a.mul_vec(&x).iter().all(BigUint::is_zero) {
            solutions.push(x);
        }
    }
    solutions
}

/// Membership test using the staircase structure: the coefficient of each
/// basis vector is pinned by the pivot coordinates, whose submatrix has an
/// odd diagonal and even off-diagonal entries.
fn in_span(
    vectors: &[Vec<BigUint>],
    pivot_rows: &[usize],
    candidate: &[BigUint],
    precision: u32,
) -> bool {
    let modulus = BigUint::one() << precision;
    let dim = vectors.len();
    let mut m: Vec<Vec<BigUint>> = (0..dim)
        .map(|r| {
            (0..dim)
                .map(|c| vectors[c][pivot_rows[r]].clone())
                .collect()
        })
        .collect();
    let mut rhs: Vec<BigUint> = pivot_rows.iter().map(|&r| candidate[r].clone()).collect();

    // gaussian elimination with the guaranteed odd diagonal
    for col in 0..dim {
        let inv = TruncatedPadic::new(2, precision, m[col][col].clone())
            .invert_unit()
            .expect("pivot submatrix has an odd diagonal");
        for r in 0..dim {
            if r == col || m[r][col].is_zero() {
                continue;
            }
            let factor = &m[r][col] * inv.residue() % &modulus;
            let pivot_row = m[col].clone();
            for (entry, p) in m[r].iter_mut().zip(&pivot_row) {
                let sub = &factor * p % &modulus;
                *entry = (&*entry + &modulus - sub) % &modulus;
            }
            let sub = &factor * &rhs[col] % &modulus;
            rhs[r] = (&rhs[r] + &modulus - sub) % &modulus;
        }
    }
    let coeffs: Vec<BigUint> = (0..dim)
        .map(|r| {
            let inv = TruncatedPadic::new(2, precision, m[r][r].clone())
                .invert_unit()
                .unwrap();
            &rhs[r] * inv.residue() % &modulus
        })
        .collect();

    // re-check on every coordinate, not only the pivots
    let cols = candidate.len();
    (0..cols).all(|k| {
        let mut acc = BigUint::zero();
        for (c, v) in coeffs.iter().zip(vectors) {
            acc = (acc + c * &v[k]) % &modulus;
        }
        acc == candidate[k]
    })
}

#[test]
fn lifted_basis_spans_exactly_the_solution_set() {
    let mut rng = ChaCha8Rng::seed_from_u64(1234);
    let mut verified = 0;
    while verified < 40 {
        // keep the enumeration below 2^20 while reaching cols = 5 and n = 6
        let (rows, cols, n) = loop {
            let cols = rng.gen_range(2..=5usize);
            let n = rng.gen_range(2..=6u32);
            if (n as usize) * cols <= 20 {
                break (rng.gen_range(1..=cols), cols, n);
            }
        };
        let entries: Vec<BigUint> = (0..rows * cols)
            .map(|_| BigUint::from(rng.gen_range(0..1u64 << n)))
            .collect();
        let a = ResidueMatrix::from_rows(rows, cols, n, entries);
        let basis = nullspace_mod2(&a.mod2());
        let lifted = match lift_nullspace(&a, &basis, n) {
            Ok(l) => l,
            Err(LinalgError::RankDeficient | LinalgError::RankDrop) => continue,
            Err(e) => panic!("unexpected error {e}"),
        };

        let solutions = brute_force_solutions(&a, n);
        // the span is a free module over Z/2^n of the basis dimension
        let expected = (1u64 << n).pow(basis.dimension() as u32) as usize;
        assert_eq!(solutions.len(), expected, "solution count mismatch");
        for s in &solutions {
            assert!(
                in_span(&lifted.vectors, &basis.pivot_rows, s, n),
                "brute-force solution outside the lifted span"
            );
        }
        verified += 1;
    }
}

#[test]
fn lifting_counts_one_step_per_digit() {
    let mut rng = ChaCha8Rng::seed_from_u64(4321);
    for _ in 0..20 {
        let n = rng.gen_range(2..=10u32);
        let entries: Vec<BigUint> = (0..12)
            .map(|_| BigUint::from(rng.gen_range(0..1u64 << n)))
            .collect();
        let a = ResidueMatrix::from_rows(3, 4, n, entries);
        let basis = nullspace_mod2(&a.mod2());
        if basis.dimension() == 0 {
            continue;
        }
        if let Ok(lifted) = lift_nullspace(&a, &basis, n) {
            assert_eq!(lifted.iterations, n - 1);
        }
    }
}
