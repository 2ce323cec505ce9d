//! Constructive Hensel lifting for systems of integer polynomials.
//!
//! A solution of `F(x) = 0 mod 2^(k-1)` whose Jacobian has full rank modulo 2
//! is refined to a solution modulo `2^k`: writing `F(x) = 2^(k-1) a`, the
//! correction `t` solves `a + D_F(x) t = 0 mod 2` and `x + 2^(k-1) t` is the
//! refined solution. Iterating from a mod-2 seed reaches precision `N` after
//! exactly `N - 1` steps. When the system is square the correction is forced
//! and the lift is unique; otherwise free components of `t` are set to zero
//! and a single branch is followed.

use crate::linalg::{solve_affine_mod2, BitMatrix, LinalgError};
use crate::poly::{IntPolynomial, PolySystem};
use num_bigint::BigUint;
use num_traits::{One, Zero};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum HenselError {
    /// The Jacobian modulo 2 has rank below the number of equations; the
    /// seed is a non-liftable or multiple root.
    #[error("jacobian is rank deficient modulo 2 at the current point")]
    RankDeficient,
    /// The supplied point does not solve the system at the stated level.
    #[error("polynomial {poly} does not vanish mod 2^{level} at the supplied point")]
    SeedNotRoot { poly: usize, level: u32 },
    #[error("point has {got} coordinates, system has {expected} variables")]
    DimensionMismatch { expected: usize, got: usize },
}

impl From<LinalgError> for HenselError {
    fn from(e: LinalgError) -> Self {
        match e {
            LinalgError::RankDeficient | LinalgError::RankDrop => HenselError::RankDeficient,
            LinalgError::DimensionMismatch { expected, got } => {
                HenselError::DimensionMismatch { expected, got }
            }
        }
    }
}

/// The full record of one lifting run: the solution at every level and the
/// correction applied at every step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LiftTrace {
    /// `states[k-1]` is the solution vector modulo `2^k`.
    pub states: Vec<Vec<BigUint>>,
    /// `corrections[k-2]` is the mod-2 vector `t` taking level `k-1` to `k`.
    pub corrections: Vec<Vec<bool>>,
}

impl LiftTrace {
    /// Number of correction steps performed (`N - 1` for target `N`).
    pub fn iterations(&self) -> u32 {
        self.corrections.len() as u32
    }

    /// The solution at the final precision.
    pub fn solution(&self) -> &[BigUint] {
        self.states.last().expect("trace holds at least the seed")
    }
}

/// The Jacobian matrix `(df_i/dX_j)(x)` reduced modulo 2.
pub fn jacobian_mod2(system: &PolySystem, x: &[BigUint]) -> BitMatrix {
    let m = system.len();
    let n = system.num_vars();
    let mut j = BitMatrix::zeros(m, n);
    for (i, f) in system.polys().iter().enumerate() {
        for v in 0..n {
            let d = f.partial_derivative(v);
            j.set(i, v, d.eval_mod2k(x, 1).is_one());
        }
    }
    j
}

fn check_point(system: &PolySystem, x: &[BigUint]) -> Result<(), HenselError> {
    if x.len() != system.num_vars() {
        return Err(HenselError::DimensionMismatch {
            expected: system.num_vars(),
            got: x.len(),
        });
    }
    Ok(())
}

fn step_with_correction(
    system: &PolySystem,
    x: &[BigUint],
    k: u32,
) -> Result<(Vec<BigUint>, Vec<bool>), HenselError> {
    check_point(system, x)?;
    assert!(k >= 2, "lifting starts at level 2");
    let mut carry = Vec::with_capacity(system.len());
    for (i, f) in system.polys().iter().enumerate() {
        let value = f.eval_mod2k(x, k);
        // the point must already solve the system one level down
        if !(value.clone() % (BigUint::one() << (k - 1))).is_zero() {
            return Err(HenselError::SeedNotRoot {
                poly: i,
                level: k - 1,
            });
        }
        carry.push(value.bit((k - 1) as u64));
    }
    let jacobian = jacobian_mod2(system, x);
    let t = solve_affine_mod2(&jacobian, &carry)?;
    let mut next = x.to_vec();
    for (xi, &ti) in next.iter_mut().zip(&t) {
        if ti {
            *xi += BigUint::one() << (k - 1);
        }
    }
    Ok((next, t))
}

/// One refinement step: from a solution mod `2^(k-1)` to one mod `2^k`.
///
/// The returned vector is congruent to `x` modulo `2^(k-1)`. When the system
/// is square the step is unique.
pub fn lift_step(system: &PolySystem, x: &[BigUint], k: u32) -> Result<Vec<BigUint>, HenselError> {
    step_with_correction(system, x, k).map(|(next, _)| next)
}

/// Lifts a mod-2 solution to precision `N`, recording the whole trace.
///
/// Seed entries must be 0 or 1. Exactly `N - 1` steps are performed.
pub fn lift(system: &PolySystem, seed: &[u8], precision: u32) -> Result<LiftTrace, HenselError> {
    assert!(precision >= 1);
    assert!(seed.iter().all(|&s| s < 2), "seed must be a mod-2 vector");
    let x: Vec<BigUint> = seed.iter().map(|&s| BigUint::from(s)).collect();
    check_point(system, &x)?;
    for (i, f) in system.polys().iter().enumerate() {
        if f.eval_mod2k(&x, 1).is_one() {
            return Err(HenselError::SeedNotRoot { poly: i, level: 1 });
        }
    }
    let mut trace = LiftTrace {
        states: vec![x],
        corrections: Vec::new(),
    };
    for k in 2..=precision {
        let (next, t) = step_with_correction(system, trace.solution(), k)?;
        trace.states.push(next);
        trace.corrections.push(t);
    }
    Ok(trace)
}

/// A root of a univariate polynomial over GF(2), with its simplicity flag.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RootMod2 {
    pub value: u8,
    /// Whether the derivative is odd at the root, i.e. the root lifts.
    pub simple: bool,
}

/// The roots of a univariate polynomial among `{0, 1}`, the only possible
/// residues modulo 2, each flagged simple when `g'(z)` is odd.
pub fn univariate_roots_mod2(g: &IntPolynomial) -> Vec<RootMod2> {
    assert_eq!(g.num_vars(), 1, "expected a univariate polynomial");
    let derivative = g.partial_derivative(0);
    let mut roots = Vec::new();
    for z in 0u8..2 {
        let at = [BigUint::from(z)];
        if g.eval_mod2k(&at, 1).is_zero() {
            roots.push(RootMod2 {
                value: z,
                simple: derivative.eval_mod2k(&at, 1).is_one(),
            });
        }
    }
    roots
}

/// Lifts a simple mod-2 root of a univariate polynomial to precision `N`.
pub fn lift_univariate(
    g: &IntPolynomial,
    root: u8,
    precision: u32,
) -> Result<LiftTrace, HenselError> {
    lift(&PolySystem::new(vec![g.clone()]), &[root], precision)
}
