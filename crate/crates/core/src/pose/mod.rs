//! The 8-, 7-, and 5-point relative pose solvers over truncated 2-adic
//! integers.
//!
//! Each correspondence contributes one linear equation in the nine entries of
//! the essential matrix. The 8-point solver lifts the single mod-2 nullspace
//! vector directly. The 7-point solver lifts a two-matrix pencil, expands the
//! determinant cubic `h(x) = det(x E1 + (1-x) E2)` exactly, classifies which
//! of the residues 0, 1 is a liftable simple root by parity conditions on the
//! coefficients, and lifts it. The 5-point solver lifts a four-matrix pencil,
//! eliminates via hidden variables to the degree-10 polynomial
//! `g(z) = det(C(z))`, lifts its simple mod-2 roots, and recovers `(x, y)` by
//! a joint two-variable lift of a full-rank subsystem. Every candidate is
//! verified exactly against all of its defining constraints before it is
//! returned.

mod hidden;
mod mat3;

pub use hidden::{
    build_hidden_var_system, det_poly, integer_determinant, HiddenVarSystem, MONOMIALS,
};
pub use mat3::{Mat3, PolyMat3, ResidueMat3, Ring};

use crate::hensel;
use crate::linalg::{lift_nullspace, nullspace_mod2, LinalgError, ResidueMatrix};
use crate::padic::TruncatedPadic;
use crate::poly::{IntPolynomial, PolySystem};
use num_bigint::{BigInt, BigUint};
use num_traits::Zero;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PoseError {
    #[error("need exactly {expected} correspondences, got {got}")]
    WrongPointCount { expected: usize, got: usize },
    #[error("at most 9 correspondences fit the epipolar system, got {0}")]
    TooManyPoints(usize),
    #[error("image point has no unit component; projective normalization impossible")]
    NonPrimitivePoint,
    #[error("correspondences are given at precision {got}, below the requested {needed}")]
    PrecisionTooLow { needed: u32, got: u32 },
    #[error("epipolar system rank dropped modulo 2; resample points")]
    RankDrop,
    #[error("lifted solution carries no rank-2 witness")]
    RankTestFailed { candidate: Box<EssentialCandidate> },
    #[error("neither 0 nor 1 is a liftable simple root modulo 2")]
    NoLiftableRoot,
    #[error("hidden-variable back substitution failed: {0}")]
    XYRecoveryFailed(&'static str),
    #[error("det(C(z)) has degree {degree} > 10; constraint expansion is broken")]
    DegreeAnomaly { degree: u32 },
}

impl PoseError {
    /// Stable status name for diagnostics and exit-code mapping.
    pub fn status_name(&self) -> &'static str {
        match self {
            PoseError::WrongPointCount { .. } => "WrongPointCount",
            PoseError::TooManyPoints(_) => "TooManyPoints",
            PoseError::NonPrimitivePoint => "NonPrimitivePoint",
            PoseError::PrecisionTooLow { .. } => "PrecisionTooLow",
            PoseError::RankDrop => "RankDrop",
            PoseError::RankTestFailed { .. } => "RankTestFailed",
            PoseError::NoLiftableRoot => "NoLiftableRoot",
            PoseError::XYRecoveryFailed(_) => "XYRecoveryFailed",
            PoseError::DegreeAnomaly { .. } => "DegreeAnomaly",
        }
    }
}

impl From<LinalgError> for PoseError {
    fn from(e: LinalgError) -> Self {
        match e {
            LinalgError::RankDeficient | LinalgError::RankDrop => PoseError::RankDrop,
            LinalgError::DimensionMismatch { .. } => {
                unreachable!("solver matrices are shape-checked on construction")
            }
        }
    }
}

/// A pair of corresponding homogeneous image points, 2-adic at a common
/// precision, each with at least one unit component.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Correspondence {
    u: [TruncatedPadic; 3],
    v: [TruncatedPadic; 3],
}

impl Correspondence {
    pub fn new(u: [TruncatedPadic; 3], v: [TruncatedPadic; 3]) -> Result<Self, PoseError> {
        let precision = u[0].precision();
        let uniform = u
            .iter()
            .chain(v.iter())
            .all(|t| t.prime() == 2 && t.precision() == precision);
        assert!(
            uniform,
            "correspondence components must be 2-adic at one precision"
        );
        if !u.iter().any(TruncatedPadic::is_unit) || !v.iter().any(TruncatedPadic::is_unit) {
            return Err(PoseError::NonPrimitivePoint);
        }
        Ok(Self { u, v })
    }

    /// Reduces integer coordinates modulo `2^precision`.
    pub fn from_integers(
        u: &[BigInt; 3],
        v: &[BigInt; 3],
        precision: u32,
    ) -> Result<Self, PoseError> {
        let reduce = |coords: &[BigInt; 3]| {
            [
                TruncatedPadic::from_bigint(&coords[0], 2, precision),
                TruncatedPadic::from_bigint(&coords[1], 2, precision),
                TruncatedPadic::from_bigint(&coords[2], 2, precision),
            ]
        };
        Self::new(reduce(u), reduce(v))
    }

    pub fn u(&self) -> &[TruncatedPadic; 3] {
        &self.u
    }

    pub fn v(&self) -> &[TruncatedPadic; 3] {
        &self.v
    }

    pub fn precision(&self) -> u32 {
        self.u[0].precision()
    }

    pub fn truncate(&self, k: u32) -> Self {
        Self {
            u: self.u.clone().map(|t| t.truncate(k)),
            v: self.v.clone().map(|t| t.truncate(k)),
        }
    }

    /// The residual `u^T E v` at the correspondence's precision.
    pub fn epipolar_residual(&self, e: &ResidueMat3) -> TruncatedPadic {
        let mut acc = TruncatedPadic::zero(2, self.precision().min(e.precision()));
        for i in 0..3 {
            for j in 0..3 {
                acc = acc.add(&self.u[i].mul(e.get(i, j)).mul(&self.v[j]));
            }
        }
        acc
    }
}

/// Which minimal solver produced a candidate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveMethod {
    EightPoint,
    SevenPoint,
    FivePoint,
}

impl SolveMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            SolveMethod::EightPoint => "8pt",
            SolveMethod::SevenPoint => "7pt",
            SolveMethod::FivePoint => "5pt",
        }
    }

    pub fn point_count(&self) -> usize {
        match self {
            SolveMethod::EightPoint => 8,
            SolveMethod::SevenPoint => 7,
            SolveMethod::FivePoint => 5,
        }
    }
}

impl fmt::Display for SolveMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for SolveMethod {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "8pt" => Ok(SolveMethod::EightPoint),
            "7pt" => Ok(SolveMethod::SevenPoint),
            "5pt" => Ok(SolveMethod::FivePoint),
            other => Err(format!("unknown method {other:?}, expected 8pt|7pt|5pt")),
        }
    }
}

/// Which parity case of the determinant cubic admitted a simple root.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CubicCondition {
    /// `d` even and `c` odd: zero is a simple root.
    ZeroSimple,
    /// `d` odd, `a` odd, `b` and `c` even: one is a simple root.
    OneSimpleOddLeading,
    /// `d` odd, `a` even, `b` even, `c` odd: one is a simple root.
    OneSimpleEvenLeading,
}

impl CubicCondition {
    pub fn as_str(&self) -> &'static str {
        match self {
            CubicCondition::ZeroSimple => "zero-simple",
            CubicCondition::OneSimpleOddLeading => "one-simple-odd-leading",
            CubicCondition::OneSimpleEvenLeading => "one-simple-even-leading",
        }
    }
}

/// The mod-2 data a candidate was lifted from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Seed {
    EightPoint {
        nullspace: Vec<u8>,
    },
    SevenPoint {
        root: u8,
        condition: CubicCondition,
    },
    FivePoint {
        z: u8,
        x: u8,
        y: u8,
        subsystem: (usize, usize),
    },
}

/// An essential-matrix candidate: residues modulo `2^N` with provenance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EssentialCandidate {
    pub matrix: ResidueMat3,
    pub method: SolveMethod,
    pub seed: Seed,
    /// Correction steps the final lift consumed (`N - 1`).
    pub iterations: u32,
    /// Row-major index `3i + j` of a 2x2 minor (row `i`, column `j` deleted)
    /// whose determinant is a unit; `None` marks a candidate that failed the
    /// rank-2 test.
    pub witness_minor: Option<usize>,
}

/// The rank-2 certificate: determinant zero at working precision plus one
/// unit 2x2 minor.
pub fn rank2_witness(e: &ResidueMat3) -> Option<usize> {
    if !e.det().residue().is_zero() {
        return None;
    }
    for i in 0..3 {
        for j in 0..3 {
            if e.minor(i, j).is_unit() {
                return Some(3 * i + j);
            }
        }
    }
    None
}

/// The row a correspondence contributes to the epipolar system: entry
/// `3i + j` is `u_i v_j`, so that `row . vec(E) = u^T E v`.
pub fn epipolar_row(c: &Correspondence) -> Vec<TruncatedPadic> {
    let mut row = Vec::with_capacity(9);
    for i in 0..3 {
        for j in 0..3 {
            row.push(c.u()[i].mul(&c.v()[j]));
        }
    }
    row
}

/// Stacks epipolar rows into an `n x 9` residue matrix at the requested
/// precision.
pub fn build_epipolar_matrix(
    corrs: &[Correspondence],
    precision: u32,
) -> Result<ResidueMatrix, PoseError> {
    if corrs.len() > 9 {
        return Err(PoseError::TooManyPoints(corrs.len()));
    }
    let mut entries = Vec::with_capacity(corrs.len() * 9);
    for c in corrs {
        if c.precision() < precision {
            return Err(PoseError::PrecisionTooLow {
                needed: precision,
                got: c.precision(),
            });
        }
        let reduced = c.truncate(precision);
        entries.extend(
            epipolar_row(&reduced)
                .into_iter()
                .map(|t| t.residue().clone()),
        );
    }
    Ok(ResidueMatrix::from_rows(corrs.len(), 9, precision, entries))
}

fn epipolar_system(
    corrs: &[Correspondence],
    expected: usize,
    precision: u32,
) -> Result<ResidueMatrix, PoseError> {
    if corrs.len() != expected {
        return Err(PoseError::WrongPointCount {
            expected,
            got: corrs.len(),
        });
    }
    build_epipolar_matrix(corrs, precision)
}

/// Lifts the epipolar nullspace and reshapes the vectors into matrices.
/// Matrices lifted from the nullspace of the epipolar system: two for the
/// 7-point solver, four for the 5-point solver. Every matrix satisfies all
/// linear epipolar constraints modulo `2^N`.
#[derive(Debug, Clone)]
pub struct PencilBasis {
    pub matrices: Vec<ResidueMat3>,
    /// The mod-2 nullspace seeds, in basis order.
    pub seeds: Vec<Vec<u8>>,
    /// Correction steps each lift consumed (`N - 1`).
    pub iterations: u32,
}

fn lifted_pencil(
    a: &ResidueMatrix,
    expected_dim: usize,
    precision: u32,
) -> Result<PencilBasis, PoseError> {
    let basis = nullspace_mod2(&a.mod2());
    if basis.dimension() != expected_dim {
        return Err(PoseError::RankDrop);
    }
    let lifted = lift_nullspace(a, &basis, precision)?;
    let pencil = PencilBasis {
        matrices: lifted
            .vectors
            .iter()
            .map(|v| ResidueMat3::from_residue_vec(v, precision))
            .collect(),
        seeds: basis
            .vectors
            .iter()
            .map(|v| v.iter().map(|&b| u8::from(b)).collect())
            .collect(),
        iterations: lifted.iterations,
    };
    debug_assert!(pencil.matrices.iter().all(|m| {
        let vec: Vec<BigUint> = m.entries().iter().map(|t| t.residue().clone()).collect();
        a.mul_vec(&vec).iter().all(BigUint::is_zero)
    }));
    Ok(pencil)
}

/// The 8-point solver: one lifted nullspace vector, unique when the rank-2
/// witness exists.
pub fn solve_8pt(
    corrs: &[Correspondence],
    precision: u32,
) -> Result<EssentialCandidate, PoseError> {
    let a = epipolar_system(corrs, 8, precision)?;
    let pencil = lifted_pencil(&a, 1, precision)?;
    let matrix = pencil
        .matrices
        .into_iter()
        .next()
        .expect("dimension checked");
    debug_assert!(a
        .mul_vec(
            &matrix
                .entries()
                .iter()
                .map(|t| t.residue().clone())
                .collect::<Vec<_>>()
        )
        .iter()
        .all(BigUint::is_zero));
    let witness = rank2_witness(&matrix);
    let candidate = EssentialCandidate {
        matrix,
        method: SolveMethod::EightPoint,
        seed: Seed::EightPoint {
            nullspace: pencil.seeds.into_iter().next().expect("dimension checked"),
        },
        iterations: pencil.iterations,
        witness_minor: witness,
    };
    if candidate.witness_minor.is_none() {
        return Err(PoseError::RankTestFailed {
            candidate: Box::new(candidate),
        });
    }
    Ok(candidate)
}

/// Coefficients of the pencil determinant `h(x) = a x^3 + b x^2 + c x + d`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CubicCoeffs {
    pub a: TruncatedPadic,
    pub b: TruncatedPadic,
    pub c: TruncatedPadic,
    pub d: TruncatedPadic,
}

impl CubicCoeffs {
    pub fn from_poly(h: &IntPolynomial, precision: u32) -> Self {
        assert_eq!(h.num_vars(), 1);
        assert!(h.degree_in(0) <= 3, "pencil determinant is cubic");
        let coeff = |deg: u32| TruncatedPadic::from_bigint(&h.coefficient(&[deg]), 2, precision);
        Self {
            a: coeff(3),
            b: coeff(2),
            c: coeff(1),
            d: coeff(0),
        }
    }
}

/// Classifies which of 0, 1 is a liftable simple root of the cubic modulo 2,
/// by the three parity cases on `(a, b, c, d)`.
pub fn cubic_root_conditions(h: &CubicCoeffs) -> Option<(u8, CubicCondition)> {
    let odd = |t: &TruncatedPadic| t.residue().bit(0);
    if !odd(&h.d) {
        // d even: zero is a root, simple iff c is odd
        odd(&h.c).then_some((0, CubicCondition::ZeroSimple))
    } else if odd(&h.a) {
        // d odd, a odd: one is a simple root iff b and c are both even
        (!odd(&h.b) && !odd(&h.c)).then_some((1, CubicCondition::OneSimpleOddLeading))
    } else {
        // d odd, a even: one is a simple root iff b is even and c is odd
        (!odd(&h.b) && odd(&h.c)).then_some((1, CubicCondition::OneSimpleEvenLeading))
    }
}

/// `det(x E1 + (1 - x) E2)` expanded exactly as a univariate polynomial.
fn pencil_cubic(e1: &ResidueMat3, e2: &ResidueMat3) -> IntPolynomial {
    let x = IntPolynomial::variable(1, 0);
    let one_minus_x = IntPolynomial::constant(1, BigInt::from(1)).sub(&x);
    let entries: Vec<IntPolynomial> = e1
        .entries()
        .iter()
        .zip(e2.entries())
        .map(|(a, b)| {
            x.scale(&a.to_bigint())
                .add(&one_minus_x.scale(&b.to_bigint()))
        })
        .collect();
    PolyMat3::from_vec(entries).det()
}

/// The 7-point solver: two lifted pencil matrices, a determinant cubic, and
/// one lifted root when the parity conditions admit it.
///
/// Candidates without a rank-2 witness are excluded, so the returned list may
/// be empty even though a root lifted.
pub fn solve_7pt(
    corrs: &[Correspondence],
    precision: u32,
) -> Result<Vec<EssentialCandidate>, PoseError> {
    let a = epipolar_system(corrs, 7, precision)?;
    let mats = lifted_pencil(&a, 2, precision)?.matrices;
    let (e1, e2) = (&mats[0], &mats[1]);

    let h_int = pencil_cubic(e1, e2);
    let h = CubicCoeffs::from_poly(&h_int, precision);
    let Some((root, condition)) = cubic_root_conditions(&h) else {
        return Err(PoseError::NoLiftableRoot);
    };
    let trace =
        hensel::lift_univariate(&h_int, root, precision).map_err(|_| PoseError::NoLiftableRoot)?;
    let x = TruncatedPadic::new(2, precision, trace.solution()[0].clone());
    let one_minus_x = TruncatedPadic::one(2, precision).sub(&x);
    let matrix = e1.scale(&x).add(&e2.scale(&one_minus_x));

    // postconditions: the lift drove det(E) = h(x) to zero, and E stays in
    // the pencil, so the linear constraints persist
    debug_assert!(matrix.det().residue().is_zero());
    debug_assert!(corrs.iter().all(|c| c
        .truncate(precision)
        .epipolar_residual(&matrix)
        .residue()
        .is_zero()));

    let witness = rank2_witness(&matrix);
    let candidate = EssentialCandidate {
        matrix,
        method: SolveMethod::SevenPoint,
        seed: Seed::SevenPoint { root, condition },
        iterations: trace.iterations(),
        witness_minor: witness,
    };
    Ok(if candidate.witness_minor.is_some() {
        vec![candidate]
    } else {
        vec![]
    })
}

/// The symbolic pencil `x E1 + y E2 + z E3 + w E4` over `(x, y, z, w)`.
fn symbolic_pencil(pencil: &[ResidueMat3]) -> PolyMat3 {
    assert_eq!(pencil.len(), 4);
    let entries: Vec<IntPolynomial> = (0..9)
        .map(|k| {
            let mut acc = IntPolynomial::zero(4);
            for (var, mat) in pencil.iter().enumerate() {
                acc =
                    acc.add(&IntPolynomial::variable(4, var).scale(&mat.entries()[k].to_bigint()));
            }
            acc
        })
        .collect();
    PolyMat3::from_vec(entries)
}

/// The 5-point solver: a four-matrix pencil, hidden-variable elimination to
/// `g(z) = det(C(z))`, lifting of the simple mod-2 roots, and recovery of
/// `(x, y)` through a rank-2 subsystem of the ten constraint cubics. Every
/// returned candidate passes all five epipolar constraints, the nine
/// trace-condition entries, `det(E) = 0`, and the rank-2 test.
///
/// A word of caution on solvability. Modulo 2 every trace-condition entry
/// collapses to `l^2 e_k` where `l` is the sum of the nine entry forms (the
/// leading factor 2 wipes the `E E^T E` part). Two consequences follow for
/// any linear pencil: the trace rows of `C(z)` span at most four dimensions
/// modulo 2, making `det C(z)` identically even, and every mod-2 solution of
/// the ten equations has `l` even, which kills all nine trace gradients
/// there. Root classification therefore runs on the primitive part of `g`
/// (the 2-content carries no root information over the 2-adic integers), and
/// the `(x, y)` recovery stage cannot find a subsystem satisfying the rank
/// hypothesis of the lifting theorem: on real scene data the solver reports
/// `NoLiftableRoot` or `XYRecoveryFailed` rather than candidates. The stage
/// structure is kept intact so each gate is observable and testable.
pub fn solve_5pt(
    corrs: &[Correspondence],
    precision: u32,
) -> Result<Vec<EssentialCandidate>, PoseError> {
    let a = epipolar_system(corrs, 5, precision)?;
    let pencil = lifted_pencil(&a, 4, precision)?.matrices;

    let system = build_hidden_var_system(&symbolic_pencil(&pencil));
    let g = det_poly(&system.coeff_matrix)?;
    let g_primitive = g.primitive_part_pow2();

    let simple_roots: Vec<u8> = hensel::univariate_roots_mod2(&g_primitive)
        .into_iter()
        .filter(|r| r.simple)
        .map(|r| r.value)
        .collect();
    if simple_roots.is_empty() {
        return Err(PoseError::NoLiftableRoot);
    }

    let mut candidates = Vec::new();
    let mut saw_seed = false;
    let mut saw_subsystem = false;
    for z0 in simple_roots {
        let z_trace = hensel::lift_univariate(&g_primitive, z0, precision)
            .map_err(|_| PoseError::NoLiftableRoot)?;
        let z_hat = BigInt::from(z_trace.solution()[0].clone());

        // the ten cubics with z fixed become polynomials in (x, y)
        let eqs_xy: Vec<IntPolynomial> = system
            .equations
            .iter()
            .map(|eq| eq.substitute(2, &z_hat).restrict(&[0, 1]))
            .collect();

        for (sx, sy) in [(0u8, 0u8), (0, 1), (1, 0), (1, 1)] {
            let at = [BigUint::from(sx), BigUint::from(sy)];
            if !eqs_xy.iter().all(|eq| eq.eval_mod2k(&at, 1).is_zero()) {
                continue;
            }
            saw_seed = true;
            let Some((i, j)) = rank2_subsystem(&eqs_xy, &at) else {
                continue;
            };
            saw_subsystem = true;
            let pair = PolySystem::new(vec![eqs_xy[i].clone(), eqs_xy[j].clone()]);
            let xy_trace =
                hensel::lift(&pair, &[sx, sy], precision).expect("seed and rank checked");

            let x = TruncatedPadic::new(2, precision, xy_trace.solution()[0].clone());
            let y = TruncatedPadic::new(2, precision, xy_trace.solution()[1].clone());
            let z = TruncatedPadic::new(2, precision, z_trace.solution()[0].clone());
            let matrix = pencil[0]
                .scale(&x)
                .add(&pencil[1].scale(&y))
                .add(&pencil[2].scale(&z))
                .add(&pencil[3]);

            // linear constraints hold by construction; the nonlinear ones
            // only hold when the subsystem lift extends to the full system
            debug_assert!(corrs.iter().all(|c| c
                .truncate(precision)
                .epipolar_residual(&matrix)
                .residue()
                .is_zero()));
            let trace_ok = matrix
                .trace_condition()
                .iter()
                .all(|t| t.residue().is_zero());
            let det_ok = matrix.det().residue().is_zero();
            let witness = rank2_witness(&matrix);
            if trace_ok && det_ok && witness.is_some() {
                candidates.push(EssentialCandidate {
                    matrix,
                    method: SolveMethod::FivePoint,
                    seed: Seed::FivePoint {
                        z: z0,
                        x: sx,
                        y: sy,
                        subsystem: (i, j),
                    },
                    iterations: xy_trace.iterations(),
                    witness_minor: witness,
                });
            }
        }
    }

    if candidates.is_empty() {
        return Err(PoseError::XYRecoveryFailed(if !saw_seed {
            "no mod-2 (x, y) solution at any classified root"
        } else if !saw_subsystem {
            "no constraint pair has a rank-2 jacobian at the seed"
        } else {
            "lifted (x, y) failed full verification"
        }));
    }
    Ok(candidates)
}

/// First pair of equations whose Jacobian in `(x, y)` is invertible modulo 2
/// at the seed.
fn rank2_subsystem(eqs: &[IntPolynomial], at: &[BigUint]) -> Option<(usize, usize)> {
    let parity = |p: &IntPolynomial| p.eval_mod2k(at, 1).bit(0);
    let grads: Vec<(bool, bool)> = eqs
        .iter()
        .map(|eq| {
            (
                parity(&eq.partial_derivative(0)),
                parity(&eq.partial_derivative(1)),
            )
        })
        .collect();
    for i in 0..eqs.len() {
        for j in i + 1..eqs.len() {
            let (a, b) = grads[i];
            let (c, d) = grads[j];
            if (a && d) ^ (b && c) {
                return Some((i, j));
            }
        }
    }
    None
}

/// Tests `E = lambda F` for a unit `lambda`, derived from the first unit
/// entry of `F`.
pub fn equal_up_to_unit(e: &ResidueMat3, f: &ResidueMat3) -> Option<TruncatedPadic> {
    let k = f.entries().iter().position(TruncatedPadic::is_unit)?;
    let lambda = e.entries()[k].mul(&f.entries()[k].invert_unit().ok()?);
    if !lambda.is_unit() {
        return None;
    }
    e.entries()
        .iter()
        .zip(f.entries())
        .all(|(a, b)| *a == lambda.mul(b))
        .then_some(lambda)
}
