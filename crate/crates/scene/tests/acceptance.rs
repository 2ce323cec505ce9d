//! Acceptance suite: one test per criterion, each finishing with a pass line
//! on stdout (run with `cargo test --test acceptance -- --nocapture` to see
//! them). Expected values come from independent oracles: brute-force root
//! scans, exhaustive enumeration, and scalar determinant evaluation.

use dyadic_core::encoding::{decode_coord, encode_coord, iota, DyadicRational};
use dyadic_core::hensel::{jacobian_mod2, lift, lift_univariate};
use dyadic_core::linalg::rref_mod2;
use dyadic_core::poly::{IntPolynomial, PolySystem};
use dyadic_core::pose::{
    build_epipolar_matrix, build_hidden_var_system, det_poly, equal_up_to_unit,
    integer_determinant, solve_5pt, solve_7pt, solve_8pt, Correspondence, EssentialCandidate, Mat3,
    PoseError, ResidueMat3, SolveMethod,
};
use dyadic_core::TruncatedPadic;
use dyadic_scene::perturb::{perturb_correspondences, PerturbationSpec};
use dyadic_scene::scene::{gen_scene, Scene, SceneParams};
use num_bigint::{BigInt, BigUint};
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;

fn pass(criterion: u32, what: &str) {
    println!("ACCEPTANCE {criterion}: {what}: PASS");
}

fn scene_corrs(scene: &Scene, count: usize, precision: u32) -> Vec<Correspondence> {
    scene
        .correspondences_at(count, precision)
        .expect("generated points are primitive")
}

#[test]
fn criterion_1_univariate_hensel_oracle() {
    let f = IntPolynomial::from_terms(1, &[(&[2], 1), (&[1], 1), (&[0], 2)]);

    // precision 4: brute-force roots of x^2 + x + 2 mod 16 are {5, 10}
    let brute4: Vec<u64> = (0..16u64).filter(|x| (x * x + x + 2) % 16 == 0).collect();
    assert_eq!(brute4, vec![5, 10]);
    let lift0 = lift_univariate(&f, 0, 4).unwrap();
    let lift1 = lift_univariate(&f, 1, 4).unwrap();
    assert_eq!(lift0.solution()[0], BigUint::from(10u32));
    assert_eq!(lift1.solution()[0], BigUint::from(5u32));

    // precision 16: the full scan of [0, 2^16) must agree with both branches
    let modulus = 1u64 << 16;
    let brute16: Vec<u64> = (0..modulus)
        .filter(|&x| (x.wrapping_mul(x) + x + 2) % modulus == 0)
        .collect();
    let mut lifted: Vec<u64> = [lift_univariate(&f, 1, 16), lift_univariate(&f, 0, 16)]
        .map(|t| {
            let digits = t.unwrap().solution()[0].to_u64_digits();
            digits.first().copied().unwrap_or(0)
        })
        .to_vec();
    lifted.sort_unstable();
    assert_eq!(brute16, lifted);
    pass(1, "univariate lifts match brute-force roots up to 2^16");
}

#[test]
fn criterion_2_multivariate_hensel_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(2026);
    let monomials: [[u32; 2]; 6] = [[0, 0], [1, 0], [0, 1], [2, 0], [1, 1], [0, 2]];
    let mut verified = 0;
    while verified < 100 {
        let seed = [rng.gen_range(0..2u8), rng.gen_range(0..2u8)];
        let polys: Vec<IntPolynomial> = (0..2)
            .map(|_| {
                let mut p = IntPolynomial::zero(2);
                for m in &monomials {
                    let c = rng.gen_range(-8..=8i64);
                    p = p.add(&IntPolynomial::monomial(2, m.to_vec(), BigInt::from(c)));
                }
                // plant the root: make p(seed) even by fixing the parity
                let at = [BigUint::from(seed[0]), BigUint::from(seed[1])];
                if p.eval_mod2k(&at, 1).bits() != 0 {
                    p = p.sub(&IntPolynomial::constant(2, BigInt::from(1)));
                }
                p
            })
            .collect();
        let system = PolySystem::new(polys);
        let at = [BigUint::from(seed[0]), BigUint::from(seed[1])];
        let jac = jacobian_mod2(&system, &at);
        if rref_mod2(&jac).rank != 2 {
            continue;
        }

        let trace = lift(&system, &seed, 8).expect("unit jacobian lifts");
        let lifted: Vec<u64> = trace
            .solution()
            .iter()
            .map(|b| b.to_u64_digits().first().copied().unwrap_or(0))
            .collect();

        // independent oracle: evaluate the raw terms over all of (Z/2^8)^2
        let terms: Vec<Vec<(u32, u32, i64)>> = system
            .polys()
            .iter()
            .map(|p| {
                p.terms()
                    .map(|(e, c)| {
                        (
                            e[0],
                            e[1],
                            i64::try_from(c.clone()).expect("small coefficient"),
                        )
                    })
                    .collect()
            })
            .collect();
        let eval = |terms: &[(u32, u32, i64)], x: i64, y: i64| -> i64 {
            terms
                .iter()
                .map(|&(ex, ey, c)| c * x.pow(ex) * y.pow(ey))
                .sum::<i64>()
                .rem_euclid(256)
        };
        let mut matches = Vec::new();
        for x in 0..256i64 {
            for y in 0..256i64 {
                if x % 2 == i64::from(seed[0])
                    && y % 2 == i64::from(seed[1])
                    && terms.iter().all(|t| eval(t, x, y) == 0)
                {
                    matches.push(vec![x as u64, y as u64]);
                }
            }
        }
        assert_eq!(
            matches,
            vec![lifted],
            "lift must be the unique congruent solution"
        );
        verified += 1;
    }
    pass(
        2,
        "100 planted square systems lift to the unique mod 2^8 solution",
    );
}

#[test]
fn criterion_3_encoding_bijection_and_contraction() {
    // exhaustive bijectivity for every depth up to 12
    for m in 1..=12u32 {
        for x in 0..1u64 << m {
            assert_eq!(decode_coord(&encode_coord(x, m).unwrap(), m), x);
        }
    }

    // contraction: |r - s|_2 < 2^-l implies |iota r - iota s| < 2^-l for
    // all l < m; the tightest l per pair is the valuation minus one
    for m in 2..=10u32 {
        let images: Vec<(TruncatedPadic, DyadicRational)> = (0..1u64 << m)
            .map(|x| {
                let r = encode_coord(x, m).unwrap();
                let image = iota(&r);
                (r, image)
            })
            .collect();
        for a in 0..images.len() {
            for b in a + 1..images.len() {
                let (ra, ia) = &images[a];
                let (rb, ib) = &images[b];
                let val = ra.sub(rb).valuation();
                assert!(!val.at_precision_floor, "distinct codes differ");
                if val.exponent == 0 {
                    continue;
                }
                let tightest = val.exponent - 1;
                assert!(
                    ia.abs_diff(ib) < DyadicRational::pow2_neg(tightest),
                    "contraction fails at m={m}, pair ({a},{b}), l={tightest}"
                );
            }
        }
    }
    pass(
        3,
        "encoding bijective to depth 12, contraction exhaustive to depth 10",
    );
}

#[test]
fn criterion_4_eight_point_recovers_ground_truth() {
    let n = 32;
    let mut certified = 0;
    for seed in 0..200u64 {
        let scene = gen_scene(seed, &SceneParams::default());
        let corrs = scene_corrs(&scene, 8, n);
        match solve_8pt(&corrs, n) {
            Err(PoseError::RankDrop) => continue,
            Err(e) => panic!("seed {seed}: unexpected status {}", e.status_name()),
            Ok(candidate) => {
                certified += 1;
                assert_eq!(candidate.iterations, n - 1, "lift must take N-1 steps");
                let reference = scene.e_reference(n);
                let lambda = equal_up_to_unit(&candidate.matrix, &reference)
                    .expect("candidate equals ground truth up to a unit");
                assert!(lambda.is_unit());
            }
        }
    }
    assert!(certified >= 10, "too few rank-8 scenes: {certified}");
    pass(
        4,
        &format!("8-point exact recovery with 31 iterations on {certified}/200 certified scenes"),
    );
}

#[test]
fn criterion_5_seven_point_candidates_verify() {
    let n = 64;
    let mut found = 0;
    let mut attempts = 0;
    let mut seed = 10_000u64;
    while found < 25 && attempts < 600 {
        attempts += 1;
        seed += 1;
        let scene = gen_scene(seed, &SceneParams::default());
        let corrs = scene_corrs(&scene, 7, n);
        let candidates = match solve_7pt(&corrs, n) {
            Ok(c) => c,
            Err(_) => continue, // resample until a parity condition holds
        };
        if candidates.is_empty() {
            continue;
        }
        for cand in &candidates {
            for c in &corrs {
                assert!(
                    c.epipolar_residual(&cand.matrix).residue().is_zero(),
                    "epipolar constraint must vanish mod 2^{n}"
                );
            }
            assert!(
                cand.matrix.det().residue().is_zero(),
                "det must vanish mod 2^{n}"
            );
            let minor_index = cand
                .witness_minor
                .expect("accepted candidates carry a witness");
            let (i, j) = (minor_index / 3, minor_index % 3);
            assert!(
                cand.matrix.minor(i, j).is_unit(),
                "witness minor must be a unit"
            );
        }
        found += 1;
    }
    assert_eq!(
        found, 25,
        "not enough liftable 7-point scenes in {attempts} attempts"
    );
    pass(
        5,
        "25 seven-point scenes: all candidates satisfy all constraints mod 2^64",
    );
}

#[test]
fn criterion_6_five_point_determinant_and_candidates() {
    let oracle_precision = 64u32;
    let oracle_modulus = BigInt::from(1) << oracle_precision;
    let candidate_precision = 32u32;
    let mut rng = ChaCha8Rng::seed_from_u64(66);
    let mut census: BTreeMap<String, usize> = BTreeMap::new();
    let mut checked = 0;
    let mut seed = 50_000u64;

    while checked < 50 {
        seed += 1;
        let scene = gen_scene(seed, &SceneParams::default());

        // (a) the hidden-variable determinant polynomial, against the scalar
        // determinant oracle at fresh random points
        let corrs = scene_corrs(&scene, 5, oracle_precision);
        let a = build_epipolar_matrix(&corrs, oracle_precision).unwrap();
        let basis = dyadic_core::linalg::nullspace_mod2(&a.mod2());
        if basis.dimension() != 4 {
            continue;
        }
        let Ok(lifted) = dyadic_core::linalg::lift_nullspace(&a, &basis, oracle_precision) else {
            continue;
        };
        let pencil: Vec<ResidueMat3> = lifted
            .vectors
            .iter()
            .map(|v| ResidueMat3::from_residue_vec(v, oracle_precision))
            .collect();
        let entries: Vec<IntPolynomial> = (0..9)
            .map(|k| {
                let mut acc = IntPolynomial::zero(4);
                for (var, mat) in pencil.iter().enumerate() {
                    acc = acc
                        .add(&IntPolynomial::variable(4, var).scale(&mat.entries()[k].to_bigint()));
                }
                acc
            })
            .collect();
        let system = build_hidden_var_system(&Mat3::from_vec(entries));
        let g = det_poly(&system.coeff_matrix).expect("no degree anomaly");
        if !g.is_zero() {
            assert!(g.degree_in(0) <= 10, "degree must cancel down to 10");
        }
        for _ in 0..20 {
            let z0 = BigInt::from(rng.gen_range(-1000..=1000i64));
            let scalar: Vec<Vec<BigInt>> = system
                .coeff_matrix
                .iter()
                .map(|row| {
                    row.iter()
                        .map(|p| p.eval(std::slice::from_ref(&z0)))
                        .collect()
                })
                .collect();
            let oracle = integer_determinant(scalar);
            use num_integer::Integer as _;
            assert_eq!(
                g.eval(std::slice::from_ref(&z0)).mod_floor(&oracle_modulus),
                oracle.mod_floor(&oracle_modulus),
                "interpolated determinant must match scalar evaluation"
            );
        }

        // (b) any returned candidate must satisfy every constraint; the
        // mod-2 degeneracy of the trace condition means none are expected
        let corrs32 = scene_corrs(&scene, 5, candidate_precision);
        match solve_5pt(&corrs32, candidate_precision) {
            Ok(candidates) => {
                *census
                    .entry(format!("ok({})", candidates.len()))
                    .or_default() += 1;
                for cand in &candidates {
                    for c in &corrs32 {
                        assert!(c.epipolar_residual(&cand.matrix).residue().is_zero());
                    }
                    assert!(cand
                        .matrix
                        .trace_condition()
                        .iter()
                        .all(|t| t.residue().is_zero()));
                    assert!(cand.matrix.det().residue().is_zero());
                    assert!(cand.witness_minor.is_some());
                }
            }
            Err(e) => {
                *census.entry(e.status_name().to_string()).or_default() += 1;
            }
        }
        checked += 1;
    }
    println!("ACCEPTANCE 6 note: 5-point status census over 50 scenes: {census:?}");
    println!(
        "ACCEPTANCE 6 note: no candidates are expected; the trace condition is \
         identically l^2 e_k mod 2, so its gradients vanish at every admissible seed"
    );
    pass(
        6,
        "50 scenes: deg(det C) <= 10, 20-point evaluation oracle exact mod 2^64, all returned candidates verify",
    );
}

fn run_method(
    method: SolveMethod,
    corrs: &[Correspondence],
    precision: u32,
) -> Result<Vec<EssentialCandidate>, &'static str> {
    match method {
        SolveMethod::EightPoint => solve_8pt(corrs, precision)
            .map(|c| vec![c])
            .map_err(|e| e.status_name()),
        SolveMethod::SevenPoint => solve_7pt(corrs, precision).map_err(|e| e.status_name()),
        SolveMethod::FivePoint => solve_5pt(corrs, precision).map_err(|e| e.status_name()),
    }
}

#[test]
fn criterion_7_perturbation_stability() {
    let methods = [
        SolveMethod::EightPoint,
        SolveMethod::SevenPoint,
        SolveMethod::FivePoint,
    ];
    for precision in [8u32, 16, 32] {
        for seed in 0..50u64 {
            let scene = gen_scene(seed, &SceneParams::default());
            let perturbed = perturb_correspondences(
                &scene.correspondences,
                &PerturbationSpec::new(precision, seed ^ 0xabcd),
            );
            for method in methods {
                let count = method.point_count();
                let base: Vec<Correspondence> = scene.correspondences[..count]
                    .iter()
                    .map(|(u, v)| Correspondence::from_integers(u, v, precision).unwrap())
                    .collect();
                let noisy: Vec<Correspondence> = perturbed[..count]
                    .iter()
                    .map(|(u, v)| Correspondence::from_integers(u, v, precision).unwrap())
                    .collect();
                let a = run_method(method, &base, precision);
                let b = run_method(method, &noisy, precision);
                assert_eq!(
                    a, b,
                    "outcome changed under 2^{precision}-multiples at seed {seed} ({method})"
                );
            }
        }
    }
    pass(
        7,
        "2^N-multiple perturbations leave all three solvers bit-identical for N in {8, 16, 32}",
    );
}

#[test]
fn criterion_8_truncation_coherence() {
    let (deep, shallow) = (32u32, 16u32);
    let methods = [
        SolveMethod::EightPoint,
        SolveMethod::SevenPoint,
        SolveMethod::FivePoint,
    ];
    for method in methods {
        let mut compared = 0;
        for seed in 0..50u64 {
            let scene = gen_scene(seed, &SceneParams::default());
            let count = method.point_count();
            let at_deep = run_method(method, &scene_corrs(&scene, count, deep), deep);
            let at_shallow = run_method(method, &scene_corrs(&scene, count, shallow), shallow);
            match (at_deep, at_shallow) {
                (Ok(d), Ok(s)) => {
                    assert_eq!(d.len(), s.len(), "candidate counts differ at seed {seed}");
                    for (x, y) in d.iter().zip(&s) {
                        assert_eq!(
                            x.matrix.truncate(shallow),
                            y.matrix,
                            "truncated deep solve differs at seed {seed} ({method})"
                        );
                        assert_eq!(x.seed, y.seed, "mod-2 seeds differ at seed {seed}");
                    }
                    compared += 1;
                }
                (Err(_), Err(_)) => {
                    // no candidates on either side; the linear and parity
                    // gates only read data below 2^16, so a status at one
                    // precision implies a failure at the other
                }
                (deep_out, shallow_out) => panic!(
                    "seed {seed} ({method}): solvability differs across precisions: \
                     deep {:?}, shallow {:?}",
                    deep_out.map(|c| c.len()),
                    shallow_out.map(|c| c.len())
                ),
            }
        }
        if method != SolveMethod::FivePoint {
            assert!(compared > 0, "no comparable scenes for {method}");
        }
    }
    pass(
        8,
        "solving at 2^32 then truncating equals solving at 2^16 for every produced candidate",
    );
}
