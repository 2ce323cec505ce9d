//! Perturbation below the working precision.
//!
//! Noise of the form `2^N * r` vanishes modulo `2^N`, so a solver run at
//! precision `N` must produce bit-identical residues on perturbed and
//! unperturbed inputs. The perturbed copy is returned alongside the original
//! so experiments can report both.

use crate::scene::ImagePair;
use num_bigint::BigInt;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// What to perturb and how: every selected integer gets `+ 2^precision * r`
/// with `r` drawn from `[-max_multiplier, max_multiplier]`.
#[derive(Debug, Clone, Copy)]
pub struct PerturbationSpec {
    /// Noise magnitude exponent: the noise is a multiple of `2^precision`.
    pub precision: u32,
    pub rng_seed: u64,
    pub max_multiplier: i64,
}

impl PerturbationSpec {
    pub fn new(precision: u32, rng_seed: u64) -> Self {
        Self {
            precision,
            rng_seed,
            max_multiplier: 16,
        }
    }
}

/// Adds `2^N`-multiples to a list of integer coefficients.
pub fn perturb_coefficients(values: &[BigInt], spec: &PerturbationSpec) -> Vec<BigInt> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.rng_seed);
    let step = BigInt::from(1) << spec.precision;
    values
        .iter()
        .map(|v| {
            let r = rng.gen_range(-spec.max_multiplier..=spec.max_multiplier);
            v + &step * BigInt::from(r)
        })
        .collect()
}

/// Perturbs every coordinate of a correspondence list; the epipolar matrix
/// entries (products of coordinates) then differ by `2^N`-multiples as well.
pub fn perturb_correspondences(corrs: &[ImagePair], spec: &PerturbationSpec) -> Vec<ImagePair> {
    let flat: Vec<BigInt> = corrs
        .iter()
        .flat_map(|(u, v)| u.iter().chain(v.iter()).cloned())
        .collect();
    let noisy = perturb_coefficients(&flat, spec);
    noisy
        .chunks_exact(6)
        .map(|chunk| {
            (
                [chunk[0].clone(), chunk[1].clone(), chunk[2].clone()],
                [chunk[3].clone(), chunk[4].clone(), chunk[5].clone()],
            )
        })
        .collect()
}
