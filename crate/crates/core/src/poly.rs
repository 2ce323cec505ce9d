//! Exact multivariate polynomials with arbitrary-size integer coefficients.
//!
//! Coefficients are never reduced while a polynomial is being built or
//! combined; reduction happens at evaluation time only. The 5-point
//! determinant polynomial has coefficients far beyond machine words, so all
//! arithmetic goes through `BigInt`.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;
use std::fmt;

/// A sparse polynomial in `num_vars` variables over the integers.
///
/// Maps exponent vectors (length `num_vars`) to nonzero coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntPolynomial {
    num_vars: usize,
    terms: BTreeMap<Vec<u32>, BigInt>,
}

impl IntPolynomial {
    pub fn zero(num_vars: usize) -> Self {
        Self {
            num_vars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(num_vars: usize, value: BigInt) -> Self {
        let mut p = Self::zero(num_vars);
        p.add_term(vec![0; num_vars], value);
        p
    }

    /// The monomial `X_index`.
    pub fn variable(num_vars: usize, index: usize) -> Self {
        assert!(index < num_vars, "variable index out of range");
        let mut exps = vec![0; num_vars];
        exps[index] = 1;
        let mut p = Self::zero(num_vars);
        p.add_term(exps, BigInt::one());
        p
    }

    /// Builds from `(exponents, coefficient)` pairs, merging duplicates.
    pub fn from_terms(num_vars: usize, terms: &[(&[u32], i64)]) -> Self {
        let mut p = Self::zero(num_vars);
        for (exps, coeff) in terms {
            assert_eq!(exps.len(), num_vars, "exponent vector length mismatch");
            p.add_term(exps.to_vec(), BigInt::from(*coeff));
        }
        p
    }

    /// A dense univariate polynomial; index is the degree.
    pub fn univariate(coeffs: &[BigInt]) -> Self {
        let mut p = Self::zero(1);
        for (deg, c) in coeffs.iter().enumerate() {
            p.add_term(vec![deg as u32], c.clone());
        }
        p
    }

    /// The single term `coeff * X^exps`.
    pub fn monomial(num_vars: usize, exps: Vec<u32>, coeff: BigInt) -> Self {
        assert_eq!(exps.len(), num_vars, "exponent vector length mismatch");
        let mut p = Self::zero(num_vars);
        p.add_term(exps, coeff);
        p
    }

    fn add_term(&mut self, exps: Vec<u32>, coeff: BigInt) {
        if coeff.is_zero() {
            return;
        }
        let entry = self.terms.entry(exps);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += coeff;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &BigInt)> {
        self.terms.iter()
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    pub fn degree_in(&self, var: usize) -> u32 {
        self.terms.keys().map(|e| e[var]).max().unwrap_or(0)
    }

    /// Coefficient of the given exponent vector (zero when absent).
    pub fn coefficient(&self, exps: &[u32]) -> BigInt {
        self.terms.get(exps).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn add(&self, rhs: &Self) -> Self {
        assert_eq!(self.num_vars, rhs.num_vars);
        let mut out = self.clone();
        for (exps, coeff) in &rhs.terms {
            out.add_term(exps.clone(), coeff.clone());
        }
        out
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    pub fn neg(&self) -> Self {
        Self {
            num_vars: self.num_vars,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.clone(), -c.clone()))
                .collect(),
        }
    }

    pub fn scale(&self, factor: &BigInt) -> Self {
        if factor.is_zero() {
            return Self::zero(self.num_vars);
        }
        Self {
            num_vars: self.num_vars,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.clone(), c * factor))
                .collect(),
        }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.num_vars, rhs.num_vars);
        let mut out = Self::zero(self.num_vars);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                let exps: Vec<u32> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                out.add_term(exps, ca * cb);
            }
        }
        out
    }

    /// Formal partial derivative with respect to `X_var`.
    pub fn partial_derivative(&self, var: usize) -> Self {
        assert!(var < self.num_vars);
        let mut out = Self::zero(self.num_vars);
        for (exps, coeff) in &self.terms {
            if exps[var] == 0 {
                continue;
            }
            let mut e = exps.clone();
            e[var] -= 1;
            out.add_term(e, coeff * BigInt::from(exps[var]));
        }
        out
    }

    /// Replaces `X_var` by a constant; the variable count is unchanged.
    pub fn substitute(&self, var: usize, value: &BigInt) -> Self {
        assert!(var < self.num_vars);
        let mut out = Self::zero(self.num_vars);
        for (exps, coeff) in &self.terms {
            let mut e = exps.clone();
            let power = e[var];
            e[var] = 0;
            out.add_term(e, coeff * value.pow(power));
        }
        out
    }

    /// Reindexes onto the listed variables, dropping the rest.
    ///
    /// # Panics
    ///
    /// Panics if a dropped variable still occurs with a nonzero exponent.
    pub fn restrict(&self, keep: &[usize]) -> Self {
        let mut out = Self::zero(keep.len());
        for (exps, coeff) in &self.terms {
            for (v, &e) in exps.iter().enumerate() {
                assert!(
                    keep.contains(&v) || e == 0,
                    "variable X_{v} still occurs and is not kept"
                );
            }
            let e: Vec<u32> = keep.iter().map(|&v| exps[v]).collect();
            out.add_term(e, coeff.clone());
        }
        out
    }

    /// Exact evaluation over the integers.
    pub fn eval(&self, x: &[BigInt]) -> BigInt {
        assert_eq!(x.len(), self.num_vars, "dimension mismatch");
        let mut acc = BigInt::zero();
        for (exps, coeff) in &self.terms {
            let mut term = coeff.clone();
            for (xi, &e) in x.iter().zip(exps) {
                term *= xi.pow(e);
            }
            acc += term;
        }
        acc
    }

    /// Evaluation reduced modulo `2^k`, with intermediate reduction.
    pub fn eval_mod2k(&self, x: &[BigUint], k: u32) -> BigUint {
        assert_eq!(x.len(), self.num_vars, "dimension mismatch");
        let modulus = BigUint::one() << k;
        let modulus_int = BigInt::from(modulus.clone());
        let mut acc = BigUint::zero();
        for (exps, coeff) in &self.terms {
            let mut term = coeff
                .mod_floor(&modulus_int)
                .to_biguint()
                .expect("mod_floor is nonnegative");
            for (xi, &e) in x.iter().zip(exps) {
                if e > 0 {
                    term = term * xi.modpow(&BigUint::from(e), &modulus) % &modulus;
                }
            }
            acc = (acc + term) % &modulus;
        }
        acc
    }

    /// Divides out the largest power of two dividing every coefficient.
    pub fn primitive_part_pow2(&self) -> Self {
        let Some(shift) = self
            .terms
            .values()
            .map(|c| c.trailing_zeros().expect("stored coefficients are nonzero"))
            .min()
        else {
            return self.clone();
        };
        Self {
            num_vars: self.num_vars,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.clone(), c >> shift))
                .collect(),
        }
    }

    /// Dense coefficient list of a univariate polynomial, index = degree.
    ///
    /// # Panics
    ///
    /// Panics unless the polynomial has exactly one variable.
    pub fn univariate_coeffs(&self) -> Vec<BigInt> {
        assert_eq!(self.num_vars, 1, "not univariate");
        let deg = self.degree_in(0) as usize;
        let mut coeffs = vec![BigInt::zero(); deg + 1];
        for (exps, coeff) in &self.terms {
            coeffs[exps[0] as usize] = coeff.clone();
        }
        coeffs
    }
}

impl fmt::Display for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (exps, coeff) in self.terms.iter().rev() {
            if !first {
                write!(f, " {} ", if coeff.is_negative() { "-" } else { "+" })?;
            } else {
                if coeff.is_negative() {
                    write!(f, "-")?;
                }
                first = false;
            }
            let abs = coeff.abs();
            let is_const = exps.iter().all(|&e| e == 0);
            if !abs.is_one() || is_const {
                write!(f, "{abs}")?;
            }
            for (v, &e) in exps.iter().enumerate() {
                match e {
                    0 => {}
                    1 => write!(f, "X{v}")?,
                    _ => write!(f, "X{v}^{e}")?,
                }
            }
        }
        Ok(())
    }
}

/// A system of `m` polynomials in `n` shared variables with `m <= n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolySystem {
    polys: Vec<IntPolynomial>,
    num_vars: usize,
}

impl PolySystem {
    /// # Panics
    ///
    /// Panics if the system is empty, overdetermined (`m > n`), or the
    /// variable counts disagree.
    pub fn new(polys: Vec<IntPolynomial>) -> Self {
        assert!(
            !polys.is_empty(),
            "system must contain at least one polynomial"
        );
        let num_vars = polys[0].num_vars();
        assert!(
            polys.iter().all(|p| p.num_vars() == num_vars),
            "variable count mismatch"
        );
        assert!(
            polys.len() <= num_vars,
            "system must have at most as many equations as variables"
        );
        Self { polys, num_vars }
    }

    pub fn polys(&self) -> &[IntPolynomial] {
        &self.polys
    }

    pub fn len(&self) -> usize {
        self.polys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.polys.is_empty()
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x2_plus_x_plus_2() -> IntPolynomial {
        IntPolynomial::from_terms(1, &[(&[2], 1), (&[1], 1), (&[0], 2)])
    }

    #[test]
    fn arithmetic_identities() {
        let x = IntPolynomial::variable(2, 0);
        let y = IntPolynomial::variable(2, 1);
        let sum = x.add(&y);
        let sq = sum.mul(&sum);
        // (x + y)^2 = x^2 + 2xy + y^2
        let expected = IntPolynomial::from_terms(2, &[(&[2, 0], 1), (&[1, 1], 2), (&[0, 2], 1)]);
        assert_eq!(sq, expected);
        assert!(sq.sub(&expected).is_zero());
    }

    #[test]
    fn derivative_of_product_matches_leibniz() {
        let f = IntPolynomial::from_terms(2, &[(&[2, 1], 3), (&[0, 2], -1), (&[1, 0], 5)]);
        let g = IntPolynomial::from_terms(2, &[(&[1, 1], 2), (&[0, 0], 7)]);
        let lhs = f.mul(&g).partial_derivative(0);
        let rhs = f
            .partial_derivative(0)
            .mul(&g)
            .add(&f.mul(&g.partial_derivative(0)));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn derivative_rules_hold_on_random_polynomials() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(8);
        let mut random_poly = |vars: usize| {
            let mut p = IntPolynomial::zero(vars);
            for _ in 0..rng.gen_range(1..8) {
                let exps: Vec<u32> = (0..vars).map(|_| rng.gen_range(0..4)).collect();
                let coeff = BigInt::from(rng.gen_range(-20..=20i64));
                p = p.add(&IntPolynomial::monomial(vars, exps, coeff));
            }
            p
        };
        for _ in 0..50 {
            let f = random_poly(3);
            let g = random_poly(3);
            for var in 0..3 {
                let sum_rule = f.add(&g).partial_derivative(var);
                assert_eq!(
                    sum_rule,
                    f.partial_derivative(var).add(&g.partial_derivative(var))
                );
                let product_rule = f.mul(&g).partial_derivative(var);
                assert_eq!(
                    product_rule,
                    f.partial_derivative(var)
                        .mul(&g)
                        .add(&f.mul(&g.partial_derivative(var)))
                );
            }
        }
    }

    #[test]
    fn eval_mod_reduces_exactly() {
        let f = x2_plus_x_plus_2();
        let at = |v: u32, k: u32| f.eval_mod2k(&[BigUint::from(v)], k);
        assert_eq!(at(0, 1), BigUint::zero());
        assert_eq!(at(1, 2), BigUint::zero());
        assert_eq!(at(3, 4), BigUint::from(14u32));
    }

    #[test]
    fn substitution_and_restriction() {
        // f = x y + z^2, set z = 3: x y + 9
        let f = IntPolynomial::from_terms(3, &[(&[1, 1, 0], 1), (&[0, 0, 2], 1)]);
        let g = f.substitute(2, &BigInt::from(3));
        assert_eq!(
            g,
            IntPolynomial::from_terms(3, &[(&[1, 1, 0], 1), (&[0, 0, 0], 9)])
        );
        let h = g.restrict(&[0, 1]);
        assert_eq!(
            h,
            IntPolynomial::from_terms(2, &[(&[1, 1], 1), (&[0, 0], 9)])
        );
    }

    #[test]
    fn univariate_round_trip() {
        let coeffs: Vec<BigInt> = [2, 1, 1].iter().map(|&c| BigInt::from(c)).collect();
        let f = IntPolynomial::univariate(&coeffs);
        assert_eq!(f, x2_plus_x_plus_2());
        assert_eq!(f.univariate_coeffs(), coeffs);
    }

    #[test]
    #[should_panic(expected = "at most as many equations")]
    fn overdetermined_system_is_rejected() {
        let f = IntPolynomial::variable(1, 0);
        let _ = PolySystem::new(vec![f.clone(), f]);
    }
}
