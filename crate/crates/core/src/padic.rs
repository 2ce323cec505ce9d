//! Truncated p-adic integers: residues modulo `p^N` with explicit precision.
//!
//! A value is a triple `(p, N, residue)` with `residue < p^N`. Only the first
//! `N` digits of the underlying p-adic expansion are known, so two values can
//! be compared only at the minimum of their precisions, and a zero residue
//! means "indistinguishable from 0 at this precision", not exact zero.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PadicError {
    /// Inversion was requested for a value divisible by p.
    #[error("residue is divisible by {prime} and has no inverse modulo {prime}^{precision}")]
    NonUnit { prime: u32, precision: u32 },
    /// A digit string failed to parse.
    #[error("malformed digit string: {0}")]
    MalformedDigitString(String),
}

/// A p-adic integer known modulo `p^N`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TruncatedPadic {
    prime: u32,
    precision: u32,
    residue: BigUint,
}

/// The p-adic norm of a truncated value: `|a|_p = p^(-exponent)`.
///
/// `at_precision_floor` marks the zero residue, where only the bound
/// `|a|_p <= p^(-N)` is known; the expansion has no visible nonzero digit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PadicNorm {
    pub exponent: u32,
    pub at_precision_floor: bool,
}

impl fmt::Display for PadicNorm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.at_precision_floor {
            write!(f, "<= p^-{}", self.exponent)
        } else {
            write!(f, "p^-{}", self.exponent)
        }
    }
}

impl TruncatedPadic {
    /// Builds a value from a raw residue, reducing it modulo `p^N`.
    ///
    /// # Panics
    ///
    /// Panics if `prime < 2` or `precision == 0`.
    pub fn new(prime: u32, precision: u32, residue: BigUint) -> Self {
        assert!(prime >= 2, "prime must be at least 2");
        assert!(precision >= 1, "precision must be at least 1 digit");
        let modulus = modulus_of(prime, precision);
        Self {
            prime,
            precision,
            residue: residue % &modulus,
        }
    }

    /// Embeds a signed integer, reducing it into `[0, p^N)`.
    pub fn from_integer(n: i64, prime: u32, precision: u32) -> Self {
        Self::from_bigint(&BigInt::from(n), prime, precision)
    }

    /// Embeds an arbitrary-size signed integer, reducing it into `[0, p^N)`.
    pub fn from_bigint(n: &BigInt, prime: u32, precision: u32) -> Self {
        assert!(prime >= 2, "prime must be at least 2");
        assert!(precision >= 1, "precision must be at least 1 digit");
        let modulus = BigInt::from(modulus_of(prime, precision));
        let reduced = n.mod_floor(&modulus);
        let residue = reduced.to_biguint().expect("mod_floor is nonnegative");
        Self {
            prime,
            precision,
            residue,
        }
    }

    /// Reconstructs a value from its digit expansion, least-significant first.
    ///
    /// # Panics
    ///
    /// Panics if a digit is out of `[0, p)` or the digit list is empty.
    pub fn from_digits(prime: u32, digits: &[u32]) -> Self {
        assert!(!digits.is_empty(), "need at least one digit");
        let mut residue = BigUint::zero();
        let p = BigUint::from(prime);
        for &d in digits.iter().rev() {
            assert!(d < prime, "digit {d} out of range for prime {prime}");
            residue = residue * &p + BigUint::from(d);
        }
        Self::new(prime, digits.len() as u32, residue)
    }

    pub fn zero(prime: u32, precision: u32) -> Self {
        Self::new(prime, precision, BigUint::zero())
    }

    pub fn one(prime: u32, precision: u32) -> Self {
        Self::new(prime, precision, BigUint::one())
    }

    pub fn prime(&self) -> u32 {
        self.prime
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn residue(&self) -> &BigUint {
        &self.residue
    }

    /// The modulus `p^N` this residue lives under.
    pub fn modulus(&self) -> BigUint {
        modulus_of(self.prime, self.precision)
    }

    /// Signed integer view of the residue (always nonnegative here).
    pub fn to_bigint(&self) -> BigInt {
        BigInt::from(self.residue.clone())
    }

    fn check_compatible(&self, rhs: &Self) {
        assert_eq!(
            self.prime, rhs.prime,
            "prime mismatch: {} vs {}",
            self.prime, rhs.prime
        );
    }

    /// Ring addition at the minimum of the two precisions.
    ///
    /// # Panics
    ///
    /// Panics on prime mismatch.
    pub fn add(&self, rhs: &Self) -> Self {
        self.check_compatible(rhs);
        let precision = self.precision.min(rhs.precision);
        Self::new(self.prime, precision, &self.residue + &rhs.residue)
    }

    /// Ring subtraction at the minimum of the two precisions.
    ///
    /// # Panics
    ///
    /// Panics on prime mismatch.
    pub fn sub(&self, rhs: &Self) -> Self {
        self.check_compatible(rhs);
        let precision = self.precision.min(rhs.precision);
        let modulus = modulus_of(self.prime, precision);
        let a = &self.residue % &modulus;
        let b = &rhs.residue % &modulus;
        let diff = if a >= b { a - b } else { &modulus + a - b };
        Self::new(self.prime, precision, diff)
    }

    /// Ring multiplication at the minimum of the two precisions.
    ///
    /// # Panics
    ///
    /// Panics on prime mismatch.
    pub fn mul(&self, rhs: &Self) -> Self {
        self.check_compatible(rhs);
        let precision = self.precision.min(rhs.precision);
        Self::new(self.prime, precision, &self.residue * &rhs.residue)
    }

    /// Additive inverse.
    pub fn neg(&self) -> Self {
        if self.residue.is_zero() {
            return self.clone();
        }
        let modulus = self.modulus();
        Self {
            prime: self.prime,
            precision: self.precision,
            residue: modulus - &self.residue,
        }
    }

    /// Multiplication by a small scalar.
    pub fn scale(&self, k: i64) -> Self {
        let factor = Self::from_integer(k, self.prime, self.precision);
        self.mul(&factor)
    }

    /// The valuation: largest `k <= N` with `p^k` dividing the residue.
    ///
    /// The zero residue reports exponent `N` with `at_precision_floor` set;
    /// only finitely many digits are known, so "infinite valuation" is never
    /// claimed.
    pub fn valuation(&self) -> PadicNorm {
        if self.residue.is_zero() {
            return PadicNorm {
                exponent: self.precision,
                at_precision_floor: true,
            };
        }
        let p = BigUint::from(self.prime);
        let mut exponent = 0;
        let mut rest = self.residue.clone();
        while (&rest % &p).is_zero() {
            rest /= &p;
            exponent += 1;
        }
        PadicNorm {
            exponent,
            at_precision_floor: false,
        }
    }

    /// Whether the value is a unit of `Z/p^N` (valuation zero).
    pub fn is_unit(&self) -> bool {
        !(&self.residue % BigUint::from(self.prime)).is_zero()
    }

    /// Multiplicative inverse modulo `p^N`.
    ///
    /// Computed as `a^(phi(p^N) - 1)` with `phi(p^N) = p^(N-1)(p-1)`.
    pub fn invert_unit(&self) -> Result<Self, PadicError> {
        if !self.is_unit() {
            return Err(PadicError::NonUnit {
                prime: self.prime,
                precision: self.precision,
            });
        }
        let p = BigUint::from(self.prime);
        let phi = p.pow(self.precision - 1) * (&p - BigUint::one());
        let inverse = self
            .residue
            .modpow(&(phi - BigUint::one()), &self.modulus());
        Ok(Self {
            prime: self.prime,
            precision: self.precision,
            residue: inverse,
        })
    }

    /// The `N` digits of the expansion, least-significant first.
    pub fn digits(&self) -> Vec<u32> {
        let p = BigUint::from(self.prime);
        let mut digits = Vec::with_capacity(self.precision as usize);
        let mut rest = self.residue.clone();
        for _ in 0..self.precision {
            let (q, r) = rest.div_rem(&p);
            digits.push(r.to_u32().expect("digit fits in u32"));
            rest = q;
        }
        digits
    }

    /// Drops digits beyond position `k`, reducing the precision.
    ///
    /// # Panics
    ///
    /// Panics unless `1 <= k <= N`.
    pub fn truncate(&self, k: u32) -> Self {
        assert!(k >= 1 && k <= self.precision, "invalid truncation target");
        Self::new(self.prime, k, self.residue.clone())
    }

    /// Equality at the minimum of the two precisions.
    pub fn congruent(&self, rhs: &Self) -> bool {
        if self.prime != rhs.prime {
            return false;
        }
        let k = self.precision.min(rhs.precision);
        let modulus = modulus_of(self.prime, k);
        &self.residue % &modulus == &rhs.residue % &modulus
    }

    /// Serializes as `p:N:` followed by the digit characters, least
    /// significant first (e.g. residue 12 at p=2, N=8 is `2:8:00110000`).
    pub fn to_digit_string(&self) -> String {
        let digits: String = self
            .digits()
            .iter()
            .map(|&d| char::from_digit(d, 36).expect("digit below 36"))
            .collect();
        format!("{}:{}:{}", self.prime, self.precision, digits)
    }
}

impl fmt::Display for TruncatedPadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_digit_string())
    }
}

impl FromStr for TruncatedPadic {
    type Err = PadicError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let malformed = || PadicError::MalformedDigitString(s.to_string());
        let mut parts = s.splitn(3, ':');
        let prime: u32 = parts
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(malformed)?;
        let precision: u32 = parts
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(malformed)?;
        let digit_chars = parts.next().ok_or_else(malformed)?;
        if prime < 2 || precision == 0 || digit_chars.chars().count() != precision as usize {
            return Err(malformed());
        }
        let mut digits = Vec::with_capacity(precision as usize);
        for c in digit_chars.chars() {
            let d = c
                .to_digit(36)
                .filter(|&d| d < prime)
                .ok_or_else(malformed)?;
            digits.push(d);
        }
        Ok(Self::from_digits(prime, &digits))
    }
}

/// `p^N` as a big integer.
pub fn modulus_of(prime: u32, precision: u32) -> BigUint {
    if prime == 2 {
        BigUint::one() << precision
    } else {
        BigUint::from(prime).pow(precision)
    }
}
