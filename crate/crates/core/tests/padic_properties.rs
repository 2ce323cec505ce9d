//! Property tests for the truncated p-adic ring and the encoding maps.

use dyadic_core::encoding::{decode_coord, encode_coord, iota, DyadicRational};
use dyadic_core::TruncatedPadic;
use num_bigint::BigUint;
use proptest::prelude::*;

fn value(prime: u32, precision: u32) -> impl Strategy<Value = TruncatedPadic> {
    (0u64..u64::MAX).prop_map(move |r| TruncatedPadic::new(prime, precision, BigUint::from(r)))
}

fn small_prime() -> impl Strategy<Value = u32> {
    prop_oneof![Just(2u32), Just(3), Just(5), Just(7)]
}

proptest! {
    #[test]
    fn ring_axioms_hold_at_matching_precision(
        (p, k, seeds) in small_prime().prop_flat_map(|p| {
            (Just(p), 1u32..24).prop_flat_map(move |(p, k)| {
                (Just(p), Just(k), prop::array::uniform3(0u64..u64::MAX))
            })
        })
    ) {
        let [a, b, c] = seeds.map(|s| TruncatedPadic::new(p, k, BigUint::from(s)));
        prop_assert_eq!(a.add(&b).add(&c), a.add(&b.add(&c)));
        prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
        prop_assert_eq!(a.add(&b), b.add(&a));
        prop_assert_eq!(a.mul(&b), b.mul(&a));
        prop_assert_eq!(a.sub(&a), TruncatedPadic::zero(p, k));
    }

    #[test]
    fn ultrametric_inequality(
        (a, b) in small_prime().prop_flat_map(|p| (value(p, 16), value(p, 16)))
    ) {
        let sum = a.add(&b);
        let va = a.valuation().exponent;
        let vb = b.valuation().exponent;
        prop_assert!(sum.valuation().exponent >= va.min(vb));
    }

    #[test]
    fn unit_inversion_is_an_involution(a in value(2, 20)) {
        if a.is_unit() {
            let inv = a.invert_unit().unwrap();
            prop_assert_eq!(a.mul(&inv), TruncatedPadic::one(2, 20));
            prop_assert_eq!(inv.invert_unit().unwrap(), a);
        }
    }

    #[test]
    fn digits_round_trip(
        a in small_prime().prop_flat_map(|p| value(p, 12))
    ) {
        let digits = a.digits();
        prop_assert_eq!(digits.len(), 12);
        prop_assert_eq!(TruncatedPadic::from_digits(a.prime(), &digits), a);
    }

    #[test]
    fn truncation_commutes_with_arithmetic(
        (a, b, k) in small_prime().prop_flat_map(|p| {
            (value(p, 20), value(p, 20), 1u32..20)
        })
    ) {
        prop_assert_eq!(a.add(&b).truncate(k), a.truncate(k).add(&b.truncate(k)));
        prop_assert_eq!(a.mul(&b).truncate(k), a.truncate(k).mul(&b.truncate(k)));
        prop_assert_eq!(a.sub(&b).truncate(k), a.truncate(k).sub(&b.truncate(k)));
        prop_assert_eq!(a.neg().truncate(k), a.truncate(k).neg());
    }

    #[test]
    fn digit_string_parses_back(a in small_prime().prop_flat_map(|p| value(p, 16))) {
        let s = a.to_digit_string();
        prop_assert_eq!(s.parse::<TruncatedPadic>().unwrap(), a);
    }

    #[test]
    fn encoding_bijective_and_iota_contracts(
        (m, x, y) in (2u32..=10).prop_flat_map(|m| {
            (Just(m), 0..1u64 << m, 0..1u64 << m)
        })
    ) {
        let rx = encode_coord(x, m).unwrap();
        prop_assert_eq!(decode_coord(&rx, m), x);
        if x != y {
            let ry = encode_coord(y, m).unwrap();
            let diff = rx.sub(&ry);
            let ell = diff.valuation().exponent;
            // |r - s|_2 < 2^(-l) for all l < ell, so the images must be
            // closer than 2^(-l); checking the tightest l suffices
            if ell >= 1 {
                let bound = DyadicRational::pow2_neg(ell - 1);
                prop_assert!(iota(&rx).abs_diff(&iota(&ry)) < bound);
            }
        }
    }
}
