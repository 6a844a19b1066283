use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Zero};
use proptest::prelude::*;

use nfs_sieve::arith::{max_exponent, mod_inverse, primes_up_to, valuation};
use nfs_sieve::engine::{sieve_classical, sieve_improved, sieve_trivial};
use nfs_sieve::experiments::{compare, lift_event};
use nfs_sieve::oracle::verify_ledgers;
use nfs_sieve::roots::{classify_roots, hensel_lift_simple};
use nfs_sieve::{Polynomial, SievePolynomial};

const SMALL_PRIMES: [u64; 8] = [2, 3, 5, 7, 11, 13, 17, 19];

fn sieve_poly() -> impl Strategy<Value = SievePolynomial> {
    (2usize..=4, 1u64..=12).prop_flat_map(|(d, m)| {
        let c = m as i64;
        proptest::collection::vec(-c..=c, d).prop_map(move |mut coeffs| {
            coeffs.push(1);
            SievePolynomial::from_i64(&coeffs, m).unwrap()
        })
    })
}

proptest! {
    #[test]
    fn valuation_is_exact(n in any::<i64>().prop_filter("nonzero", |n| *n != 0), i in 0usize..8) {
        let l = SMALL_PRIMES[i];
        let big = BigInt::from(n);
        let e = valuation(&big, l).unwrap().get();
        let le = BigInt::from(l).pow(e);
        prop_assert!(big.is_multiple_of(&le));
        prop_assert!(!big.is_multiple_of(&(le * BigInt::from(l))));
    }

    #[test]
    fn inverse_round_trip(x in any::<i64>(), i in 0usize..8, e in 1u32..6) {
        let modulus = BigInt::from(SMALL_PRIMES[i]).pow(e);
        let x = BigInt::from(x);
        match mod_inverse(&x, &modulus) {
            Ok(inv) => prop_assert!((x * inv).mod_floor(&modulus).is_one()),
            Err(_) => prop_assert!(!x.gcd(&modulus).is_one()),
        }
    }

    #[test]
    fn max_exponent_brackets_the_bound(i in 0usize..8, bound in 1u64..u64::MAX / 32) {
        let l = SMALL_PRIMES[i];
        let e = max_exponent(l, &BigUint::from(bound));
        prop_assert!(BigUint::from(l).pow(e) <= BigUint::from(bound));
        prop_assert!(BigUint::from(l).pow(e + 1) > BigUint::from(bound));
    }

    #[test]
    fn norm_form_is_homogenized(f in sieve_poly(), a in -40i64..=40, b in 1i64..=40, t in 1i64..=5) {
        let norm = f.norm_form();
        let d = f.degree() as u32;
        prop_assert_eq!(norm.eval(a, 1), f.poly().eval(&BigInt::from(a)));
        prop_assert_eq!(norm.eval(t * a, t * b), BigInt::from(t).pow(d) * norm.eval(a, b));
    }

    #[test]
    fn region_bounds_cover_every_entry(f in sieve_poly(), u in 1u64..=30) {
        let rational = BigInt::from(f.rational_bound(u));
        let algebraic = BigInt::from(f.algebraic_bound(u));
        let norm = f.norm_form();
        for b in 1..=u as i64 {
            for a in -(u as i64)..=u as i64 {
                prop_assert!(BigInt::from(a - b * f.m() as i64).magnitude() <= rational.magnitude());
                prop_assert!(norm.eval(a, b).magnitude() <= algebraic.magnitude());
            }
        }
    }

    #[test]
    fn modular_evaluation_agrees(f in sieve_poly(), x in -1000i64..1000, q in 1u64..500) {
        let x = BigInt::from(x);
        let q_big = BigInt::from(q);
        prop_assert_eq!(f.poly().eval_mod(&x, &q_big), f.poly().eval(&x).mod_floor(&q_big));
    }

    #[test]
    fn simple_roots_lift(f in sieve_poly(), i in 0usize..8, e in 1u32..8) {
        let l = SMALL_PRIMES[i];
        let q = BigInt::from(l).pow(e);
        for root in classify_roots(f.poly(), l).simple {
            let lift = BigInt::from(hensel_lift_simple(f.poly(), l, root, e).unwrap());
            prop_assert!(f.poly().eval_mod(&lift, &q).is_zero());
            prop_assert_eq!(lift.mod_floor(&BigInt::from(l)), BigInt::from(root));
        }
    }

    #[test]
    fn multiple_root_lifting_is_classwise(f in sieve_poly(), i in 0usize..5) {
        let l = SMALL_PRIMES[i];
        let square = BigInt::from(l * l);
        for root in classify_roots(f.poly(), l).multiple {
            let hits = (0..l)
                .filter(|k| f.poly().eval_mod(&BigInt::from(root + k * l), &square).is_zero())
                .count() as u64;
            prop_assert!(hits == 0 || hits == l);
        }
        let any = classify_roots(f.poly(), l).multiple.iter()
            .any(|&r| f.poly().eval_mod(&BigInt::from(r), &square).is_zero());
        prop_assert_eq!(lift_event(f.poly(), l), any);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn sieves_agree_and_ledgers_match(f in sieve_poly(), u in 1u64..=25, y in 2u64..=30) {
        let run = compare(&f, u, y).unwrap();
        prop_assert!(run.tables_identical());
        prop_assert!(run.residuals_coprime());
        prop_assert!(run.report.identities_hold(), "{:?}", run.report.violations);
        prop_assert!(run.report.strictly_improves());
        prop_assert!(run.report.two_thirds_failures().is_empty());
    }

    #[test]
    fn residuals_are_the_smooth_cofactors(f in sieve_poly(), u in 1u64..=12, y in 2u64..=20) {
        let primes = primes_up_to(y).unwrap();
        let trivial = sieve_trivial(&f, u, y).unwrap();
        let norm = f.norm_form();
        for (b, a, residual) in trivial.table.nonzero_entries() {
            let mut value = BigInt::from(a - b as i64 * f.m() as i64) * norm.eval(a, b as i64);
            for l in primes.iter() {
                let l = BigInt::from(l);
                while value.is_multiple_of(&l) {
                    value /= &l;
                }
            }
            prop_assert_eq!(residual, value);
        }
    }

    #[test]
    fn outcomes_are_deterministic(f in sieve_poly(), u in 1u64..=15, y in 2u64..=20) {
        let a = sieve_improved(&f, u, y).unwrap();
        let b = sieve_improved(&f, u, y).unwrap();
        prop_assert_eq!(&a.table, &b.table);
        prop_assert_eq!(&a.ledger, &b.ledger);
        let two = sieve_classical(&f, u, y).unwrap();
        let report = verify_ledgers(&two, &a, &f, u, y).unwrap();
        prop_assert_eq!(report.totals.classical, two.ledger.grand_total());
    }
}

#[test]
fn polynomial_text_round_trip() {
    let f: Polynomial = "3,-2,0,1".parse().unwrap();
    assert_eq!(f.to_string(), "3,-2,0,1");
    assert!("3,-2,0,2".parse::<Polynomial>().is_err());
}
