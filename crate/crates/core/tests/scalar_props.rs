use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;

use ncpb_core::scalar::{rational_nth_root, totient};
use ncpb_core::{Cyclo, Field, RootOfUnity};

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn cyclo(conductor: u64) -> impl Strategy<Value = Cyclo> {
    let d = totient(conductor) as usize;
    prop::collection::vec((-5i64..=5, 1i64..=3), d)
        .prop_map(move |c| Cyclo::from_coeffs(conductor, &c.iter().map(|&(n, d)| q(n, d)).collect::<Vec<_>>()).unwrap())
}

fn pair() -> impl Strategy<Value = (Cyclo, Cyclo)> {
    (1u64..=12).prop_flat_map(|n| (cyclo(n), cyclo(n)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn inverse_is_two_sided(x in (1u64..=12).prop_flat_map(cyclo)) {
        prop_assume!(!x.is_zero());
        let y = x.inverse().expect("nonzero is invertible");
        prop_assert!((x.clone() * &y).is_one());
        prop_assert!((y * &x).is_one());
    }
}

proptest! {
    #[test]
    fn field_axioms((x, y) in pair(), z in (1u64..=12).prop_flat_map(cyclo)) {
        prop_assert_eq!(x.clone() * &y, y.clone() * &x);
        prop_assert_eq!((x.clone() + &y) * &z, x.clone() * &z + &(y.clone() * &z));
        prop_assert_eq!((x.clone() * &y) * &z, x.clone() * &(y.clone() * &z));
        prop_assert!((x.clone() - &x).is_zero());
    }

    #[test]
    fn lift_is_a_ring_map((x, y) in pair(), k in 1u64..=4) {
        let m = x.conductor() * k;
        prop_assert_eq!((x.clone() + &y).lift(m), x.lift(m) + &y.lift(m));
        prop_assert_eq!((x.clone() * &y).lift(m), x.lift(m) * &y.lift(m));
        prop_assert_eq!(x.lift(m), x.clone());
    }

    #[test]
    fn conjugation_is_an_involutive_automorphism((x, y) in pair()) {
        prop_assert_eq!((x.clone() * &y).conjugate(), x.conjugate() * &y.conjugate());
        prop_assert_eq!((x.clone() + &y).conjugate(), x.conjugate() + &y.conjugate());
        prop_assert_eq!(x.conjugate().conjugate(), x);
    }

    #[test]
    fn roots_of_unity_multiply(n in 1u64..=12, a in -20i64..20, b in -20i64..20) {
        let za = Cyclo::zeta_pow(n, a);
        let zb = Cyclo::zeta_pow(n, b);
        prop_assert_eq!(za.clone() * &zb, Cyclo::zeta_pow(n, a + b));
        prop_assert!(za.pow(n).is_one());
        let r = RootOfUnity::new(a, n);
        prop_assert_eq!(Cyclo::root_of_unity(&r).unwrap(), za.clone());
        prop_assert_eq!(za.as_root_of_unity(), Some(r));
    }

    #[test]
    fn rational_roots(p in 1i64..30, d in 1i64..30, k in 1u32..=4) {
        let base = q(p, d);
        let power = num_traits::pow(base.clone(), k as usize);
        prop_assert_eq!(rational_nth_root(&power, k), Some(base));
    }
}

#[test]
fn zeta_satisfies_its_cyclotomic_polynomial() {
    for n in 1..=12u64 {
        let z = Cyclo::zeta_pow(n, 1);
        let poly = ncpb_core::scalar::cyclotomic_polynomial(n);
        let mut acc = Cyclo::zero();
        let mut p = Cyclo::one();
        for c in &poly {
            acc = acc + &(p.clone() * &Cyclo::from_rational(BigRational::from_integer(c.clone())));
            p = p * &z;
        }
        assert!(acc.is_zero(), "Φ_{n}(ζ_{n}) ≠ 0");
    }
}

#[test]
fn sum_of_primitive_roots_is_mobius() {
    // Σ primitive n-th roots = μ(n)
    let mobius = [1, -1, -1, 0, -1, 1, -1, 0, 0, 1, -1, 0];
    for n in 1..=12u64 {
        let mut s = Cyclo::zero();
        for k in 0..n {
            if num_integer::gcd(k, n) == 1 {
                s = s + &Cyclo::zeta_pow(n, k as i64);
            }
        }
        assert_eq!(s, Cyclo::from_int(mobius[n as usize - 1]), "n = {n}");
    }
}
