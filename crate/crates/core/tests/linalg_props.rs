use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

use ncpb_core::linalg::Matrix;
use ncpb_core::{Field, Rational};

fn matrix(n: usize) -> impl Strategy<Value = Matrix<Rational>> {
    prop::collection::vec(-4i64..=4, n * n).prop_map(move |v| {
        let rows = v.chunks(n).map(|r| r.iter().map(|&x| BigRational::from_integer(BigInt::from(x))).collect()).collect();
        Matrix::from_rows(rows).unwrap()
    })
}

proptest! {
    #[test]
    fn det_is_multiplicative(a in matrix(3), b in matrix(3)) {
        let ab = a.mul(&b).unwrap();
        prop_assert_eq!(ab.det().unwrap(), a.det().unwrap() * &b.det().unwrap());
    }

    #[test]
    fn inverse_exists_iff_det_nonzero(a in matrix(3)) {
        let det = a.det().unwrap();
        match a.inverse().unwrap() {
            Some(inv) => {
                prop_assert!(det != Rational::from_int(0));
                prop_assert!(a.mul(&inv).unwrap().is_identity());
            }
            None => prop_assert_eq!(det, Rational::from_int(0)),
        }
    }

    #[test]
    fn rank_nullity(a in matrix(4)) {
        let null = a.nullspace();
        prop_assert_eq!(a.rank() + null.len(), 4);
        for v in &null {
            prop_assert!(a.mul_vec(v).iter().all(|x| *x == Rational::from_int(0)));
        }
    }

    #[test]
    fn solve_recovers_a_solution(a in matrix(3), x in prop::collection::vec(-3i64..=3, 3)) {
        let x: Vec<Rational> = x.into_iter().map(Rational::from_int).collect();
        let b = a.mul_vec(&x);
        let y = a.solve(&b).expect("consistent system");
        prop_assert_eq!(a.mul_vec(&y), b);
    }
}
