use proptest::prelude::*;

use ncpb_core::algebra::{matrix_to_element, verify_algebra, StructureAlgebra};
use ncpb_core::bundle::{dual_system, fourier_decompose};
use ncpb_core::cohomology::{is_cocycle, Cochain};
use ncpb_core::crossed::{build_crossed_product, build_equivalence, extract_characteristic_class, GradedSection};
use ncpb_core::factor::{validate_factor_system, FactorSystem, UnitCochain};
use ncpb_core::linalg::Matrix;
use ncpb_core::{Cyclo, FinAbGroup};

fn base() -> impl Strategy<Value = StructureAlgebra<Cyclo>> {
    prop::sample::select(vec![0usize, 1, 2, 3]).prop_map(|k| match k {
        0 => StructureAlgebra::matrix_algebra(1).unwrap(),
        1 => StructureAlgebra::matrix_algebra(2).unwrap(),
        2 => StructureAlgebra::function_algebra(2).unwrap(),
        _ => StructureAlgebra::group_algebra(&FinAbGroup::cyclic(2)),
    })
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Bimultiplicative `μ_N`-valued cocycle with random exponents.
fn bimultiplicative() -> impl Strategy<Value = Cochain> {
    prop::sample::select(vec![vec![2u64], vec![3], vec![2, 2], vec![2, 3]]).prop_flat_map(|orders| {
        let r = orders.len();
        prop::collection::vec(0i64..6, r * r).prop_map(move |a| {
            let g = FinAbGroup::new(orders.clone()).unwrap();
            let n = orders.iter().fold(1, |l, &o| l / gcd(l, o) * o);
            let o = orders.clone();
            Cochain::from_exponents(2, &g, n, |x| {
                let mut e = 0i64;
                for i in 0..r {
                    for j in 0..r {
                        let w = (n / gcd(o[i], o[j])) as i64;
                        e += a[i * r + j] * w * (x[0].residues[i] * x[1].residues[j]) as i64;
                    }
                }
                e
            })
            .unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn builders_satisfy_axioms(a in base(), b in base()) {
        prop_assert!(verify_algebra(&a).ok());
        prop_assert!(verify_algebra(&StructureAlgebra::direct_sum(&a, &b)).ok());
        prop_assert!(verify_algebra(&StructureAlgebra::tensor(&a, &b)).ok());
    }

    #[test]
    fn scalar_twists_give_associative_crossed_products(c in bimultiplicative(), b in base()) {
        prop_assert!(is_cocycle(&c).unwrap().ok);
        let fs = FactorSystem::scalar(&c.group, &b, &c).unwrap();
        prop_assert!(validate_factor_system(&fs).ok());
        let a = build_crossed_product(&fs).unwrap();
        prop_assert_eq!(a.dim(), b.dim() * c.group.order());
        prop_assert!(verify_algebra(&a.algebra).ok());
        let back = extract_characteristic_class(&a, &GradedSection::standard(&a).unwrap()).unwrap();
        prop_assert!(back.same_as(&fs));
    }

    #[test]
    fn unit_cochains_give_graded_isomorphisms(c in bimultiplicative(), t in prop::collection::vec(-3i64..=3, 6)) {
        let b = StructureAlgebra::<Cyclo>::matrix_algebra(2).unwrap();
        let fs = FactorSystem::scalar(&c.group, &b, &c).unwrap();
        let n = c.group.order();
        let values = (0..n)
            .map(|g| {
                if g == 0 {
                    return b.one();
                }
                let mut m = Matrix::<Cyclo>::identity(2);
                m.set(0, 1, Cyclo::from_int(t[g % t.len()]));
                m.set(1, 1, Cyclo::from_int(g as i64 + 1));
                matrix_to_element(&m)
            })
            .collect();
        let h = UnitCochain::new(&c.group, &b, values).unwrap();
        let eq = build_equivalence(&fs, &h).unwrap();
        prop_assert!(eq.map.is_morphism(&eq.source.algebra, &eq.target.algebra));
    }

    #[test]
    fn isotypic_dimensions_sum_to_dimension(c in bimultiplicative(), b in base()) {
        let fs = FactorSystem::scalar(&c.group, &b, &c).unwrap();
        let a = build_crossed_product(&fs).unwrap();
        let dec = fourier_decompose(&dual_system(&a).unwrap()).unwrap();
        prop_assert_eq!(dec.dims().iter().sum::<usize>(), a.dim());
        prop_assert!(dec.dims().iter().all(|&d| d == b.dim()));
    }
}
