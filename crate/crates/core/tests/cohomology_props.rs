use proptest::prelude::*;

use ncpb_core::cohomology::{
    class_is_trivial, coboundary, h2_bruteforce, h2_snf, h2_trivial_structural, h2_twisted_structural, is_cocycle,
    Cochain, CoeffModule, DEFAULT_BUDGET,
};
use ncpb_core::FinAbGroup;

fn setting() -> impl Strategy<Value = (FinAbGroup, u64)> {
    (prop::sample::select(vec![vec![2u64], vec![3], vec![4], vec![2, 2], vec![6]]), 2u64..=6)
        .prop_map(|(o, m)| (FinAbGroup::new(o).unwrap(), m))
}

fn cochain(degree: usize) -> impl Strategy<Value = Cochain> {
    setting().prop_flat_map(move |(g, m)| {
        let size = g.order().pow(degree as u32);
        prop::collection::vec(0..m as usize, size).prop_map(move |vals| {
            Cochain::from_fn_normalizing(degree, &g, &CoeffModule::mu(m).unwrap(), |a| {
                let n = g.order();
                vals[a.iter().fold(0, |acc, &x| acc * n + x)]
            })
            .unwrap()
        })
    })
}

proptest! {
    #[test]
    fn d_squared_vanishes_in_degree_one(h in cochain(1)) {
        let dd = coboundary(&coboundary(&h).unwrap()).unwrap();
        prop_assert!(dd.is_trivial());
    }

    #[test]
    fn d_squared_vanishes_in_degree_two(w in cochain(2)) {
        let dd = coboundary(&coboundary(&w).unwrap()).unwrap();
        prop_assert!(dd.is_trivial());
    }

    #[test]
    fn coboundaries_are_trivial_classes(h in cochain(1)) {
        let w = coboundary(&h).unwrap();
        prop_assert!(is_cocycle(&w).unwrap().ok);
        let t = class_is_trivial(&w, DEFAULT_BUDGET).unwrap().expect("coboundary is trivial");
        prop_assert_eq!(coboundary(&t).unwrap(), w);
    }

    #[test]
    fn cocycle_test_agrees_with_d(w in cochain(2)) {
        prop_assert_eq!(is_cocycle(&w).unwrap().ok, coboundary(&w).unwrap().is_trivial());
    }
}

#[test]
fn cyclic_h2_is_gcd() {
    for n in 1..=6u64 {
        for m in 1..=6u64 {
            let g = FinAbGroup::cyclic(n);
            let module = CoeffModule::mu(m).unwrap();
            let d = num_integer::gcd(n, m);
            let expect: Vec<u64> = if d > 1 { vec![d] } else { vec![] };
            assert_eq!(h2_bruteforce(&g, &module, DEFAULT_BUDGET).unwrap().factors, expect, "C_{n}, μ_{m}");
            assert_eq!(h2_snf(&g, &module).unwrap().factors, expect);
            assert_eq!(h2_twisted_structural(n, &module).unwrap().factors, expect);
        }
    }
}

#[test]
fn brute_force_counts_are_consistent() {
    // |H²| = |Z²| / |B²| and |B²| = |C¹| / |Z¹| with |Z¹| = |Hom(G, μ_m)|
    for (o, m) in [(vec![2u64, 2], 2u64), (vec![4], 2), (vec![2, 2], 4), (vec![3], 3)] {
        let g = FinAbGroup::new(o.clone()).unwrap();
        let module = CoeffModule::mu(m).unwrap();
        let r = h2_bruteforce(&g, &module, DEFAULT_BUDGET).unwrap();
        let (z, b) = (r.cocycles.unwrap(), r.coboundaries.unwrap());
        assert_eq!(z / b, r.order(), "{o:?}");
        let hom: u128 = o.iter().map(|&n| num_integer::gcd(n, m) as u128).product();
        let c1 = (m as u128).pow(g.order() as u32 - 1);
        assert_eq!(b, c1 / hom, "{o:?}");
        assert_eq!(r.factors, h2_trivial_structural(&g, &module).unwrap().factors);
    }
}

#[test]
fn twisted_module_by_inversion() {
    // C_2 acting on μ_m by inversion: H² = μ_m^{C_2} / N μ_m = μ_m[2] / {x x⁻¹} = μ_m[2]
    for m in 2..=6u64 {
        let module = CoeffModule::mu(m).unwrap().with_action(vec![vec![vec![-1]]]);
        let expect: Vec<u64> = if m % 2 == 0 { vec![2] } else { vec![] };
        assert_eq!(h2_twisted_structural(2, &module).unwrap().factors, expect, "μ_{m}");
        assert_eq!(h2_bruteforce(&FinAbGroup::cyclic(2), &module, DEFAULT_BUDGET).unwrap().factors, expect);
    }
}
