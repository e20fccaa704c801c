use std::collections::BTreeSet;

use proptest::prelude::*;

use ncpb_core::{FinAbGroup, GroupElement};

fn group() -> impl Strategy<Value = FinAbGroup> {
    prop::collection::vec(1u64..=6, 1..=3).prop_map(|o| FinAbGroup::new(o).unwrap())
}

fn element(g: &FinAbGroup) -> impl Strategy<Value = GroupElement> {
    let g = g.clone();
    (0..g.order()).prop_map(move |i| g.element_at(i))
}

proptest! {
    #[test]
    fn pairing_is_bimultiplicative((g, a, b, c) in group().prop_flat_map(|g| {
        let (a, b, c) = (element(&g), element(&g), element(&g));
        (Just(g), a, b, c)
    })) {
        let chi = a.as_character();
        let lhs = g.pairing(&chi, &g.add(&b, &c)).unwrap();
        let rhs = g.pairing(&chi, &b).unwrap().combine(&g.pairing(&chi, &c).unwrap());
        prop_assert_eq!(lhs, rhs);
        let psi = b.as_character();
        let sum = g.add(&a, &b).as_character();
        prop_assert_eq!(
            g.pairing(&sum, &c).unwrap(),
            g.pairing(&chi, &c).unwrap().combine(&g.pairing(&psi, &c).unwrap())
        );
        prop_assert_eq!(g.pairing(&chi, &b).unwrap(), g.pairing(&psi, &a).unwrap());
    }

    #[test]
    fn quotient_matches_coset_enumeration((g, gens) in group().prop_flat_map(|g| {
        let gens = prop::collection::vec(element(&g), 0..=2);
        (Just(g), gens)
    })) {
        let h = g.subgroup_closure(&gens).unwrap();
        let mut cosets = BTreeSet::new();
        for x in g.elements() {
            let coset: BTreeSet<usize> = h.elements.iter().map(|y| g.index_of(&g.add(&x, y))).collect();
            cosets.insert(coset);
        }
        let q = g.quotient_invariants(&h).unwrap();
        prop_assert_eq!(q.iter().product::<u64>() as usize, cosets.len());
        prop_assert!(q.windows(2).all(|w| w[1] % w[0] == 0));
        let exp = q.last().copied().unwrap_or(1);
        // the quotient exponent is the largest coset order
        let max_order = g.elements().iter().map(|x| {
            (1..=g.order() as i64).find(|&k| h.contains(&g.scale(x, k))).unwrap() as u64
        }).max().unwrap();
        prop_assert_eq!(exp, max_order);
    }

    #[test]
    fn characters_separate_points((g, a) in group().prop_flat_map(|g| { let e = element(&g); (Just(g), e) })) {
        let trivial_everywhere = g.characters().iter().all(|c| g.pairing(c, &a).unwrap().is_one());
        prop_assert_eq!(trivial_everywhere, a == g.identity());
    }
}
