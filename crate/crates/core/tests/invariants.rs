use proptest::prelude::*;
use triality_core::orbit::{orbit_enumerate, OrbitOptions};
use triality_core::structure::DEFAULT_CAP;
use triality_core::{
    BsgsChain, BsgsOptions, ElementTable, FieldMatrix, GeneratorSet, GroupElement, PermAction, Permutation,
    VectorAction,
};

fn permutation(n: usize) -> impl Strategy<Value = Permutation> {
    Just((0..n).collect::<Vec<usize>>()).prop_shuffle().prop_map(|v| Permutation::from_images(&v).unwrap())
}

fn invertible(p: u8, n: usize) -> impl Strategy<Value = FieldMatrix> {
    prop::collection::vec(0..p as i64, n * n)
        .prop_map(move |e| FieldMatrix::from_fn(p, n, |i, j| e[i * n + j]).unwrap())
        .prop_filter("invertible", move |m| m.rank() == n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn permutation_group_laws(a in permutation(9), b in permutation(9), c in permutation(9)) {
        prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
        prop_assert!(a.mul(&a.inv()).is_identity());
        prop_assert_eq!(a.mul(&b).inv(), b.inv().mul(&a.inv()));
        prop_assert!(GroupElement::pow(&a, a.order() as i64).is_identity());
        prop_assert_eq!(a.canonical_key() == b.canonical_key(), a == b);
    }

    #[test]
    fn matrix_group_laws(a in invertible(3, 3), b in invertible(3, 3), c in invertible(3, 3)) {
        prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
        prop_assert!(a.mul(&a.inv()).is_identity());
        prop_assert_eq!(a.mul(&b).inv(), b.inv().mul(&a.inv()));
    }

    #[test]
    fn chain_agrees_with_enumeration_on_s7(a in permutation(7), b in permutation(7), probes in prop::collection::vec(permutation(7), 20)) {
        let gens = GeneratorSet::unlabelled(vec![a, b]).unwrap();
        let chain = BsgsChain::build(&gens, PermAction, &BsgsOptions::seeded(3)).unwrap();
        let table = ElementTable::enumerate(&gens, DEFAULT_CAP).unwrap();
        prop_assert_eq!(chain.order().unwrap(), table.order() as u128);
        prop_assert!(chain.check_invariants());
        let members: std::collections::HashSet<_> = table.elements().iter().map(GroupElement::canonical_key).collect();
        for g in probes {
            prop_assert_eq!(chain.contains(&g).unwrap(), members.contains(&g.canonical_key()));
        }
        for g in table.elements().iter().take(50) {
            let back = chain.element_from_base_image(&chain.base_image(g));
            prop_assert_eq!(back.as_ref(), Some(g));
        }
    }

    #[test]
    fn chain_agrees_with_enumeration_on_small_gl(a in invertible(2, 3), b in invertible(2, 3), c in invertible(3, 2), d in invertible(3, 2)) {
        for (gens, gl) in [(vec![a, b], 168), (vec![c, d], 48)] {
            let gens = GeneratorSet::unlabelled(gens).unwrap();
            let chain = BsgsChain::build(&gens, VectorAction::new(), &BsgsOptions::seeded(5)).unwrap();
            let table = ElementTable::enumerate(&gens, DEFAULT_CAP).unwrap();
            prop_assert_eq!(chain.order().unwrap(), table.order() as u128);
            prop_assert_eq!(gl % table.order(), 0);
        }
    }

    #[test]
    fn orbit_stabilizer_holds(a in permutation(7), b in permutation(7), point in 0u32..7) {
        let gens = GeneratorSet::unlabelled(vec![a, b]).unwrap();
        let table = ElementTable::enumerate(&gens, DEFAULT_CAP).unwrap();
        let order = table.order();
        let orbit = orbit_enumerate(point, &gens, &PermAction, &OrbitOptions::default()).unwrap();
        let stabilizer = table.elements().iter().filter(|g| g.image(point as usize) == point as usize).count();
        prop_assert_eq!(orbit.size() * stabilizer, order);
    }

    #[test]
    fn known_order_and_deterministic_certificates_agree(a in permutation(8), b in permutation(8), seed in any::<u64>()) {
        let gens = GeneratorSet::unlabelled(vec![a, b]).unwrap();
        let exact = BsgsChain::build(&gens, PermAction, &BsgsOptions::seeded(seed)).unwrap().order().unwrap();
        let known = BsgsChain::build(&gens, PermAction, &BsgsOptions::known_order(seed, exact)).unwrap();
        prop_assert_eq!(known.order().unwrap(), exact);
    }
}
