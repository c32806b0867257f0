use addbasis_core::group::{generates, GroupSpec};
use addbasis_core::oracle;
use addbasis_core::random::{random_element, random_generating_multiset, random_subset};
use addbasis_core::sumsets::{
    basis_threshold, growth_trace, is_additive_basis, star_sumset_trace, subset_sum_set, sumset,
};
use addbasis_core::{ElementMultiset, ElementSet};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn group_strategy(max_order: u64) -> impl Strategy<Value = GroupSpec> {
    prop::collection::vec(2u64..=12, 1..=3)
        .prop_filter("order bound", move |m| m.iter().product::<u64>() <= max_order)
        .prop_map(|m| GroupSpec::new(&m).unwrap())
}

fn multiset(g: &GroupSpec, n: usize, rng: &mut ChaCha8Rng) -> ElementMultiset {
    let coords: Vec<Vec<i64>> = (0..n).map(|_| random_element(g, rng)).collect();
    ElementMultiset::from_coords(g, &coords).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn addition_laws(g in group_strategy(100), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = g.element(&random_element(&g, &mut rng)).unwrap();
        let b = g.element(&random_element(&g, &mut rng)).unwrap();
        let c = g.element(&random_element(&g, &mut rng)).unwrap();
        let ab_c = g.add(&g.add(&a, &b).unwrap(), &c).unwrap();
        let a_bc = g.add(&a, &g.add(&b, &c).unwrap()).unwrap();
        prop_assert_eq!(ab_c, a_bc);
        prop_assert_eq!(g.add(&a, &b).unwrap(), g.add(&b, &a).unwrap());
        prop_assert!(g.add(&g.neg(&a).unwrap(), &a).unwrap().is_zero());
    }

    #[test]
    fn exponent_kills_everything(g in group_strategy(100)) {
        for i in 0..g.order() {
            let x = g.element_at(i).unwrap();
            prop_assert!(g.scale(g.exponent() as i64, &x).unwrap().is_zero());
        }
        // |G| <= m^r
        prop_assert!((g.order() as f64) <= (g.exponent() as f64).powi(g.rank() as i32) + 0.5);
    }

    #[test]
    fn generation_is_monotone(g in group_strategy(100), seed in any::<u64>(), n in 0usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let b = multiset(&g, n, &mut rng);
        let mut bigger = b.clone();
        bigger.push(g.element(&random_element(&g, &mut rng)).unwrap()).unwrap();
        if generates(&b).unwrap() {
            prop_assert!(generates(&bigger).unwrap());
        }
    }

    #[test]
    fn subset_sums_contain_zero_and_items(g in group_strategy(100), seed in any::<u64>(), n in 0usize..10) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let b = multiset(&g, n, &mut rng);
        let star = subset_sum_set(&b).unwrap();
        prop_assert!(star.contains(&g.zero()));
        for x in b.items() {
            prop_assert!(star.contains(x));
        }
        if generates(&b).unwrap() {
            prop_assert!(star.len() as u64 >= 1 << g.rank());
        }
    }

    #[test]
    fn subset_sums_match_enumeration(g in group_strategy(144), seed in any::<u64>(), n in 0usize..=16) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let b = multiset(&g, n, &mut rng);
        let fast: std::collections::HashSet<Vec<u64>> =
            subset_sum_set(&b).unwrap().elements().map(|e| e.residues().to_vec()).collect();
        let items: Vec<Vec<u64>> = b.items().iter().map(|e| e.residues().to_vec()).collect();
        prop_assert_eq!(fast, oracle::subset_sums(&g, &items));
    }

    #[test]
    fn union_is_sumset_of_stars(g in group_strategy(100), seed in any::<u64>(), n1 in 0usize..6, n2 in 0usize..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let b1 = multiset(&g, n1, &mut rng);
        let b2 = multiset(&g, n2, &mut rng);
        let lhs = subset_sum_set(&b1.union(&b2).unwrap()).unwrap();
        let rhs = sumset(&subset_sum_set(&b1).unwrap(), &subset_sum_set(&b2).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn basis_property_is_monotone(g in group_strategy(100), seed in any::<u64>(), k in 1usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut bs: Vec<ElementMultiset> = (0..k).map(|_| multiset(&g, 2, &mut rng)).collect();
        let before = is_additive_basis(&bs).unwrap();
        bs.push(multiset(&g, 3, &mut rng));
        if before {
            prop_assert!(is_additive_basis(&bs).unwrap());
        }
        let (_, sizes) = star_sumset_trace(&bs).unwrap();
        prop_assert!(sizes.windows(2).all(|w| w[0] <= w[1]));
        prop_assert!(sizes.iter().all(|&s| s as u64 <= g.order()));
    }

    #[test]
    fn threshold_many_generating_sets_cover(g in group_strategy(64), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let k = basis_threshold(&g) as usize;
        let bs: Vec<ElementMultiset> =
            (0..k).map(|_| random_generating_multiset(&g, 1, &mut rng).unwrap()).collect();
        prop_assert!(is_additive_basis(&bs).unwrap());
        if g.exponent() >= 3 {
            let trace = growth_trace(&bs).unwrap();
            prop_assert!(trace.per_step_ok.iter().all(|&ok| ok), "{:?}", trace);
        }
    }

    #[test]
    fn sumset_is_commutative(g in group_strategy(100), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_subset(&g, 0.3, &mut rng).unwrap();
        let b = random_subset(&g, 0.3, &mut rng).unwrap();
        let ab = sumset(&a, &b).unwrap();
        prop_assert_eq!(&ab, &sumset(&b, &a).unwrap());
        prop_assert!(ab.len() >= a.len().max(b.len()));
        let zero = ElementSet::singleton_zero(&g).unwrap();
        prop_assert_eq!(sumset(&a, &zero).unwrap(), a);
    }
}
