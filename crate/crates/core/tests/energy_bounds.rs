use addbasis_core::energy::{
    additive_energy, additive_energy_by_differences, char0_lower_bound, character_sum_lower_bound, charp_lower_bound,
    energy_sumset_lower_bound, rational_le,
};
use addbasis_core::group::GroupSpec;
use addbasis_core::oracle;
use addbasis_core::random::{random_basis_system, random_subset};
use addbasis_core::sumsets::sumset;
use num_rational::BigRational;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn group_strategy(max_order: u64) -> impl Strategy<Value = GroupSpec> {
    prop::collection::vec(2u64..=11, 1..=2)
        .prop_filter("order bound", move |m| m.iter().product::<u64>() <= max_order)
        .prop_map(|m| GroupSpec::new(&m).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn energy_formulas_agree(g in group_strategy(121), seed in any::<u64>(), d in 0.02f64..0.7) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let b = random_subset(&g, d, &mut rng).unwrap();
        let t = additive_energy(&b);
        prop_assert_eq!(t, additive_energy_by_differences(&b));
        let n = b.len() as u128;
        prop_assert!(n * n <= t && t <= n * n * n);
        if b.len() <= 8 {
            let items: Vec<Vec<u64>> = b.elements().map(|e| e.residues().to_vec()).collect();
            prop_assert_eq!(t, oracle::energy_quadruples(&g, &items));
        }
    }

    #[test]
    fn energy_bound_below_sumset(g in group_strategy(121), seed in any::<u64>(), da in 0.02f64..0.6, db in 0.02f64..0.6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_subset(&g, da, &mut rng).unwrap();
        let b = random_subset(&g, db, &mut rng).unwrap();
        let bound = energy_sumset_lower_bound(&a, &b).unwrap();
        prop_assert!(bound.holds_for(sumset(&a, &b).unwrap().len() as u64));
    }

    #[test]
    fn equal_ranks_give_power(k in 1usize..6, n in 0i64..6) {
        let bound = char0_lower_bound(&vec![n; k]).unwrap();
        prop_assert_eq!(bound, BigRational::from_integer(((k as i64 + 1).pow(n as u32)).into()));
    }

    #[test]
    fn basis_pairs_beat_both_bounds(p in prop::sample::select(vec![3u64, 5, 7]), r in 1usize..=3, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let bs = random_basis_system(p, 2, r, &mut rng).unwrap();
        let measured = bs.sumset_size().unwrap();
        prop_assert!(charp_lower_bound(r as u32, r as u32).holds_for(measured));
        prop_assert!(rational_le(&character_sum_lower_bound(p, r as u32, 2).unwrap(), measured));
    }
}
