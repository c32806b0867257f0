use addbasis_core::linalg::{rowspace_inclusion_solve, strict_upper_triangularize, Fp, Matrix, PrimeFieldMatrix};
use addbasis_core::random::{random_invertible, random_matrix};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn prime() -> impl Strategy<Value = u64> {
    prop::sample::select(vec![2u64, 3, 5, 7, 11, 13])
}

fn low_rank(f: Fp, n: usize, rank: usize, rng: &mut ChaCha8Rng) -> PrimeFieldMatrix {
    random_matrix(f, n, rank, rng)
        .mul(&random_matrix(f, rank, n, rng))
        .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn inverse_is_two_sided(p in prime(), r in 1usize..=6, seed in any::<u64>()) {
        let f = Fp::new(p).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = random_invertible(f, r, &mut rng);
        let inv = m.inverse().unwrap();
        prop_assert_eq!(inv.mul(&m).unwrap(), Matrix::identity(f, r));
        prop_assert_eq!(m.mul(&inv).unwrap(), Matrix::identity(f, r));
        prop_assert!(m.det().unwrap() != 0);
    }

    #[test]
    fn rank_is_invariant(p in prime(), rows in 1usize..=5, cols in 1usize..=5, seed in any::<u64>()) {
        let f = Fp::new(p).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = random_matrix(f, rows, cols, &mut rng);
        let rank = m.rank();
        let mut perm: Vec<usize> = (0..cols).collect();
        perm.shuffle(&mut rng);
        prop_assert_eq!(m.select_columns(&perm).rank(), rank);
        prop_assert_eq!(m.transpose().rank(), rank);
        let left = random_invertible(f, rows, &mut rng);
        let right = random_invertible(f, cols, &mut rng);
        prop_assert_eq!(left.mul(&m).unwrap().mul(&right).unwrap().rank(), rank);
    }

    #[test]
    fn triangularization(p in prime(), n in 1usize..=5, seed in any::<u64>()) {
        let f = Fp::new(p).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rank = (seed as usize) % n;
        let m = low_rank(f, n, rank, &mut rng);
        let (u, v) = strict_upper_triangularize(&m).unwrap();
        prop_assert!(u.is_invertible() && v.is_invertible());
        prop_assert!(v.mul(&m).unwrap().mul(&u).unwrap().is_strictly_upper_triangular());
    }

    #[test]
    fn inclusion_iff_rank(p in prime(), r in 1usize..=3, n in 1usize..=5, s in 1usize..=3, seed in any::<u64>()) {
        let f = Fp::new(p).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        // rank-one sources keep both outcomes likely
        let sources: Vec<PrimeFieldMatrix> = (0..s)
            .map(|_| random_matrix(f, r, 1, &mut rng).mul(&random_matrix(f, 1, n, &mut rng)).unwrap())
            .collect();
        let target = random_matrix(f, r, n, &mut rng);
        let stacked = Matrix::vstack_all(f, n, &sources);
        let consistent = stacked.rank() == stacked.vstack(&target).unwrap().rank();
        match rowspace_inclusion_solve(&target, &sources) {
            Ok(coeffs) => {
                prop_assert!(consistent);
                let recon = coeffs.iter().zip(&sources).fold(Matrix::zeros(f, r, n), |acc, (a, s)| acc.add(&a.mul(s).unwrap()).unwrap());
                prop_assert_eq!(recon, target);
            }
            Err(_) => prop_assert!(!consistent),
        }
    }
}

#[test]
fn exhaustive_two_by_two_inverses() {
    for p in [2u64, 3] {
        let f = Fp::new(p).unwrap();
        for code in 0..p.pow(4) {
            let e: Vec<u64> = (0..4).map(|i| code / p.pow(i) % p).collect();
            let m = Matrix::from_rows(f, &[vec![e[0], e[1]], vec![e[2], e[3]]]).unwrap();
            let det = (e[0] * e[3] + p * p - e[1] * e[2] % p) % p;
            assert_eq!(m.is_invertible(), det != 0);
            if let Ok(inv) = m.inverse() {
                assert_eq!(inv.mul(&m).unwrap(), Matrix::identity(f, 2));
            }
        }
    }
}
