//! Seeded random instances. Every generator takes the RNG explicitly so a
//! single seed drives a whole run.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::group::{generates, ElementMultiset, ElementSet, GroupSpec};
use crate::lattice::{is_p_oblique, BasisSystem, BlockLattice};
use crate::linalg::{Fp, Matrix, PrimeFieldMatrix};

const MAX_REJECTIONS: usize = 10_000;

pub fn random_element(g: &GroupSpec, rng: &mut impl Rng) -> Vec<i64> {
    g.moduli().iter().map(|&m| rng.gen_range(0..m) as i64).collect()
}

/// A generating multiset: random elements until they generate, then up to
/// `extra` more.
pub fn random_generating_multiset(g: &GroupSpec, extra: usize, rng: &mut impl Rng) -> Result<ElementMultiset> {
    let mut coords: Vec<Vec<i64>> = Vec::new();
    for _ in 0..MAX_REJECTIONS {
        coords.push(random_element(g, rng));
        if generates(&ElementMultiset::from_coords(g, &coords)?)? {
            let more = rng.gen_range(0..=extra);
            coords.extend((0..more).map(|_| random_element(g, rng)));
            return ElementMultiset::from_coords(g, &coords);
        }
    }
    Err(Error::InvariantBreach(
        "random elements never generated the group".into(),
    ))
}

/// Non-empty subset with each element kept with probability `density`.
pub fn random_subset(g: &GroupSpec, density: f64, rng: &mut impl Rng) -> Result<ElementSet> {
    let n = g.ensure_enumerable()?;
    let mut idx: Vec<usize> = (0..n).filter(|_| rng.gen_bool(density)).collect();
    if idx.is_empty() {
        idx.push(rng.gen_range(0..n));
    }
    ElementSet::from_indices(g, idx)
}

/// Group of order at most `max_order`, as a random factorization into
/// cyclic factors.
pub fn random_group(max_order: u64, rng: &mut impl Rng) -> Result<GroupSpec> {
    let order = rng.gen_range(2..=max_order.max(2));
    let mut moduli = Vec::new();
    let mut rest = order;
    while rest > 1 {
        let divisors: Vec<u64> = (2..=rest).filter(|d| rest % d == 0).collect();
        let d = *divisors.choose(rng).expect("rest > 1 has a divisor");
        moduli.push(d);
        rest /= d;
    }
    GroupSpec::new(&moduli)
}

pub fn random_matrix(f: Fp, rows: usize, cols: usize, rng: &mut impl Rng) -> PrimeFieldMatrix {
    Matrix::from_fn(f, rows, cols, |_, _| rng.gen_range(0..f.p()))
}

pub fn random_invertible(f: Fp, r: usize, rng: &mut impl Rng) -> PrimeFieldMatrix {
    loop {
        let m = random_matrix(f, r, r, rng);
        if m.is_invertible() {
            return m;
        }
    }
}

/// Basis of `F_p^r` as a list of vectors.
pub fn random_basis(f: Fp, r: usize, rng: &mut impl Rng) -> Vec<Vec<i64>> {
    let m = random_invertible(f, r, rng);
    (0..r)
        .map(|j| m.column(j).into_iter().map(|x| x as i64).collect())
        .collect()
}

pub fn random_basis_system(p: u64, k: usize, r: usize, rng: &mut impl Rng) -> Result<BasisSystem> {
    let f = Fp::new(p)?;
    let bases: Vec<Vec<Vec<i64>>> = (0..k).map(|_| random_basis(f, r, rng)).collect();
    BasisSystem::new(p, &bases)
}

/// Span of `dim` random vectors of `F_p^n` (possibly smaller).
pub fn random_subspace(f: Fp, n: usize, dim: usize, rng: &mut impl Rng) -> PrimeFieldMatrix {
    random_matrix(f, dim, n, rng)
}

/// p-oblique lattice with `dim W = dim`; `dim` must be at most `(k-1) r`.
pub fn random_oblique_lattice_of_dim(
    p: u64,
    k: usize,
    r: usize,
    dim: usize,
    rng: &mut impl Rng,
) -> Result<BlockLattice> {
    if dim > (k.saturating_sub(1)) * r {
        return Err(Error::InvalidArgument(format!(
            "an oblique lattice has dim W <= (k-1) r = {}",
            k.saturating_sub(1) * r
        )));
    }
    let f = Fp::new(p)?;
    for _ in 0..MAX_REJECTIONS {
        let gens = random_subspace(f, k * r, dim, rng);
        let rows: Vec<Vec<i64>> = gens
            .to_rows()
            .into_iter()
            .map(|v| v.into_iter().map(|x| x as i64).collect())
            .collect();
        let l = BlockLattice::new(p, k, r, &rows)?;
        if l.dim_w() == dim && is_p_oblique(&l).oblique {
            return Ok(l);
        }
    }
    Err(Error::InvariantBreach(format!(
        "no oblique subspace of dimension {dim} found"
    )))
}

/// p-oblique lattice with `dim W` uniform in `0..=(k-1) r`.
pub fn random_oblique_lattice(p: u64, k: usize, r: usize, rng: &mut impl Rng) -> Result<BlockLattice> {
    let dim = rng.gen_range(0..=(k.saturating_sub(1)) * r);
    random_oblique_lattice_of_dim(p, k, r, dim, rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generators_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            let g = random_group(48, &mut rng).unwrap();
            assert!(g.order() <= 48);
            let b = random_generating_multiset(&g, 2, &mut rng).unwrap();
            assert!(generates(&b).unwrap());
            let l = random_oblique_lattice(3, 3, 2, &mut rng).unwrap();
            assert!(is_p_oblique(&l).oblique);
        }
        let bs = random_basis_system(5, 3, 2, &mut rng).unwrap();
        assert_eq!(bs.k(), 3);
    }

    #[test]
    fn same_seed_same_instance() {
        let a = random_basis_system(7, 2, 3, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        let b = random_basis_system(7, 2, 3, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        assert_eq!(a, b);
    }
}
