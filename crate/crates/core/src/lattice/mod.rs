//! Block-structured lattices `p Z^{kr} <= L <= Z^{kr}`, their unit-cube
//! covering numbers, and the lattice attached to a system of bases.
//!
//! Coordinates are ordered `(z_11, ..., z_1r, ..., z_k1, ..., z_kr)`: block
//! `i` occupies positions `i*r .. (i+1)*r`.
//!
//! A translate `s + L` is exactly one coset of `L`, so the least number of
//! translates covering `{0,1}^{kr}` equals the number of distinct cosets met
//! by the cube vertices. Both lattice representations count cosets through
//! a canonical representative: elimination against the RREF of `W = L/pZ^{kr}`
//! for [`BlockLattice`], and Hermite-normal-form reduction for [`IntLattice`].

mod cube;
mod hnf;

use std::collections::HashSet;

use num_bigint::BigUint;
use serde::Serialize;

pub use cube::count_cube_images;
pub use hnf::Hnf;

use crate::error::{Error, Result};
use crate::group::{ElementMultiset, GroupSpec};
use crate::limits;
use crate::linalg::{Field, Fp, Matrix, PrimeFieldMatrix};
use crate::sumsets::star_sumset_trace;

/// A lattice containing `pZ^{kr}`, stored as the subspace
/// `W = L / pZ^{kr}` of `F_p^{kr}` (RREF basis rows).
#[derive(Clone, Debug, PartialEq)]
pub struct BlockLattice {
    field: Fp,
    k: usize,
    r: usize,
    basis: PrimeFieldMatrix,
    pivots: Vec<usize>,
}

fn check_shape(k: usize, r: usize) -> Result<()> {
    if k < 2 || r < 1 {
        return Err(Error::InvalidArgument(format!(
            "block lattices need k >= 2 and r >= 1, got k={k}, r={r}"
        )));
    }
    Ok(())
}

impl BlockLattice {
    /// Preimage of the span of `generators` (read mod `p`).
    pub fn new(p: u64, k: usize, r: usize, generators: &[Vec<i64>]) -> Result<Self> {
        check_shape(k, r)?;
        let field = Fp::new(p)?;
        let n = k * r;
        if generators.iter().any(|g| g.len() != n) {
            return Err(Error::DimensionMismatch(format!(
                "generators must have length k*r = {n}"
            )));
        }
        let m = Matrix::from_fn(field, generators.len(), n, |i, j| field.reduce(generators[i][j]));
        Ok(Self::from_matrix(field, k, r, &m))
    }

    pub(crate) fn from_matrix(field: Fp, k: usize, r: usize, gens: &PrimeFieldMatrix) -> Self {
        let (basis, pivots) = gens.row_basis();
        BlockLattice {
            field,
            k,
            r,
            basis,
            pivots,
        }
    }

    /// `p Z^{kr}` (`W = 0`).
    pub fn scaled(p: u64, k: usize, r: usize) -> Result<Self> {
        Self::new(p, k, r, &[])
    }

    /// `Z^{kr}` (`W = F_p^{kr}`).
    pub fn integer(p: u64, k: usize, r: usize) -> Result<Self> {
        let n = k * r;
        let units: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| (i == j) as i64).collect()).collect();
        Self::new(p, k, r, &units)
    }

    pub fn p(&self) -> u64 {
        self.field.p()
    }
    pub fn field(&self) -> Fp {
        self.field
    }
    pub fn k(&self) -> usize {
        self.k
    }
    pub fn r(&self) -> usize {
        self.r
    }
    pub fn ambient_dim(&self) -> usize {
        self.k * self.r
    }
    pub fn dim_w(&self) -> usize {
        self.basis.rows()
    }
    /// RREF basis of `W`, one row per generator.
    pub fn basis(&self) -> &PrimeFieldMatrix {
        &self.basis
    }
    pub fn basis_rows(&self) -> Vec<Vec<u64>> {
        self.basis.to_rows()
    }

    /// `det L = p^{kr - dim W}`.
    pub fn det(&self) -> BigUint {
        BigUint::from(self.p()).pow((self.ambient_dim() - self.dim_w()) as u32)
    }

    /// Non-pivot coordinates of `v mod W` after eliminating the pivots.
    pub fn canonical_key(&self, v: &[i64]) -> Result<Vec<u64>> {
        if v.len() != self.ambient_dim() {
            return Err(Error::DimensionMismatch("vector length".into()));
        }
        let f = self.field;
        let mut w: Vec<u64> = v.iter().map(|&x| f.reduce(x)).collect();
        for (row, &pc) in self.pivots.iter().enumerate() {
            let c = w[pc];
            if c != 0 {
                for (x, b) in w.iter_mut().zip(self.basis.row(row)) {
                    *x = f.sub(x, &f.mul(&c, b));
                }
            }
        }
        Ok((0..w.len())
            .filter(|i| !self.pivots.contains(i))
            .map(|i| w[i])
            .collect())
    }

    pub fn contains(&self, v: &[i64]) -> Result<bool> {
        Ok(self.canonical_key(v)?.iter().all(|&x| x == 0))
    }

    /// Images of the unit vectors under `v -> canonical_key(v)`; the map is
    /// linear, so these determine every vertex key.
    fn unit_keys(&self) -> Vec<Vec<u64>> {
        let n = self.ambient_dim();
        (0..n)
            .map(|c| {
                let mut e = vec![0i64; n];
                e[c] = 1;
                self.canonical_key(&e).expect("length checked")
            })
            .collect()
    }

    fn same_shape(&self, other: &BlockLattice) -> Result<()> {
        if self.p() != other.p() || self.k != other.k || self.r != other.r {
            return Err(Error::InvalidArgument("lattices have different (p, k, r)".into()));
        }
        Ok(())
    }

    /// Integer generators of the same lattice: lifted rows of `W` plus
    /// `p e_i`.
    pub fn integer_generators(&self) -> Vec<Vec<i64>> {
        let n = self.ambient_dim();
        let p = self.p() as i64;
        let mut gens: Vec<Vec<i64>> = self
            .basis_rows()
            .into_iter()
            .map(|row| row.into_iter().map(|x| x as i64).collect())
            .collect();
        gens.extend((0..n).map(|i| (0..n).map(|j| if i == j { p } else { 0 }).collect()));
        gens
    }
}

/// Full-rank sublattice of `Z^n` with a cached Hermite normal form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntLattice {
    dim: usize,
    basis: Vec<Vec<i64>>,
    hnf: Hnf,
}

impl IntLattice {
    /// From `dim` basis vectors (columns of the basis matrix).
    pub fn from_basis(basis: Vec<Vec<i64>>) -> Result<Self> {
        let dim = basis.len();
        if dim == 0 {
            return Err(Error::InvalidArgument("empty basis".into()));
        }
        let hnf = Hnf::from_generators(dim, &basis)?;
        Ok(IntLattice { dim, basis, hnf })
    }

    /// From any spanning set of a full-rank lattice.
    pub fn from_generators(dim: usize, generators: &[Vec<i64>]) -> Result<Self> {
        let hnf = Hnf::from_generators(dim, generators)?;
        let basis = (0..dim)
            .map(|j| {
                (0..dim)
                    .map(|i| i64::try_from(hnf.entry(i, j)).map_err(|_| Error::Overflow("basis entry")))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(IntLattice { dim, basis, hnf })
    }

    pub fn from_block(l: &BlockLattice) -> Result<Self> {
        Self::from_generators(l.ambient_dim(), &l.integer_generators())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
    pub fn basis(&self) -> &[Vec<i64>] {
        &self.basis
    }
    pub fn hnf(&self) -> &Hnf {
        &self.hnf
    }
    pub fn det(&self) -> Result<i128> {
        self.hnf.det()
    }
    pub fn contains(&self, v: &[i64]) -> bool {
        v.len() == self.dim && self.hnf.contains(v)
    }

    /// `W = (L + pZ^n) / pZ^n` as a block lattice with the given shape.
    pub fn to_block(&self, p: u64, k: usize, r: usize) -> Result<BlockLattice> {
        if k * r != self.dim {
            return Err(Error::DimensionMismatch(format!(
                "k*r = {} but dim = {}",
                k * r,
                self.dim
            )));
        }
        BlockLattice::new(p, k, r, &self.basis)
    }
}

/// Result of the p-oblique test. `witness` is a lattice vector (as residues
/// mod p) vanishing outside `block` but not inside it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ObliqueVerdict {
    pub oblique: bool,
    pub block: Option<usize>,
    pub witness: Option<Vec<u64>>,
}

/// For every block `i`, no non-zero vector of `W` may vanish on all the
/// other blocks.
pub fn is_p_oblique(l: &BlockLattice) -> ObliqueVerdict {
    let n = l.ambient_dim();
    let f = l.field;
    for i0 in 0..l.k {
        let outside: Vec<usize> = (0..n).filter(|c| c / l.r != i0).collect();
        // coefficient vectors c with c * basis vanishing outside block i0
        let restricted = l.basis.select_columns(&outside);
        let left_kernel = restricted.transpose().nullspace();
        if let Some(c) = left_kernel.first() {
            let w: Vec<u64> = (0..n)
                .map(|col| (0..l.dim_w()).fold(0, |acc, row| f.add(&acc, &f.mul(&c[row], l.basis.get(row, col)))))
                .collect();
            debug_assert!(w.iter().any(|&x| x != 0));
            return ObliqueVerdict {
                oblique: false,
                block: Some(i0),
                witness: Some(w),
            };
        }
    }
    ObliqueVerdict {
        oblique: true,
        block: None,
        witness: None,
    }
}

/// `L + pZ^{kr}` read from an integer lattice, then the block test.
pub fn is_p_oblique_int(l: &IntLattice, p: u64, k: usize, r: usize) -> Result<ObliqueVerdict> {
    Ok(is_p_oblique(&l.to_block(p, k, r)?))
}

/// Number of cosets of `l` met by `{0,1}^{kr}`.
pub fn covering_number(l: &BlockLattice) -> Result<u64> {
    limits::check_cube_dim(l.ambient_dim())?;
    Ok(count_cube_images(l.p(), &l.unit_keys()))
}

/// Same count through Hermite-normal-form reduction.
pub fn covering_number_int(l: &IntLattice) -> Result<u64> {
    let n = l.dim();
    limits::check_cube_dim(n)?;
    let hnf = l.hnf();
    let diag = hnf.diagonal();
    if diag.iter().map(|d| (*d as f64).log2()).sum::<f64>() >= 127.0 {
        return Err(Error::Overflow("coset key"));
    }
    let pack = |v: &[i128]| -> u128 {
        v.iter()
            .zip(&diag)
            .rev()
            .fold(0u128, |acc, (&x, &d)| acc * d as u128 + x as u128)
    };
    Ok(cube::parallel_distinct(n, |lo, hi, out: &mut HashSet<u128>| {
        let mut cur = vec![0i128; n];
        cube::walk_flips(lo, hi, |vertex, flip| {
            match flip {
                None => {
                    for (c, x) in cur.iter_mut().enumerate() {
                        *x = (vertex >> c & 1) as i128;
                    }
                    hnf.reduce(&mut cur);
                }
                Some((c, on)) => {
                    cur[c] += if on { 1 } else { -1 };
                    hnf.reduce_from(&mut cur, c);
                }
            }
            out.insert(pack(&cur));
        });
    }))
}

/// `z_1j + ... + z_kj = 0 (mod p)` for every `j`: `dim W = (k-1) r`,
/// `det = p^r`, covering number `min((k+1)^r, p^r)`.
pub fn example_lattice(k: usize, r: usize, p: u64) -> Result<BlockLattice> {
    check_shape(k, r)?;
    let n = k * r;
    let mut gens = Vec::with_capacity((k - 1) * r);
    for i in 0..k - 1 {
        for j in 0..r {
            let mut v = vec![0i64; n];
            v[i * r + j] = 1;
            v[(k - 1) * r + j] = -1;
            gens.push(v);
        }
    }
    BlockLattice::new(p, k, r, &gens)
}

/// `k` bases of `F_p^r`; `bases[i][j]` is the vector `b_ij`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BasisSystem {
    p: u64,
    k: usize,
    r: usize,
    bases: Vec<Vec<Vec<u64>>>,
}

impl BasisSystem {
    pub fn new(p: u64, bases: &[Vec<Vec<i64>>]) -> Result<Self> {
        let field = Fp::new(p)?;
        let k = bases.len();
        if k == 0 {
            return Err(Error::InvalidArgument("a basis system needs at least one basis".into()));
        }
        let r = bases[0].len();
        if r == 0 {
            return Err(Error::InvalidArgument("bases must be non-empty".into()));
        }
        let mut reduced = Vec::with_capacity(k);
        for (index, b) in bases.iter().enumerate() {
            if b.len() != r || b.iter().any(|v| v.len() != r) {
                return Err(Error::NotABasis { index });
            }
            let vecs: Vec<Vec<u64>> = b.iter().map(|v| v.iter().map(|&x| field.reduce(x)).collect()).collect();
            reduced.push(vecs);
        }
        let sys = BasisSystem {
            p,
            k,
            r,
            bases: reduced,
        };
        for index in 0..k {
            if !sys.matrix(index).is_invertible() {
                return Err(Error::NotABasis { index });
            }
        }
        Ok(sys)
    }

    /// From invertible matrices; the columns of `mats[i]` form `B_i`.
    pub fn from_matrices(mats: &[PrimeFieldMatrix]) -> Result<Self> {
        let Some(first) = mats.first() else {
            return Err(Error::InvalidArgument("a basis system needs at least one basis".into()));
        };
        let p = first.field().p();
        let bases: Vec<Vec<Vec<i64>>> = mats
            .iter()
            .map(|m| {
                (0..m.cols())
                    .map(|j| m.column(j).into_iter().map(|x| x as i64).collect())
                    .collect()
            })
            .collect();
        Self::new(p, &bases)
    }

    pub fn p(&self) -> u64 {
        self.p
    }
    pub fn k(&self) -> usize {
        self.k
    }
    pub fn r(&self) -> usize {
        self.r
    }
    pub fn bases(&self) -> &[Vec<Vec<u64>>] {
        &self.bases
    }

    pub fn field(&self) -> Fp {
        Fp::new(self.p).expect("validated on construction")
    }

    /// `r x r` matrix whose columns are `b_i1, ..., b_ir`.
    pub fn matrix(&self, i: usize) -> PrimeFieldMatrix {
        let b = &self.bases[i];
        Matrix::from_fn(self.field(), self.r, self.r, |row, col| b[col][row])
    }

    /// `[B_1 | ... | B_k]`, the matrix of `phi_B`.
    pub fn evaluation_matrix(&self) -> PrimeFieldMatrix {
        Matrix::from_fn(self.field(), self.r, self.k * self.r, |row, col| {
            self.bases[col / self.r][col % self.r][row]
        })
    }

    /// `phi_B(x) = sum_ij x_ij b_ij` over `F_p`.
    pub fn phi_apply(&self, x: &[i64]) -> Result<Vec<u64>> {
        if x.len() != self.k * self.r {
            return Err(Error::DimensionMismatch(format!(
                "expected a vector of length {}",
                self.k * self.r
            )));
        }
        let f = self.field();
        let xr: Vec<u64> = x.iter().map(|&v| f.reduce(v)).collect();
        self.evaluation_matrix().mul_vec(&xr)
    }

    /// The bases as multisets of `Z_p^r`.
    pub fn multisets(&self) -> Result<Vec<ElementMultiset>> {
        let g = GroupSpec::elementary(self.p, self.r)?;
        self.bases
            .iter()
            .map(|b| {
                let coords: Vec<Vec<i64>> = b.iter().map(|v| v.iter().map(|&x| x as i64).collect()).collect();
                ElementMultiset::from_coords(&g, &coords)
            })
            .collect()
    }

    /// `|B_1* + ... + B_k*|`, computed with dense sumsets in `Z_p^r`.
    pub fn sumset_size(&self) -> Result<u64> {
        Ok(star_sumset_trace(&self.multisets()?)?.0.len() as u64)
    }
}

/// `L_B = ker phi_B`, with `W` the kernel of `[B_1 | ... | B_k]`.
pub fn lattice_from_bases(bs: &BasisSystem) -> Result<BlockLattice> {
    check_shape(bs.k, bs.r)?;
    let f = bs.field();
    let kernel = bs.evaluation_matrix().nullspace();
    let gens = Matrix::from_fn(f, kernel.len(), bs.k * bs.r, |i, j| kernel[i][j]);
    Ok(BlockLattice::from_matrix(f, bs.k, bs.r, &gens))
}

/// `l1 <= l2`, i.e. `W_1` is a subspace of `W_2`.
pub fn lattice_leq(l1: &BlockLattice, l2: &BlockLattice) -> Result<bool> {
    l1.same_shape(l2)?;
    for row in l1.basis_rows() {
        let v: Vec<i64> = row.into_iter().map(|x| x as i64).collect();
        if !l2.contains(&v)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// [`lattice_leq`], additionally confirming `C(l2) <= C(l1)` whenever the
/// inclusion holds.
pub fn lattice_leq_verified(l1: &BlockLattice, l2: &BlockLattice) -> Result<bool> {
    let leq = lattice_leq(l1, l2)?;
    if leq {
        let (c1, c2) = (covering_number(l1)?, covering_number(l2)?);
        if c2 > c1 {
            return Err(Error::InvariantBreach(format!(
                "L1 <= L2 but C(L2) = {c2} > C(L1) = {c1}"
            )));
        }
    }
    Ok(leq)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit(n: usize, i: usize) -> Vec<i64> {
        (0..n).map(|j| (i == j) as i64).collect()
    }

    fn standard(r: usize) -> Vec<Vec<i64>> {
        (0..r).map(|i| unit(r, i)).collect()
    }

    #[test]
    fn oblique_examples() {
        let l = BlockLattice::scaled(3, 2, 2).unwrap();
        assert!(is_p_oblique(&l).oblique);
        for (k, r, p) in [(2, 1, 3), (3, 2, 5), (4, 1, 2), (2, 3, 7)] {
            assert!(is_p_oblique(&example_lattice(k, r, p).unwrap()).oblique);
        }
        let l = BlockLattice::new(5, 2, 2, &[unit(4, 0)]).unwrap();
        let v = is_p_oblique(&l);
        assert!(!v.oblique);
        assert_eq!(v.block, Some(0));
        assert_eq!(v.witness, Some(vec![1, 0, 0, 0]));
        // Z^{kr} itself is never oblique
        assert!(!is_p_oblique(&BlockLattice::integer(3, 2, 1).unwrap()).oblique);
    }

    #[test]
    fn covering_examples() {
        assert_eq!(covering_number(&BlockLattice::integer(5, 2, 2).unwrap()).unwrap(), 1);
        for p in [2, 3, 5] {
            assert_eq!(covering_number(&BlockLattice::scaled(p, 3, 2).unwrap()).unwrap(), 64);
        }
        assert_eq!(covering_number(&example_lattice(3, 1, 5).unwrap()).unwrap(), 4);
        assert_eq!(covering_number(&example_lattice(2, 1, 3).unwrap()).unwrap(), 3);
        assert_eq!(covering_number(&example_lattice(2, 2, 7).unwrap()).unwrap(), 9);
    }

    #[test]
    fn example_lattice_shape() {
        let l = example_lattice(3, 2, 5).unwrap();
        assert_eq!(l.dim_w(), 4);
        assert_eq!(l.det(), BigUint::from(25u32));
        assert!(l.contains(&[1, 0, 1, 0, 3, 0]).unwrap());
        assert!(!l.contains(&[1, 0, 0, 0, 0, 0]).unwrap());
        assert!(example_lattice(1, 2, 5).is_err());
        assert!(example_lattice(2, 2, 6).is_err());
    }

    #[test]
    fn int_path_agrees() {
        for l in [
            example_lattice(3, 2, 3).unwrap(),
            BlockLattice::scaled(2, 2, 2).unwrap(),
        ] {
            let il = IntLattice::from_block(&l).unwrap();
            assert_eq!(BigUint::from(il.det().unwrap() as u128), l.det());
            assert_eq!(covering_number_int(&il).unwrap(), covering_number(&l).unwrap());
            assert_eq!(il.to_block(l.p(), l.k(), l.r()).unwrap(), l);
        }
        assert!(matches!(
            IntLattice::from_basis(vec![vec![1, 1], vec![2, 2]]),
            Err(Error::RankDeficient)
        ));
        assert_eq!(
            covering_number_int(&IntLattice::from_basis(standard(4)).unwrap()).unwrap(),
            1
        );
    }

    #[test]
    fn phi_examples() {
        let b2 = vec![vec![1, 1], vec![1, -1]];
        let bs = BasisSystem::new(3, &[standard(2), b2]).unwrap();
        assert_eq!(bs.phi_apply(&[0, 0, 0, 0]).unwrap(), vec![0, 0]);
        assert_eq!(bs.phi_apply(&[0, 0, 0, 1]).unwrap(), vec![1, 2]);
        assert_eq!(bs.phi_apply(&[1, 0, 0, 0]).unwrap(), vec![1, 0]);
        assert!(bs.phi_apply(&[1]).is_err());
        let images: HashSet<Vec<u64>> = (0..16u32)
            .map(|m| {
                bs.phi_apply(&(0..4).map(|c| (m >> c & 1) as i64).collect::<Vec<_>>())
                    .unwrap()
            })
            .collect();
        assert_eq!(images.len() as u64, bs.sumset_size().unwrap());
        assert_eq!(images.len(), 8);
    }

    #[test]
    fn from_bases_examples() {
        for (k, r, p) in [(2, 1, 3), (3, 2, 5), (2, 3, 2)] {
            let bs = BasisSystem::new(p, &vec![standard(r); k]).unwrap();
            assert_eq!(lattice_from_bases(&bs).unwrap(), example_lattice(k, r, p).unwrap());
        }
        let bs = BasisSystem::new(3, &[standard(2), vec![vec![1, 1], vec![1, 2]]]).unwrap();
        let l = lattice_from_bases(&bs).unwrap();
        assert_eq!(covering_number(&l).unwrap(), 8);
        assert_eq!(l.det(), BigUint::from(9u32));
        assert!(is_p_oblique(&l).oblique);
        assert!(matches!(
            BasisSystem::new(3, &[standard(2), vec![vec![1, 1], vec![2, 2]]]),
            Err(Error::NotABasis { index: 1 })
        ));
    }

    #[test]
    fn leq_examples() {
        let l = example_lattice(2, 2, 5).unwrap();
        assert!(lattice_leq_verified(&l, &l).unwrap());
        let zero = BlockLattice::scaled(5, 2, 2).unwrap();
        assert!(lattice_leq_verified(&zero, &l).unwrap());
        assert!(!lattice_leq(&l, &zero).unwrap());
        let other = example_lattice(2, 2, 3).unwrap();
        assert!(lattice_leq(&l, &other).is_err());
    }
}
