//! Basis systems from p-oblique lattices.
//!
//! Given `W = L / pZ^{kr}` with generator blocks `L_1, ..., L_k` (each
//! `r x n`), we find invertible `B_1, ..., B_k` with `sum_i B_i L_i = 0`, so
//! that every vector of `L` lies in the kernel of the evaluation map of the
//! system whose `i`-th basis is the columns of `B_i`.
//!
//! The construction runs in two steps. Obliqueness lets every `L_i` be
//! written as `sum_{j != i} A_ij L_j`; with `A_ii = -I` each block row of
//! the grid `A` annihilates `L`. Then `M_1, ..., M_k` are chosen so that all
//! `B_j = sum_i M_i A_ij` are invertible, recursively in `k`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::{covering_number, lattice_from_bases, lattice_leq, BasisSystem, BlockLattice};
use crate::linalg::{strict_upper_triangularize, Field, Fp, Matrix, PrimeFieldMatrix};

/// `grid[i][j]` is `A_ij`.
pub type BlockGrid = Vec<Vec<PrimeFieldMatrix>>;

const RANDOM_TRIALS: u64 = 64;
const EXHAUSTIVE_BITS: f64 = 20.0;
// random trials used instead when the exhaustive space is too large
const LARGE_SPACE_TRIALS: u64 = 1 << 16;

/// `L_i` is the `i`-th block of every row of the RREF basis of `W`, as
/// columns.
#[allow(non_snake_case)]
pub fn build_L_blocks(l: &BlockLattice) -> Vec<PrimeFieldMatrix> {
    let basis = l.basis();
    let (r, n) = (l.r(), l.dim_w());
    (0..l.k())
        .map(|i| Matrix::from_fn(l.field(), r, n, |row, t| *basis.get(t, i * r + row)))
        .collect()
}

fn check_blocks(blocks: &[PrimeFieldMatrix]) -> Result<(Fp, usize, usize)> {
    let Some(first) = blocks.first() else {
        return Err(Error::InvalidArgument("no blocks given".into()));
    };
    let (f, r, n) = (*first.field(), first.rows(), first.cols());
    if blocks.iter().any(|b| b.rows() != r || b.cols() != n || b.field() != &f) {
        return Err(Error::DimensionMismatch("blocks must share field and shape".into()));
    }
    Ok((f, r, n))
}

/// Lattice vector (as residues) of the generator combination `x` that
/// vanishes in every block except `i`.
fn oblique_witness(blocks: &[PrimeFieldMatrix], i: usize) -> Option<Vec<u64>> {
    let (f, _, n) = check_blocks(blocks).ok()?;
    let others: Vec<PrimeFieldMatrix> = blocks
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != i)
        .map(|(_, b)| b.clone())
        .collect();
    let stacked = Matrix::vstack_all(f, n, &others);
    stacked.nullspace().into_iter().find_map(|x| {
        let li = blocks[i].mul_vec(&x).ok()?;
        if li.iter().all(|&v| v == 0) {
            return None;
        }
        Some(
            blocks
                .iter()
                .flat_map(|b| b.mul_vec(&x).expect("shape checked"))
                .collect(),
        )
    })
}

/// Grid with `A_ii = -I` and `sum_j A_ij L_j = 0` for every `i`.
#[allow(non_snake_case)]
pub fn find_A_blocks(blocks: &[PrimeFieldMatrix]) -> Result<BlockGrid> {
    let (f, r, _) = check_blocks(blocks)?;
    let k = blocks.len();
    let minus_i = Matrix::identity(f, r).neg();
    let mut grid = Vec::with_capacity(k);
    for i in 0..k {
        let others: Vec<PrimeFieldMatrix> = (0..k).filter(|&j| j != i).map(|j| blocks[j].clone()).collect();
        let coeffs = match crate::linalg::rowspace_inclusion_solve(&blocks[i], &others) {
            Ok(c) => c,
            Err(Error::Inconsistent) => {
                return Err(match oblique_witness(blocks, i) {
                    Some(witness) => Error::NotOblique { block: i, witness },
                    None => Error::RowSpaceInclusion { block: i },
                });
            }
            Err(e) => return Err(e),
        };
        let mut it = coeffs.into_iter();
        let row: Vec<PrimeFieldMatrix> = (0..k)
            .map(|j| {
                if j == i {
                    minus_i.clone()
                } else {
                    it.next().expect("one per other block")
                }
            })
            .collect();
        grid.push(row);
    }
    Ok(grid)
}

/// Outcome of the diagonal search, for the certificate.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SearchStats {
    pub levels: usize,
    pub random_trials: u64,
    pub exhaustive_points: u64,
}

/// `t` with `det(B_j + U diag(t) V A_j) != 0` for every pair `(B_j, A_j)`.
///
/// Seeded random trials first, then every point of `F_p^r` when that space
/// has at most `2^20` points.
pub fn find_diagonal(
    targets: &[(PrimeFieldMatrix, PrimeFieldMatrix)],
    u: &PrimeFieldMatrix,
    v: &PrimeFieldMatrix,
    rng: &mut impl Rng,
    stats: &mut SearchStats,
) -> Result<Vec<u64>> {
    let f = *u.field();
    let p = f.p();
    let r = u.rows();
    // U D V A = sum_c t_c (U e_c)(e_c^T V A): precompute the rank-one terms
    let terms: Vec<Vec<PrimeFieldMatrix>> = targets
        .iter()
        .map(|(_, a)| {
            let va = v.mul(a).expect("square r x r");
            (0..r)
                .map(|c| Matrix::from_fn(f, r, r, |i, j| f.mul(u.get(i, c), va.get(c, j))))
                .collect()
        })
        .collect();
    let ok = |t: &[u64]| {
        targets.iter().zip(&terms).all(|((b, _), parts)| {
            let mut m = b.clone();
            for (c, part) in parts.iter().enumerate() {
                if t[c] != 0 {
                    m = m.add(&part.scale(&t[c])).expect("same shape");
                }
            }
            m.is_invertible()
        })
    };

    let exhaustive = r as f64 * (p as f64).log2() <= EXHAUSTIVE_BITS;
    let trials = if exhaustive { RANDOM_TRIALS } else { LARGE_SPACE_TRIALS };
    for _ in 0..trials {
        let t: Vec<u64> = (0..r).map(|_| rng.gen_range(0..p)).collect();
        stats.random_trials += 1;
        if ok(&t) {
            return Ok(t);
        }
    }
    if exhaustive {
        let total = p.pow(r as u32);
        let mut t = vec![0u64; r];
        for idx in 0..total {
            let mut x = idx;
            for c in t.iter_mut() {
                *c = x % p;
                x /= p;
            }
            stats.exhaustive_points += 1;
            if ok(&t) {
                return Ok(t);
            }
        }
        return Err(Error::DiagonalSearchFailed { trials: trials + total });
    }
    Err(Error::DiagonalSearchFailed { trials })
}

fn check_grid(grid: &BlockGrid) -> Result<(Fp, usize)> {
    let k = grid.len();
    if k == 0 || grid.iter().any(|row| row.len() != k) {
        return Err(Error::DimensionMismatch("the block grid must be k x k".into()));
    }
    let (f, r) = (*grid[0][0].field(), grid[0][0].rows());
    for row in grid {
        for a in row {
            if a.rows() != r || a.cols() != r || a.field() != &f {
                return Err(Error::DimensionMismatch(
                    "grid blocks must be r x r over one field".into(),
                ));
            }
        }
    }
    for (i, row) in grid.iter().enumerate() {
        if !row[i].is_invertible() {
            return Err(Error::InvalidArgument(format!("diagonal block {i} is not invertible")));
        }
    }
    Ok((f, r))
}

/// `B_j = sum_i M_i A_ij`.
pub fn combine(grid: &BlockGrid, m: &[PrimeFieldMatrix]) -> Vec<PrimeFieldMatrix> {
    let k = grid.len();
    let f = *grid[0][0].field();
    let r = grid[0][0].rows();
    (0..k)
        .map(|j| {
            (0..k).fold(Matrix::zeros(f, r, r), |acc, i| {
                acc.add(&m[i].mul(&grid[i][j]).expect("r x r")).expect("r x r")
            })
        })
        .collect()
}

/// `M_1, ..., M_k` with every `B_j = sum_i M_i A_ij` invertible, for a grid
/// with invertible diagonal blocks.
///
/// Existence is guaranteed when `p >= k`; smaller fields are refused unless
/// `allow_small_field` is set, in which case a failed search is returned as
/// [`Error::DiagonalSearchFailed`].
pub fn invertible_combination(
    grid: &BlockGrid,
    allow_small_field: bool,
    rng: &mut impl Rng,
    stats: &mut SearchStats,
) -> Result<Vec<PrimeFieldMatrix>> {
    let (f, _) = check_grid(grid)?;
    let k = grid.len();
    if (f.p() as usize) < k && !allow_small_field {
        return Err(Error::FieldTooSmall { k, p: f.p() });
    }
    let m = solve_rec(grid, rng, stats)?;
    for (j, b) in combine(grid, &m).iter().enumerate() {
        if !b.is_invertible() {
            return Err(Error::InvariantBreach(format!("combined block B_{j} is singular")));
        }
    }
    Ok(m)
}

fn solve_rec(grid: &BlockGrid, rng: &mut impl Rng, stats: &mut SearchStats) -> Result<Vec<PrimeFieldMatrix>> {
    let k = grid.len();
    let f = *grid[0][0].field();
    let r = grid[0][0].rows();
    let last = k - 1;
    let id = Matrix::identity(f, r);
    if k == 1 {
        return Ok(vec![id]);
    }
    let Some(i0) = (0..last).find(|&i| !grid[last][i].is_invertible()) else {
        let mut m = vec![Matrix::zeros(f, r, r); k];
        m[last] = id;
        return Ok(m);
    };
    stats.levels += 1;

    // swap 0 <-> i0 on rows and columns so the degenerate block is A_{last,0}
    let perm: Vec<usize> = (0..k)
        .map(|i| {
            if i == 0 {
                i0
            } else if i == i0 {
                0
            } else {
                i
            }
        })
        .collect();
    let a: BlockGrid = (0..k)
        .map(|i| (0..k).map(|j| grid[perm[i]][perm[j]].clone()).collect())
        .collect();
    assert!(
        (0..k).all(|i| a[i][i].is_invertible()),
        "permutation kept the diagonal invertible"
    );

    let top: BlockGrid = a[..last].iter().map(|row| row[..last].to_vec()).collect();
    let mut m = solve_rec(&top, rng, stats)?;
    m.push(Matrix::zeros(f, r, r));
    let b = combine(&a, &m);
    let b0_inv = b[0]
        .inverse()
        .map_err(|_| Error::InvariantBreach("recursive B_1 is singular".into()))?;
    let n = a[last][0].mul(&b0_inv)?;
    let (u, v) = strict_upper_triangularize(&n)?;
    let targets: Vec<(PrimeFieldMatrix, PrimeFieldMatrix)> =
        (1..k).map(|j| (b[j].clone(), a[last][j].clone())).collect();
    let t = find_diagonal(&targets, &u, &v, rng, stats)?;
    m[last] = u.mul(&Matrix::diagonal(f, &t))?.mul(&v)?;

    let mut out = vec![Matrix::zeros(f, r, r); k];
    for (i, mi) in m.into_iter().enumerate() {
        out[perm[i]] = mi;
    }
    Ok(out)
}

/// Invertible `B_1, ..., B_k` with `sum_i B_i L_i = 0`, together with the
/// grid and multipliers used.
#[derive(Clone, Debug)]
pub struct LinearSolution {
    pub a: BlockGrid,
    pub m: Vec<PrimeFieldMatrix>,
    pub b: Vec<PrimeFieldMatrix>,
}

/// Invertible `B_1, ..., B_k` with `sum_i B_i L_i = 0`.
pub fn annihilating_bases(
    blocks: &[PrimeFieldMatrix],
    allow_small_field: bool,
    rng: &mut impl Rng,
    stats: &mut SearchStats,
) -> Result<LinearSolution> {
    let (f, r, n) = check_blocks(blocks)?;
    let k = blocks.len();
    if k < 2 {
        return Err(Error::InvalidArgument("need at least two blocks".into()));
    }
    if (f.p() as usize) < k && !allow_small_field {
        return Err(Error::FieldTooSmall { k, p: f.p() });
    }
    let a = find_A_blocks(blocks)?;
    let (m, b) = if blocks.iter().all(Matrix::is_zero) {
        let id = Matrix::identity(f, r);
        (vec![id.clone(); k], vec![id; k])
    } else {
        let m = invertible_combination(&a, allow_small_field, rng, stats)?;
        let b = combine(&a, &m);
        (m, b)
    };
    let residual = (0..k).try_fold(Matrix::zeros(f, r, n), |acc, j| acc.add(&b[j].mul(&blocks[j])?))?;
    if !residual.is_zero() {
        return Err(Error::InvariantBreach("sum of B_i L_i is not zero".into()));
    }
    Ok(LinearSolution { a, m, b })
}

/// Matrix as a list of rows of residues.
pub type MatrixRows = Vec<Vec<u64>>;

fn rows(m: &PrimeFieldMatrix) -> MatrixRows {
    m.to_rows()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InputLattice {
    pub p: u64,
    pub k: usize,
    pub r: usize,
    pub basis: MatrixRows,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SynthesisChecks {
    pub all_invertible: bool,
    pub residual_zero: bool,
    pub lattice_contained: bool,
    /// `None` when the covering comparison was skipped.
    pub covering_le: Option<bool>,
    pub covering_input: Option<u64>,
    pub covering_output: Option<u64>,
}

impl SynthesisChecks {
    pub fn all_ok(&self) -> bool {
        self.all_invertible && self.residual_zero && self.lattice_contained && self.covering_le != Some(false)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SynthesisCertificate {
    pub input: InputLattice,
    pub seed: u64,
    pub l_blocks: Vec<MatrixRows>,
    pub a_blocks: Vec<Vec<MatrixRows>>,
    pub m_blocks: Vec<MatrixRows>,
    pub b_blocks: Vec<MatrixRows>,
    pub search: SearchStats,
    pub checks: SynthesisChecks,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SynthesisOptions {
    pub seed: u64,
    pub allow_small_field: bool,
    /// Compare covering numbers (enumerates `2^{kr}` vertices twice).
    pub check_covering: bool,
}

impl Default for SynthesisOptions {
    fn default() -> Self {
        SynthesisOptions {
            seed: 0,
            allow_small_field: false,
            check_covering: true,
        }
    }
}

/// A basis system `B` with `L <= L_B`, for a p-oblique `L` with `k <= p`.
pub fn bases_from_lattice(l: &BlockLattice, opts: SynthesisOptions) -> Result<(BasisSystem, SynthesisCertificate)> {
    let verdict = crate::lattice::is_p_oblique(l);
    if !verdict.oblique {
        return Err(Error::NotOblique {
            block: verdict.block.unwrap_or(0),
            witness: verdict.witness.unwrap_or_default(),
        });
    }
    if (l.p() as usize) < l.k() && !opts.allow_small_field {
        return Err(Error::FieldTooSmall { k: l.k(), p: l.p() });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut stats = SearchStats::default();
    let blocks = build_L_blocks(l);
    let sol = annihilating_bases(&blocks, opts.allow_small_field, &mut rng, &mut stats)?;
    let bs = BasisSystem::from_matrices(&sol.b)?;
    let lb = lattice_from_bases(&bs)?;
    let contained = lattice_leq(l, &lb)?;
    let (ci, co) = if opts.check_covering {
        (Some(covering_number(l)?), Some(covering_number(&lb)?))
    } else {
        (None, None)
    };
    let checks = SynthesisChecks {
        all_invertible: sol.b.iter().all(Matrix::is_invertible),
        residual_zero: true,
        lattice_contained: contained,
        covering_le: ci.zip(co).map(|(i, o)| o <= i),
        covering_input: ci,
        covering_output: co,
    };
    if !checks.all_ok() {
        return Err(Error::InvariantBreach(format!("synthesis checks failed: {checks:?}")));
    }
    let cert = SynthesisCertificate {
        input: InputLattice {
            p: l.p(),
            k: l.k(),
            r: l.r(),
            basis: l.basis_rows(),
        },
        seed: opts.seed,
        l_blocks: blocks.iter().map(rows).collect(),
        a_blocks: sol.a.iter().map(|row| row.iter().map(rows).collect()).collect(),
        m_blocks: sol.m.iter().map(rows).collect(),
        b_blocks: sol.b.iter().map(rows).collect(),
        search: stats,
        checks,
    };
    Ok((bs, cert))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::example_lattice;

    fn fp(p: u64) -> Fp {
        Fp::new(p).unwrap()
    }

    fn rng() -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(7)
    }

    #[test]
    fn l_blocks_examples() {
        let l = BlockLattice::scaled(3, 2, 2).unwrap();
        assert!(build_L_blocks(&l).iter().all(Matrix::is_zero));
        let l = example_lattice(2, 1, 5).unwrap();
        let blocks = build_L_blocks(&l);
        assert_eq!(blocks[0].to_rows(), vec![vec![1]]);
        assert_eq!(blocks[1].to_rows(), vec![vec![4]]);
        // stacking the blocks gives back the basis, transposed
        let l = example_lattice(3, 2, 3).unwrap();
        let stacked = Matrix::vstack_all(l.field(), l.dim_w(), &build_L_blocks(&l));
        assert_eq!(stacked.transpose(), *l.basis());
    }

    #[test]
    fn a_blocks_examples() {
        let f = fp(3);
        let id = Matrix::identity(f, 2);
        let grid = find_A_blocks(&[id.clone(), id.clone()]).unwrap();
        assert_eq!(grid[0][0], id.neg());
        assert_eq!(grid[0][1], id);
        assert_eq!(grid[1][0], id);
        let zero = Matrix::zeros(f, 2, 3);
        let grid = find_A_blocks(&[zero.clone(), zero.clone(), zero]).unwrap();
        assert!(grid[0][1].is_zero() && grid[2][0].is_zero());
        assert_eq!(grid[1][1], id.neg());
        // L_1 = [1], L_2 = [0]: not oblique, witness (1, 0)
        let one = Matrix::from_rows(f, &[vec![1]]).unwrap();
        let z = Matrix::zeros(f, 1, 1);
        match find_A_blocks(&[one, z]) {
            Err(Error::NotOblique { block, witness }) => {
                assert_eq!(block, 0);
                assert_eq!(witness, vec![1, 0]);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn lemma_traces() {
        let f = fp(3);
        let id = Matrix::identity(f, 1);
        let grid = vec![vec![id.neg()]];
        let m = invertible_combination(&grid, false, &mut rng(), &mut SearchStats::default()).unwrap();
        assert_eq!(m, vec![id.clone()]);
        let grid = vec![vec![id.neg(), id.clone()], vec![id.clone(), id.neg()]];
        let m = invertible_combination(&grid, false, &mut rng(), &mut SearchStats::default()).unwrap();
        assert_eq!(m, vec![Matrix::zeros(f, 1, 1), id.clone()]);
        assert_eq!(combine(&grid, &m), vec![id.clone(), id.neg()]);
    }

    #[test]
    fn lemma_degenerate_branch() {
        let f = fp(5);
        let id = Matrix::identity(f, 2);
        let z = Matrix::zeros(f, 2, 2);
        let n = Matrix::from_rows(f, &[vec![1, 0], vec![0, 0]]).unwrap();
        let grid = vec![
            vec![id.clone(), n.clone(), z.clone()],
            vec![z.clone(), id.neg(), n.clone()],
            vec![n.clone(), z.clone(), id.scale(&2)],
        ];
        let mut stats = SearchStats::default();
        let m = invertible_combination(&grid, false, &mut rng(), &mut stats).unwrap();
        assert!(stats.levels >= 1);
        assert!(combine(&grid, &m).iter().all(Matrix::is_invertible));
    }

    #[test]
    fn small_field_refused() {
        let f = fp(2);
        let id = Matrix::identity(f, 1);
        let grid = vec![vec![id.clone(); 3]; 3];
        assert!(matches!(
            invertible_combination(&grid, false, &mut rng(), &mut SearchStats::default()),
            Err(Error::FieldTooSmall { k: 3, p: 2 })
        ));
    }

    #[test]
    fn diagonal_with_constant_polynomial() {
        let f = fp(3);
        let id = Matrix::identity(f, 2);
        let z = Matrix::zeros(f, 2, 2);
        let t = find_diagonal(&[(id.clone(), z)], &id, &id, &mut rng(), &mut SearchStats::default()).unwrap();
        assert_eq!(t.len(), 2);
        // det(B + t A) with B = 0, A = I over F_3 and r = 1: t = 0 is the only root
        let one = Matrix::identity(f, 1);
        let zero = Matrix::zeros(f, 1, 1);
        let t = find_diagonal(
            &[(zero, one.clone())],
            &one,
            &one,
            &mut rng(),
            &mut SearchStats::default(),
        )
        .unwrap();
        assert_ne!(t[0], 0);
    }

    #[test]
    fn annihilating_bases_examples() {
        let f = fp(3);
        let id = Matrix::identity(f, 2);
        let sol = annihilating_bases(
            &[id.clone(), id.clone()],
            false,
            &mut rng(),
            &mut SearchStats::default(),
        )
        .unwrap();
        assert_eq!(sol.b[0].add(&sol.b[1]).unwrap(), Matrix::zeros(f, 2, 2));
        assert!(sol.b.iter().all(Matrix::is_invertible));
        let zero = Matrix::zeros(f, 2, 0);
        let sol = annihilating_bases(&[zero.clone(), zero], false, &mut rng(), &mut SearchStats::default()).unwrap();
        assert_eq!(sol.b, vec![id.clone(), id]);
    }

    #[test]
    fn bases_from_example_lattices() {
        for (k, r, p) in [(2, 1, 3), (3, 2, 3), (2, 2, 5), (3, 1, 5)] {
            let l = example_lattice(k, r, p).unwrap();
            let (bs, cert) = bases_from_lattice(&l, SynthesisOptions::default()).unwrap();
            assert!(cert.checks.all_ok());
            let bound = ((k as u64 + 1).pow(r as u32)).min(p.pow(r as u32));
            assert!(covering_number(&lattice_from_bases(&bs).unwrap()).unwrap() <= bound);
        }
        let l = BlockLattice::scaled(3, 2, 2).unwrap();
        let (_, cert) = bases_from_lattice(&l, SynthesisOptions::default()).unwrap();
        assert_eq!(cert.checks.covering_input, Some(16));
        let bad = BlockLattice::integer(3, 2, 1).unwrap();
        assert!(matches!(
            bases_from_lattice(&bad, SynthesisOptions::default()),
            Err(Error::NotOblique { .. })
        ));
        let wide = example_lattice(3, 1, 2).unwrap();
        assert!(matches!(
            bases_from_lattice(&wide, SynthesisOptions::default()),
            Err(Error::FieldTooSmall { .. })
        ));
    }
}
