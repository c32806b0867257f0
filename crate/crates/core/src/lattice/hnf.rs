//! Column Hermite normal form of full-rank integer lattices.

use crate::error::{Error, Result};

/// Lower-triangular basis `H` (columns are lattice vectors) with a positive
/// diagonal and `0 <= H[i][j] < H[i][i]` for `j < i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hnf {
    // h[i][j]: row i, column j
    h: Vec<Vec<i128>>,
}

fn ck(v: Option<i128>) -> Result<i128> {
    v.ok_or(Error::Overflow("Hermite normal form entry"))
}

fn egcd(a: i128, b: i128) -> (i128, i128, i128) {
    let (mut old_r, mut r) = (a, b);
    let (mut old_s, mut s) = (1i128, 0i128);
    let (mut old_t, mut t) = (0i128, 1i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
        (old_t, t) = (t, old_t - q * t);
    }
    (old_r, old_s, old_t)
}

impl Hnf {
    /// HNF of the lattice spanned by `generators` (each of length `dim`).
    /// Fails with [`Error::RankDeficient`] when they do not span a rank-`dim`
    /// lattice.
    pub fn from_generators(dim: usize, generators: &[Vec<i64>]) -> Result<Self> {
        if generators.iter().any(|g| g.len() != dim) {
            return Err(Error::DimensionMismatch("generator length".into()));
        }
        let m = generators.len();
        if m < dim {
            return Err(Error::RankDeficient);
        }
        // column-major working copy: cols[j][i]
        let mut cols: Vec<Vec<i128>> = generators
            .iter()
            .map(|g| g.iter().map(|&x| x as i128).collect())
            .collect();
        for i in 0..dim {
            let Some(nz) = (i..m).find(|&j| cols[j][i] != 0) else {
                return Err(Error::RankDeficient);
            };
            cols.swap(i, nz);
            for j in i + 1..m {
                if cols[j][i] == 0 {
                    continue;
                }
                let (a, b) = (cols[i][i], cols[j][i]);
                let (g, x, y) = egcd(a, b);
                let (ag, bg) = (a / g, b / g);
                let mut new_i = vec![0i128; dim];
                let mut new_j = vec![0i128; dim];
                for row in i..dim {
                    let (ci, cj) = (cols[i][row], cols[j][row]);
                    new_i[row] = ck(ck(x.checked_mul(ci))?.checked_add(ck(y.checked_mul(cj))?))?;
                    new_j[row] = ck(ck(ag.checked_mul(cj))?.checked_sub(ck(bg.checked_mul(ci))?))?;
                }
                cols[i][i..].copy_from_slice(&new_i[i..]);
                cols[j][i..].copy_from_slice(&new_j[i..]);
                debug_assert_eq!(cols[j][i], 0);
            }
            if cols[i][i] < 0 {
                for v in cols[i].iter_mut() {
                    *v = -*v;
                }
            }
            let d = cols[i][i];
            for j in 0..i {
                let q = cols[j][i].div_euclid(d);
                if q != 0 {
                    for row in i..dim {
                        cols[j][row] = ck(cols[j][row].checked_sub(ck(q.checked_mul(cols[i][row]))?))?;
                    }
                }
            }
        }
        let h = (0..dim).map(|i| (0..dim).map(|j| cols[j][i]).collect()).collect();
        Ok(Hnf { h })
    }

    pub fn dim(&self) -> usize {
        self.h.len()
    }

    pub fn entry(&self, i: usize, j: usize) -> i128 {
        self.h[i][j]
    }

    pub fn diagonal(&self) -> Vec<i128> {
        (0..self.dim()).map(|i| self.h[i][i]).collect()
    }

    pub fn det(&self) -> Result<i128> {
        self.diagonal()
            .into_iter()
            .try_fold(1i128, |acc, d| acc.checked_mul(d))
            .ok_or(Error::Overflow("lattice determinant"))
    }

    /// Canonical coset representative: `0 <= out[i] < H[i][i]`.
    pub fn reduce(&self, v: &mut [i128]) {
        self.reduce_from(v, 0);
    }

    /// Reduction assuming coordinates before `start` are already reduced
    /// and untouched.
    pub fn reduce_from(&self, v: &mut [i128], start: usize) {
        let n = self.dim();
        for i in start..n {
            let d = self.h[i][i];
            let q = v[i].div_euclid(d);
            if q != 0 {
                for (row, x) in v.iter_mut().enumerate().skip(i) {
                    *x -= q * self.h[row][i];
                }
            }
        }
    }

    pub fn contains(&self, v: &[i64]) -> bool {
        let mut w: Vec<i128> = v.iter().map(|&x| x as i128).collect();
        self.reduce(&mut w);
        w.iter().all(|&x| x == 0)
    }

    pub fn is_canonical(&self) -> bool {
        let n = self.dim();
        (0..n).all(|i| {
            self.h[i][i] > 0
                && (i + 1..n).all(|j| self.h[i][j] == 0)
                && (0..i).all(|j| (0..self.h[i][i]).contains(&self.h[i][j]))
        })
    }
}
