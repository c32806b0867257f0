use std::fmt;
use std::ops::Range;

use super::field::Field;
use crate::error::{Error, Result};

/// Dense row-major matrix over a runtime field. Zero-sized shapes are
/// allowed so that an empty generator set is still a matrix.
#[derive(Clone, PartialEq)]
pub struct Matrix<F: Field> {
    field: F,
    rows: usize,
    cols: usize,
    data: Vec<F::Elem>,
}

/// Reduced row echelon form with the row operations that produced it:
/// `transform * original = reduced`.
#[derive(Clone, Debug)]
pub struct Rref<F: Field> {
    pub reduced: Matrix<F>,
    pub transform: Matrix<F>,
    pub pivots: Vec<usize>,
}

impl<F: Field> Rref<F> {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }
}

impl<F: Field> Matrix<F> {
    pub fn zeros(field: F, rows: usize, cols: usize) -> Self {
        let z = field.zero();
        Matrix {
            data: vec![z; rows * cols],
            field,
            rows,
            cols,
        }
    }

    pub fn identity(field: F, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.data[i * n + i] = m.field.one();
        }
        m
    }

    pub fn from_fn(field: F, rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> F::Elem) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix {
            field,
            rows,
            cols,
            data,
        }
    }

    pub fn from_rows(field: F, rows: &[Vec<F::Elem>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        Ok(Matrix {
            field,
            rows: rows.len(),
            cols,
            data: rows.iter().flatten().cloned().collect(),
        })
    }

    pub fn diagonal(field: F, diag: &[F::Elem]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(field, n, n);
        for (i, d) in diag.iter().enumerate() {
            m.data[i * n + i] = d.clone();
        }
        m
    }

    #[inline]
    pub fn field(&self) -> &F {
        &self.field
    }
    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }
    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> &F::Elem {
        &self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: F::Elem) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[F::Elem] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<F::Elem> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<F::Elem>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| self.field.is_zero(x))
    }

    pub fn transpose(&self) -> Self {
        Matrix::from_fn(self.field.clone(), self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn submatrix(&self, rows: Range<usize>, cols: Range<usize>) -> Self {
        let (r0, c0) = (rows.start, cols.start);
        Matrix::from_fn(self.field.clone(), rows.len(), cols.len(), |i, j| {
            self.get(r0 + i, c0 + j).clone()
        })
    }

    /// Keeps the listed columns, in the listed order.
    pub fn select_columns(&self, cols: &[usize]) -> Self {
        Matrix::from_fn(self.field.clone(), self.rows, cols.len(), |i, j| {
            self.get(i, cols[j]).clone()
        })
    }

    /// Stacks `parts` vertically; every part must have `cols` columns.
    pub fn vstack_all(field: F, cols: usize, parts: &[Matrix<F>]) -> Self {
        let rows = parts.iter().map(|m| m.rows).sum();
        let mut data = Vec::with_capacity(rows * cols);
        for m in parts {
            debug_assert_eq!(m.cols, cols);
            data.extend(m.data.iter().cloned());
        }
        Matrix {
            field,
            rows,
            cols,
            data,
        }
    }

    pub fn vstack(&self, other: &Self) -> Result<Self> {
        if self.cols != other.cols {
            return Err(Error::DimensionMismatch("vstack column counts differ".into()));
        }
        Ok(Self::vstack_all(
            self.field.clone(),
            self.cols,
            &[self.clone(), other.clone()],
        ))
    }

    pub fn hstack(&self, other: &Self) -> Result<Self> {
        if self.rows != other.rows {
            return Err(Error::DimensionMismatch("hstack row counts differ".into()));
        }
        Ok(Matrix::from_fn(
            self.field.clone(),
            self.rows,
            self.cols + other.cols,
            |i, j| {
                if j < self.cols {
                    self.get(i, j).clone()
                } else {
                    other.get(i, j - self.cols).clone()
                }
            },
        ))
    }

    fn same_shape(&self, other: &Self) -> Result<()> {
        if self.rows != other.rows || self.cols != other.cols || self.field != other.field {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_shape(other)?;
        let f = &self.field;
        Ok(Matrix {
            field: f.clone(),
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| f.add(a, b)).collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.same_shape(other)?;
        let f = &self.field;
        Ok(Matrix {
            field: f.clone(),
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| f.sub(a, b)).collect(),
        })
    }

    pub fn neg(&self) -> Self {
        let f = &self.field;
        Matrix {
            field: f.clone(),
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| f.neg(a)).collect(),
        }
    }

    pub fn scale(&self, c: &F::Elem) -> Self {
        let f = &self.field;
        Matrix {
            field: f.clone(),
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| f.mul(a, c)).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows || self.field != other.field {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let f = &self.field;
        let mut out = Matrix::zeros(f.clone(), self.rows, other.cols);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = self.get(i, l);
                if f.is_zero(a) {
                    continue;
                }
                for j in 0..other.cols {
                    let prod = f.mul(a, other.get(l, j));
                    let cell = &mut out.data[i * other.cols + j];
                    *cell = f.add(cell, &prod);
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[F::Elem]) -> Result<Vec<F::Elem>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch("vector length".into()));
        }
        let f = &self.field;
        Ok((0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(f.zero(), |acc, (a, b)| f.add(&acc, &f.mul(a, b)))
            })
            .collect())
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn scale_row(&mut self, i: usize, c: &F::Elem) {
        for j in 0..self.cols {
            let v = self.field.mul(self.get(i, j), c);
            self.set(i, j, v);
        }
    }

    // row[dst] -= c * row[src]
    fn eliminate(&mut self, dst: usize, src: usize, c: &F::Elem) {
        for j in 0..self.cols {
            let s = self.get(src, j);
            if self.field.is_zero(s) {
                continue;
            }
            let v = self.field.sub(self.get(dst, j), &self.field.mul(c, s));
            self.set(dst, j, v);
        }
    }

    /// Gauss-Jordan reduction restricted to pivots in the first `pivot_cols`
    /// columns, applied to `self` and mirrored on `tracker`.
    fn reduce_with(&mut self, pivot_cols: usize, tracker: Option<&mut Matrix<F>>) -> Vec<usize> {
        let mut tracker = tracker;
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..pivot_cols {
            if row == self.rows {
                break;
            }
            let Some(pr) = (row..self.rows).find(|&i| !self.field.is_zero(self.get(i, col))) else {
                continue;
            };
            self.swap_rows(row, pr);
            if let Some(t) = tracker.as_deref_mut() {
                t.swap_rows(row, pr);
            }
            let inv = self.field.inv(self.get(row, col));
            self.scale_row(row, &inv);
            if let Some(t) = tracker.as_deref_mut() {
                t.scale_row(row, &inv);
            }
            for i in 0..self.rows {
                if i == row {
                    continue;
                }
                let c = self.get(i, col).clone();
                if self.field.is_zero(&c) {
                    continue;
                }
                self.eliminate(i, row, &c);
                if let Some(t) = tracker.as_deref_mut() {
                    t.eliminate(i, row, &c);
                }
            }
            pivots.push(col);
            row += 1;
        }
        pivots
    }

    pub fn rref(&self) -> Rref<F> {
        let mut reduced = self.clone();
        let mut transform = Matrix::identity(self.field.clone(), self.rows);
        let pivots = reduced.reduce_with(self.cols, Some(&mut transform));
        Rref {
            reduced,
            transform,
            pivots,
        }
    }

    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        m.reduce_with(self.cols, None).len()
    }

    pub fn inverse(&self) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch("inverse of a non-square matrix".into()));
        }
        let r = self.rref();
        if r.rank() < self.rows {
            return Err(Error::Singular);
        }
        Ok(r.transform)
    }

    pub fn is_invertible(&self) -> bool {
        self.is_square() && self.rank() == self.rows
    }

    pub fn det(&self) -> Result<F::Elem> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch("determinant of a non-square matrix".into()));
        }
        let f = self.field.clone();
        let mut m = self.clone();
        let n = self.rows;
        let mut det = f.one();
        for col in 0..n {
            let Some(pr) = (col..n).find(|&i| !f.is_zero(m.get(i, col))) else {
                return Ok(f.zero());
            };
            if pr != col {
                m.swap_rows(col, pr);
                det = f.neg(&det);
            }
            let pivot = m.get(col, col).clone();
            det = f.mul(&det, &pivot);
            let inv = f.inv(&pivot);
            for i in col + 1..n {
                let c = f.mul(m.get(i, col), &inv);
                if !f.is_zero(&c) {
                    m.eliminate(i, col, &c);
                }
            }
        }
        Ok(det)
    }

    /// A solution `X` of `self * X = rhs` with free variables set to zero.
    pub fn solve(&self, rhs: &Self) -> Result<Self> {
        if rhs.rows != self.rows {
            return Err(Error::DimensionMismatch("right-hand side row count".into()));
        }
        let mut aug = self.hstack(rhs)?;
        let pivots = aug.reduce_with(self.cols, None);
        let f = &self.field;
        for i in pivots.len()..self.rows {
            if (self.cols..aug.cols).any(|j| !f.is_zero(aug.get(i, j))) {
                return Err(Error::Inconsistent);
            }
        }
        let mut x = Matrix::zeros(f.clone(), self.cols, rhs.cols);
        for (i, &pc) in pivots.iter().enumerate() {
            for j in 0..rhs.cols {
                x.set(pc, j, aug.get(i, self.cols + j).clone());
            }
        }
        Ok(x)
    }

    pub fn solve_vec(&self, b: &[F::Elem]) -> Result<Vec<F::Elem>> {
        let rhs = Matrix::from_fn(self.field.clone(), b.len(), 1, |i, _| b[i].clone());
        Ok(self.solve(&rhs)?.column(0))
    }

    /// Basis of the right kernel `{x : self * x = 0}`, one vector per free
    /// column (the free coordinate set to one).
    pub fn nullspace(&self) -> Vec<Vec<F::Elem>> {
        let r = self.rref();
        let f = &self.field;
        let free: Vec<usize> = (0..self.cols).filter(|c| !r.pivots.contains(c)).collect();
        free.iter()
            .map(|&fc| {
                let mut v = vec![f.zero(); self.cols];
                v[fc] = f.one();
                for (i, &pc) in r.pivots.iter().enumerate() {
                    v[pc] = f.neg(r.reduced.get(i, fc));
                }
                v
            })
            .collect()
    }

    /// Basis of the row space (non-zero rows of the RREF) and its pivots.
    pub fn row_basis(&self) -> (Self, Vec<usize>) {
        let r = self.rref();
        let k = r.rank();
        (r.reduced.submatrix(0..k, 0..self.cols), r.pivots)
    }

    /// Zero on and below the main diagonal.
    pub fn is_strictly_upper_triangular(&self) -> bool {
        (0..self.rows).all(|i| (0..self.cols.min(i + 1)).all(|j| self.field.is_zero(self.get(i, j))))
    }
}

impl<F: Field> fmt::Debug for Matrix<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries((0..self.rows).map(|i| self.row(i))).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::super::field::{Fp, Rationals};
    use super::*;

    fn fp(p: u64, rows: &[Vec<u64>]) -> Matrix<Fp> {
        Matrix::from_rows(Fp::new(p).unwrap(), rows).unwrap()
    }

    #[test]
    fn identity_examples() {
        let f = Fp::new(7).unwrap();
        for n in 1..5 {
            let i = Matrix::identity(f, n);
            assert_eq!(i.rank(), n);
            assert_eq!(i.inverse().unwrap(), i);
            let b: Vec<u64> = (0..n as u64).collect();
            assert_eq!(i.solve_vec(&b).unwrap(), b);
        }
    }

    #[test]
    fn singular_mod_three() {
        let m = fp(3, &[vec![1, 2], vec![2, 1]]);
        assert_eq!(m.det().unwrap(), 0);
        assert_eq!(m.rank(), 1);
        assert!(matches!(m.inverse(), Err(Error::Singular)));
        // invertible mod 5: det = -3
        let m = fp(5, &[vec![1, 2], vec![2, 1]]);
        assert_eq!(m.det().unwrap(), 2);
        let inv = m.inverse().unwrap();
        assert_eq!(inv.mul(&m).unwrap(), Matrix::identity(*m.field(), 2));
    }

    #[test]
    fn exhaustive_two_by_two_inverses() {
        for p in [2u64, 3] {
            let f = Fp::new(p).unwrap();
            for code in 0..p.pow(4) {
                let d: Vec<u64> = (0..4).map(|i| code / p.pow(i) % p).collect();
                let m = fp(p, &[vec![d[0], d[1]], vec![d[2], d[3]]]);
                let det = (d[0] * d[3] + p * p - d[1] * d[2]) % p;
                assert_eq!(m.det().unwrap(), det);
                match m.inverse() {
                    Ok(inv) => {
                        assert_ne!(det, 0);
                        assert_eq!(inv.mul(&m).unwrap(), Matrix::identity(f, 2));
                    }
                    Err(Error::Singular) => assert_eq!(det, 0),
                    Err(e) => panic!("{e}"),
                }
            }
        }
    }

    #[test]
    fn inconsistent_system() {
        let m = fp(5, &[vec![1, 1], vec![2, 2]]);
        assert!(matches!(m.solve_vec(&[1, 3]), Err(Error::Inconsistent)));
        let x = m.solve_vec(&[1, 2]).unwrap();
        assert_eq!(m.mul_vec(&x).unwrap(), vec![1, 2]);
    }

    #[test]
    fn nullspace_is_kernel() {
        let m = fp(5, &[vec![1, 2, 3, 4], vec![2, 4, 1, 0]]);
        let ns = m.nullspace();
        assert_eq!(ns.len(), 4 - m.rank());
        for v in &ns {
            assert!(m.mul_vec(v).unwrap().iter().all(|&x| x == 0));
        }
    }

    #[test]
    fn rref_transform_reproduces() {
        let m = fp(7, &[vec![0, 3, 1], vec![2, 1, 5], vec![2, 4, 6]]);
        let r = m.rref();
        assert_eq!(r.transform.mul(&m).unwrap(), r.reduced);
        assert!(r.transform.is_invertible());
    }

    #[test]
    fn rational_matrix() {
        let q = Rationals;
        let m = Matrix::from_fn(q, 3, 3, |i, j| q.from_i64(((i + 1) * (j + 2)) as i64 + (i == j) as i64));
        let inv = m.inverse().unwrap();
        assert_eq!(inv.mul(&m).unwrap(), Matrix::identity(q, 3));
        let sing = Matrix::from_fn(q, 2, 2, |i, j| q.from_i64((i + 1) as i64 * (j + 1) as i64));
        assert_eq!(sing.rank(), 1);
    }

    #[test]
    fn strict_upper_detection() {
        assert!(fp(3, &[vec![0, 1], vec![0, 0]]).is_strictly_upper_triangular());
        assert!(!fp(3, &[vec![1, 1], vec![0, 0]]).is_strictly_upper_triangular());
        assert!(!fp(3, &[vec![0, 1], vec![2, 0]]).is_strictly_upper_triangular());
    }
}
