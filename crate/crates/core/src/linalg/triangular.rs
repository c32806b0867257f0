use super::field::Field;
use super::matrix::Matrix;
use crate::error::{Error, Result};

/// For a singular square `n`, returns invertible `(u, v)` such that
/// `v * n * u` is strictly upper triangular.
///
/// `v` is the row-reduction transform, so `v * n` is the RREF with pivot
/// rows `0..s`. The columns of `u` are a kernel basis followed by the unit
/// vectors at the pivot columns, which sends pivot `i` to position
/// `(i, r - s + i)`; that is strictly above the diagonal because `s < r`.
pub fn strict_upper_triangularize<F: Field>(n: &Matrix<F>) -> Result<(Matrix<F>, Matrix<F>)> {
    if !n.is_square() {
        return Err(Error::DimensionMismatch(
            "strict triangularization needs a square matrix".into(),
        ));
    }
    let r = n.rows();
    let rref = n.rref();
    let s = rref.rank();
    if s == r {
        return Err(Error::Nonsingular);
    }
    let f = n.field().clone();
    let kernel = n.nullspace();
    debug_assert_eq!(kernel.len(), r - s);
    let mut u = Matrix::zeros(f.clone(), r, r);
    for (j, v) in kernel.iter().enumerate() {
        for (i, x) in v.iter().enumerate() {
            u.set(i, j, x.clone());
        }
    }
    for (i, &pc) in rref.pivots.iter().enumerate() {
        u.set(pc, r - s + i, f.one());
    }
    Ok((u, rref.transform))
}

#[cfg(test)]
mod tests {
    use super::super::field::Fp;
    use super::*;

    #[test]
    fn zero_matrix_needs_nothing() {
        let f = Fp::new(5).unwrap();
        let (u, v) = strict_upper_triangularize(&Matrix::zeros(f, 3, 3)).unwrap();
        assert_eq!(u, Matrix::identity(f, 3));
        assert_eq!(v, Matrix::identity(f, 3));
    }

    #[test]
    fn rank_one_corner() {
        let f = Fp::new(3).unwrap();
        let n = Matrix::from_rows(f, &[vec![1, 0], vec![0, 0]]).unwrap();
        let (u, v) = strict_upper_triangularize(&n).unwrap();
        let t = v.mul(&n).unwrap().mul(&u).unwrap();
        assert_eq!(t, Matrix::from_rows(f, &[vec![0, 1], vec![0, 0]]).unwrap());
    }

    #[test]
    fn nonsingular_rejected() {
        let f = Fp::new(3).unwrap();
        assert!(matches!(
            strict_upper_triangularize(&Matrix::identity(f, 2)),
            Err(Error::Nonsingular)
        ));
    }
}
