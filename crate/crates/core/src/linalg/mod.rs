//! Exact linear algebra over prime fields and the rationals.
//!
//! Everything is Gauss-Jordan with first-nonzero pivoting, so outputs are
//! deterministic for a fixed input order.

mod field;
mod matrix;
mod triangular;

pub use field::{is_prime, Field, Fp, Rationals};
pub use matrix::{Matrix, Rref};
pub use triangular::strict_upper_triangularize;

use crate::error::{Error, Result};

pub type PrimeFieldMatrix = Matrix<Fp>;
pub type RationalMatrix = Matrix<Rationals>;

/// Which field a list of integer vectors is read in.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FieldKind {
    Prime(u64),
    Rationals,
}

/// Span dimension of `vectors` together with a maximal independent sublist,
/// chosen greedily in the given order (returned as positions).
pub fn rank_of_vectors(vectors: &[Vec<i64>], field: FieldKind) -> Result<(usize, Vec<usize>)> {
    let Some(first) = vectors.first() else {
        return Ok((0, Vec::new()));
    };
    let dim = first.len();
    if vectors.iter().any(|v| v.len() != dim) {
        return Err(Error::DimensionMismatch("vectors of different lengths".into()));
    }
    // vectors as columns: pivot columns of the RREF are the greedy choice
    match field {
        FieldKind::Prime(p) => {
            let f = Fp::new(p)?;
            let m = Matrix::from_fn(f, dim, vectors.len(), |i, j| f.reduce(vectors[j][i]));
            let pivots = m.rref().pivots;
            Ok((pivots.len(), pivots))
        }
        FieldKind::Rationals => {
            let f = Rationals;
            let m = Matrix::from_fn(f, dim, vectors.len(), |i, j| f.from_i64(vectors[j][i]));
            let pivots = m.rref().pivots;
            Ok((pivots.len(), pivots))
        }
    }
}

/// Finds `A_0, ..., A_{s-1}` (each `r x r`) with `target = sum_j A_j sources[j]`.
///
/// Fails with [`Error::Inconsistent`] when some row of `target` is outside the
/// row space spanned by all sources. The particular solution sets free
/// variables to zero.
pub fn rowspace_inclusion_solve(
    target: &PrimeFieldMatrix,
    sources: &[PrimeFieldMatrix],
) -> Result<Vec<PrimeFieldMatrix>> {
    let f = *target.field();
    let n = target.cols();
    for s in sources {
        if s.cols() != n || s.field() != &f {
            return Err(Error::DimensionMismatch(
                "sources must have as many columns as the target".into(),
            ));
        }
    }
    let stacked = Matrix::vstack_all(f, n, sources);
    // X * stacked = target  <=>  stacked^T * X^T = target^T
    let xt = stacked.transpose().solve(&target.transpose())?;
    let x = xt.transpose();
    let mut out = Vec::with_capacity(sources.len());
    let mut col = 0;
    for s in sources {
        out.push(x.submatrix(0..x.rows(), col..col + s.rows()));
        col += s.rows();
    }
    Ok(out)
}
