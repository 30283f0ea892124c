//! Shared dense linear-algebra helpers: Hermitian eigendecomposition with a
//! deterministic ordering, the least-eigenvector solver used by both
//! estimators, and the column-stacking `vec`/`mat` maps.

use nalgebra::linalg::SymmetricEigen;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Iteration cap handed to the tridiagonal QL sweep; generous for the matrix
/// sizes used here (n ≤ a few hundred).
const EIGEN_MAX_ITER: usize = 100_000;

/// Eigendecomposition of a Hermitian matrix.
///
/// Returns the real eigenvalues sorted in non-increasing order together with
/// the matching eigenvector columns. The sort is stable, so exact ties keep
/// the solver's original order. Non-convergence is reported as an error
/// rather than returning partial results.
pub fn hermitian_eigen(a: &CMatrix) -> Result<(Vec<f64>, CMatrix)> {
    if !a.is_square() {
        return Err(Error::Dimension(format!(
            "expected square matrix, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    let eig = SymmetricEigen::try_new(a.clone(), f64::EPSILON, EIGEN_MAX_ITER)
        .ok_or(Error::EigenNonConvergence)?;

    let n = a.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        eig.eigenvalues[j]
            .partial_cmp(&eig.eigenvalues[i])
            .unwrap_or(std::cmp::Ordering::Equal)
    });

    let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = CMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    Ok((values, vectors))
}

/// Unit-norm eigenvector of the smallest eigenvalue of a Hermitian matrix,
/// together with that eigenvalue.
///
/// The phase is fixed deterministically: the first entry whose modulus
/// exceeds `1e-8 * ||v||` is rotated to be real and positive.
pub fn least_eigenvector(a: &CMatrix) -> Result<(f64, CVector)> {
    let (values, vectors) = hermitian_eigen(a)?;
    let idx = values.len() - 1;
    let mut v: CVector = vectors.column(idx).into_owned();
    let norm = v.norm();
    if norm > 0.0 {
        v /= Complex64::new(norm, 0.0);
    }
    fix_phase(&mut v);
    Ok((values[idx], v))
}

/// Rotates a vector by a global phase so that its first significant entry is
/// real and positive. No-op on the zero vector.
pub fn fix_phase(v: &mut CVector) {
    let norm = v.norm();
    let threshold = 1e-8 * norm;
    if let Some(pivot) = v.iter().find(|c| c.norm() > threshold) {
        let phase = pivot / pivot.norm();
        let rot = phase.conj();
        for c in v.iter_mut() {
            *c *= rot;
        }
    }
}

/// Column-stacking map: flattens a matrix into a vector, columns first.
pub fn vec_of(m: &CMatrix) -> CVector {
    CVector::from_column_slice(m.as_slice())
}

/// Inverse of [`vec_of`]: reshapes a column-stacked vector into an
/// `rows x cols` matrix.
pub fn mat_of(v: &CVector, rows: usize, cols: usize) -> CMatrix {
    assert_eq!(v.len(), rows * cols, "vector length must equal rows*cols");
    CMatrix::from_column_slice(rows, cols, v.as_slice())
}

/// Stacks blocks vertically. All blocks must share the same column count.
pub fn vstack(blocks: &[&CMatrix]) -> CMatrix {
    assert!(!blocks.is_empty());
    let ncols = blocks[0].ncols();
    let nrows: usize = blocks.iter().map(|b| b.nrows()).sum();
    let mut out = CMatrix::zeros(nrows, ncols);
    let mut row = 0;
    for b in blocks {
        assert_eq!(b.ncols(), ncols, "column counts must match");
        out.view_mut((row, 0), (b.nrows(), b.ncols())).copy_from(b);
        row += b.nrows();
    }
    out
}

/// Maps a real matrix to a complex one entrywise.
pub fn complexify(m: &DMatrix<f64>) -> CMatrix {
    m.map(|x| Complex64::new(x, 0.0))
}
