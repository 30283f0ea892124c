//! The structure-based subspace (SSS) channel estimator.
//!
//! Instead of forcing block-Toeplitz structure and minimizing subspace
//! orthogonality error (the SS route), the filtering matrix is searched for
//! inside the signal subspace as `W = Vs·Q`, and `Q` is chosen to minimize
//! the deviation of `W` from block-Toeplitz structure. The deviation is a
//! sum of three elementwise penalties:
//!
//! * repeated block diagonals: `Σ |W(i,j) - W(i+m, j+1)|²` over the rows of
//!   all block-rows but the last and all columns but the last,
//! * the structurally-zero tail of the first block row: `Σ |W(1:m, L+1:K)|²`,
//! * the structurally-zero head of the first column: `Σ |W(m+1:mM, 1)|²`.
//!
//! Each penalty is also assembled as an explicit operator on `q = vec(Q)`
//! via the identity `vec(AGB) = (Bᵀ ⊗ A) vec(G)`, so the total cost is
//! `‖penalty·q‖²` and the minimizer under `‖q‖ = 1` is the least eigenvector
//! of the operator's Gram matrix. The elementwise form
//! [`structure_cost_direct`] is kept independent of the operator assembly
//! and serves as its oracle. The channel is read back from the minimizing
//! `W` by averaging its repeated diagonal blocks.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{complexify, least_eigenvector, mat_of, vstack, CMatrix, CVector};
use crate::subspace::SubspaceDecomposition;

/// Selector/shift building blocks and the assembled structure-penalty
/// operator for a given signal basis.
///
/// All six selectors are 0/1-valued. The operator blocks act on the
/// column-stacked `q = vec(Q)` of length `K²`; stacked together they have
/// `K·m·2M` rows.
#[derive(Debug, Clone)]
pub struct StructureOperators {
    /// Diagonal `mM x mM` selector keeping the first `m(M-1)` rows.
    pub keep_rows: DMatrix<f64>,
    /// Diagonal `K x K` selector keeping the first `K-1` columns.
    pub keep_cols: DMatrix<f64>,
    /// `mM x mM` shift aligning row `i` with row `i+m` (ones at `(i, i+m)`).
    pub shift_rows: DMatrix<f64>,
    /// `K x K` shift aligning column `j` with column `j+1` (ones at `(j+1, j)`).
    pub shift_cols: DMatrix<f64>,
    /// Diagonal `K x K` mask of the columns beyond `L` (zero in the first
    /// block row of a block-Toeplitz matrix).
    pub tail_col_mask: DMatrix<f64>,
    /// Diagonal `K x K` mask selecting only the first column.
    pub first_col_mask: DMatrix<f64>,
    /// Block-diagonal repetition penalty, `(K·mM) x K²`.
    pub diag_repeat_op: CMatrix,
    /// First-block-row tail-zero penalty, `(K·m) x K²`.
    pub head_zero_op: CMatrix,
    /// First-column zero penalty, `(K·m(M-1)) x K²`.
    pub col_zero_op: CMatrix,
    /// The three blocks stacked vertically.
    pub penalty: CMatrix,
    n_channels: usize,
    window: usize,
    n_taps: usize,
}

impl StructureOperators {
    pub fn n_channels(&self) -> usize {
        self.n_channels
    }

    pub fn window(&self) -> usize {
        self.window
    }

    pub fn n_taps(&self) -> usize {
        self.n_taps
    }

    /// Signal dimension `K = M + L - 1`.
    pub fn signal_dim(&self) -> usize {
        self.window + self.n_taps - 1
    }
}

/// Assembles the structure-penalty operators for the signal basis `vs`
/// (`mM x K`, any matrix with that shape).
pub fn build_structure_operators(
    vs: &CMatrix,
    n_channels: usize,
    window: usize,
    n_taps: usize,
) -> Result<StructureOperators> {
    let dim = n_channels * window;
    let k_dim = window + n_taps - 1;
    if vs.nrows() != dim || vs.ncols() != k_dim {
        return Err(Error::Dimension(format!(
            "signal basis must be {dim}x{k_dim}, got {}x{}",
            vs.nrows(),
            vs.ncols()
        )));
    }

    let mut keep_rows = DMatrix::<f64>::zeros(dim, dim);
    for i in 0..n_channels * (window - 1) {
        keep_rows[(i, i)] = 1.0;
    }
    let mut keep_cols = DMatrix::<f64>::zeros(k_dim, k_dim);
    for j in 0..k_dim - 1 {
        keep_cols[(j, j)] = 1.0;
    }
    let mut shift_rows = DMatrix::<f64>::zeros(dim, dim);
    for i in 0..dim - n_channels {
        shift_rows[(i, i + n_channels)] = 1.0;
    }
    let mut shift_cols = DMatrix::<f64>::zeros(k_dim, k_dim);
    for j in 0..k_dim - 1 {
        shift_cols[(j + 1, j)] = 1.0;
    }
    let mut tail_col_mask = DMatrix::<f64>::zeros(k_dim, k_dim);
    for j in n_taps..k_dim {
        tail_col_mask[(j, j)] = 1.0;
    }
    let mut first_col_mask = DMatrix::<f64>::zeros(k_dim, k_dim);
    first_col_mask[(0, 0)] = 1.0;

    // vec(A·W·B) = (Bᵀ ⊗ A)·vec(W) with vec(W) = (I_K ⊗ Vs)·q.
    let diff = keep_cols.kronecker(&keep_rows) - shift_cols.transpose().kronecker(&shift_rows);
    let embed = complexify(&DMatrix::<f64>::identity(k_dim, k_dim)).kronecker(vs);
    let diag_repeat_op = complexify(&diff) * &embed;

    let vs_head = vs.rows(0, n_channels).into_owned();
    let head_zero_op = complexify(&tail_col_mask).kronecker(&vs_head);

    let vs_tail = vs.rows(n_channels, dim - n_channels).into_owned();
    let col_zero_op = complexify(&first_col_mask).kronecker(&vs_tail);

    let penalty = vstack(&[&diag_repeat_op, &head_zero_op, &col_zero_op]);
    Ok(StructureOperators {
        keep_rows,
        keep_cols,
        shift_rows,
        shift_cols,
        tail_col_mask,
        first_col_mask,
        diag_repeat_op,
        head_zero_op,
        col_zero_op,
        penalty,
        n_channels,
        window,
        n_taps,
    })
}

/// Elementwise block-Toeplitz deviation of a candidate `mM x K` matrix:
/// the sum of squared differences between vertically repeated diagonal
/// blocks plus the squared moduli on the structurally-zero positions.
///
/// This is the brute-force reference for the operator assembly and stays
/// independent of it.
pub fn structure_cost_direct(w: &CMatrix, n_channels: usize, window: usize, n_taps: usize) -> f64 {
    let dim = n_channels * window;
    let k_dim = window + n_taps - 1;
    assert_eq!(w.nrows(), dim, "candidate must have mM rows");
    assert_eq!(w.ncols(), k_dim, "candidate must have M+L-1 columns");

    let mut cost = 0.0;
    // Repeated diagonal blocks: entry (i, j) must equal (i+m, j+1).
    for j in 0..k_dim - 1 {
        for i in 0..n_channels * (window - 1) {
            cost += (w[(i, j)] - w[(i + n_channels, j + 1)]).norm_sqr();
        }
    }
    // Zero tail of the first block row.
    for i in 0..n_channels {
        for j in n_taps..k_dim {
            cost += w[(i, j)].norm_sqr();
        }
    }
    // Zero head of the first column.
    for i in n_channels..dim {
        cost += w[(i, 0)].norm_sqr();
    }
    cost
}

/// Reads the channel out of an approximately block-Toeplitz matrix by
/// averaging each tap's `M` repeated block positions. Exact when the input
/// is an actual filtering matrix.
pub fn average_diagonal_blocks(
    w: &CMatrix,
    n_channels: usize,
    window: usize,
    n_taps: usize,
) -> CVector {
    assert_eq!(w.nrows(), n_channels * window);
    assert_eq!(w.ncols(), window + n_taps - 1);
    let mut h = CVector::zeros(n_channels * n_taps);
    for k in 0..n_taps {
        for r in 0..window {
            for i in 0..n_channels {
                h[k * n_channels + i] += w[(r * n_channels + i, r + k)];
            }
        }
    }
    h / Complex64::new(window as f64, 0.0)
}

/// SSS solution: the minimizing unit vector `q`, its `K x K` reshape, the
/// reconstructed filtering-matrix candidate `W = Vs·Q`, the recovered
/// stacked channel, and the smallest eigenvalue of the penalty Gram matrix
/// as a residual diagnostic.
#[derive(Debug, Clone)]
pub struct SssSolution {
    pub q: CVector,
    pub q_mat: CMatrix,
    pub w_hat: CMatrix,
    pub h_hat: CVector,
    pub residual: f64,
}

/// Runs the SSS estimator on a subspace decomposition.
pub fn solve_sss(dec: &SubspaceDecomposition) -> Result<SssSolution> {
    let k_dim = dec.signal_dim();
    if k_dim < 2 {
        return Err(Error::InvalidParameter(
            "SSS needs K = M+L-1 >= 2".into(),
        ));
    }
    let ops = build_structure_operators(dec.vs(), dec.n_channels(), dec.window(), dec.n_taps())?;
    let gram = ops.penalty.ad_mul(&ops.penalty);
    let gram = (&gram + gram.adjoint()) * Complex64::new(0.5, 0.0);
    let (residual, q) = least_eigenvector(&gram)?;
    let q_mat = mat_of(&q, k_dim, k_dim);
    let w_hat = dec.vs() * &q_mat;
    let h_hat = average_diagonal_blocks(&w_hat, dec.n_channels(), dec.window(), dec.n_taps());
    Ok(SssSolution {
        q,
        q_mat,
        w_hat,
        h_hat,
        residual,
    })
}
