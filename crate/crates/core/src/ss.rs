//! The standard noise-subspace (SS) channel estimator.
//!
//! Each noise eigenvector `v` of the stacked-data covariance is rearranged
//! into a banded matrix `V` so that the orthogonality error between the
//! candidate filtering matrix and the noise subspace becomes the quadratic
//! form `hᴴ [Σ V_i V_iᴴ] h` in the stacked channel vector; the estimate is
//! the least eigenvector of that form.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{least_eigenvector, CMatrix, CVector};
use crate::subspace::SubspaceDecomposition;

/// The accumulated SS quadratic form `Σ V_i V_iᴴ` (`mL x mL`, Hermitian
/// PSD) and the number of noise vectors that went into it.
#[derive(Debug, Clone)]
pub struct SsQuadraticForm {
    pub q_ss: CMatrix,
    pub n_noise_vectors: usize,
}

/// SS channel estimate: unit-norm stacked channel vector plus the smallest
/// eigenvalue of the quadratic form as a residual diagnostic.
#[derive(Debug, Clone)]
pub struct SsEstimate {
    pub h_hat: CVector,
    pub residual: f64,
    /// True when the window is shorter than the channel (`M < L`), outside
    /// the guarantee of the identifiability theorem. The estimate is still
    /// produced.
    pub window_short: bool,
}

/// Rearranges a stacked noise vector `v` (length `mM`, blocks `v_1 … v_M` of
/// length `m`) into the `mL x (M+L-1)` banded matrix whose block-row `k`
/// carries `[v_1 … v_M]` shifted right by `k` columns.
///
/// For any channel `h` with filtering matrix `H_M(h)`, the resulting matrix
/// satisfies `hᴴ V = conj(vᴴ H_M(h))` entrywise (the two sides coincide for
/// real data), so `‖hᴴV‖ = ‖vᴴH_M(h)‖` always.
pub fn build_v_matrix(
    v: &CVector,
    n_channels: usize,
    window: usize,
    n_taps: usize,
) -> Result<CMatrix> {
    if v.len() != n_channels * window {
        return Err(Error::Dimension(format!(
            "noise vector length {} != m*M = {}",
            v.len(),
            n_channels * window
        )));
    }
    let k_cols = window + n_taps - 1;
    let mut out = CMatrix::zeros(n_channels * n_taps, k_cols);
    for k in 0..n_taps {
        for r in 0..window {
            for i in 0..n_channels {
                out[(k * n_channels + i, k + r)] = v[r * n_channels + i];
            }
        }
    }
    Ok(out)
}

/// Accumulates the SS quadratic form over every noise-basis column of the
/// decomposition.
pub fn build_ss_form(dec: &SubspaceDecomposition) -> Result<SsQuadraticForm> {
    let d = dec.noise_dim();
    if d == 0 {
        return Err(Error::InvalidParameter("no noise vectors available".into()));
    }
    let n = dec.n_channels() * dec.n_taps();
    let mut q_ss = CMatrix::zeros(n, n);
    for col in 0..d {
        let v = dec.ve().column(col).into_owned();
        let vm = build_v_matrix(&v, dec.n_channels(), dec.window(), dec.n_taps())?;
        q_ss += &vm * vm.adjoint();
    }
    let q_ss = (&q_ss + q_ss.adjoint()) * Complex64::new(0.5, 0.0);
    Ok(SsQuadraticForm {
        q_ss,
        n_noise_vectors: d,
    })
}

/// Runs the SS estimator on a subspace decomposition.
///
/// Returns the unit-norm least eigenvector of the quadratic form under the
/// deterministic phase convention; the scalar ambiguity against the true
/// channel remains and is resolved downstream.
pub fn estimate_ss(dec: &SubspaceDecomposition) -> Result<SsEstimate> {
    let form = build_ss_form(dec)?;
    let (residual, h_hat) = least_eigenvector(&form.q_ss)?;
    Ok(SsEstimate {
        h_hat,
        residual,
        window_short: dec.window() < dec.n_taps(),
    })
}
