//! Stacked data windows, the sample covariance, and its signal/noise
//! eigendecomposition.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigen, CMatrix};
use crate::signal_model::ObservationSet;

/// Signal/noise split of a sample covariance.
///
/// `vs` spans the `K = M+L-1` principal directions (signal subspace), `ve`
/// the remaining `mM - K` (noise subspace); together their columns form an
/// orthonormal basis. Eigenvalues are kept in non-increasing order.
#[derive(Debug, Clone)]
pub struct SubspaceDecomposition {
    vs: CMatrix,
    ve: CMatrix,
    eigenvalues: Vec<f64>,
    n_channels: usize,
    window: usize,
    n_taps: usize,
}

impl SubspaceDecomposition {
    /// Assembles a decomposition from explicit parts, validating the
    /// orthonormality and ordering invariants. Mostly useful for driving the
    /// estimators with exactly-known subspaces.
    pub fn from_parts(
        vs: CMatrix,
        ve: CMatrix,
        eigenvalues: Vec<f64>,
        n_channels: usize,
        window: usize,
        n_taps: usize,
    ) -> Result<Self> {
        let dim = n_channels * window;
        let signal_dim = window + n_taps - 1;
        if vs.nrows() != dim || ve.nrows() != dim {
            return Err(Error::Dimension("basis row count must be m*M".into()));
        }
        if vs.ncols() != signal_dim || ve.ncols() != dim - signal_dim {
            return Err(Error::Dimension(
                "basis column counts must be K and mM-K".into(),
            ));
        }
        if eigenvalues.len() != dim {
            return Err(Error::Dimension("need one eigenvalue per dimension".into()));
        }
        let dec = Self {
            vs,
            ve,
            eigenvalues,
            n_channels,
            window,
            n_taps,
        };
        dec.check_invariants()?;
        Ok(dec)
    }

    fn check_invariants(&self) -> Result<()> {
        let k = self.signal_dim();
        let dim = self.dim();
        let tol = 1e-10;
        let gram_s = self.vs.ad_mul(&self.vs);
        let gram_e = self.ve.ad_mul(&self.ve);
        let cross = self.vs.ad_mul(&self.ve);
        if (gram_s - CMatrix::identity(k, k)).norm() > tol
            || (gram_e - CMatrix::identity(dim - k, dim - k)).norm() > tol
            || cross.norm() > tol
        {
            return Err(Error::InvalidParameter(
                "subspace bases are not jointly orthonormal".into(),
            ));
        }
        if self.eigenvalues.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::InvalidParameter(
                "eigenvalues must be non-increasing".into(),
            ));
        }
        Ok(())
    }

    /// Signal-subspace basis, `mM x K`.
    pub fn vs(&self) -> &CMatrix {
        &self.vs
    }

    /// Noise-subspace basis, `mM x (mM-K)`.
    pub fn ve(&self) -> &CMatrix {
        &self.ve
    }

    /// Covariance eigenvalues, non-increasing, length `mM`.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn n_channels(&self) -> usize {
        self.n_channels
    }

    pub fn window(&self) -> usize {
        self.window
    }

    pub fn n_taps(&self) -> usize {
        self.n_taps
    }

    /// Stacked dimension `mM`.
    pub fn dim(&self) -> usize {
        self.n_channels * self.window
    }

    /// Signal dimension `K = M + L - 1`.
    pub fn signal_dim(&self) -> usize {
        self.window + self.n_taps - 1
    }

    /// Noise-subspace dimension `mM - K`.
    pub fn noise_dim(&self) -> usize {
        self.dim() - self.signal_dim()
    }

    /// Average of the noise eigenvalues; a diagnostic only, no estimator
    /// consumes it.
    pub fn noise_variance_estimate(&self) -> f64 {
        let k = self.signal_dim();
        let tail = &self.eigenvalues[k..];
        tail.iter().sum::<f64>() / tail.len() as f64
    }
}

/// Stacks observations into overlapping windows of length `M`.
///
/// Column `t` of the result is `[y(t+M-1); y(t+M-2); …; y(t)]`, newest
/// sample on top, for `t = 0 … N-M`. Errors when fewer than `M` samples are
/// available.
pub fn stack_windows(obs: &ObservationSet, window: usize) -> Result<CMatrix> {
    let n = obs.n_samples();
    let m = obs.n_channels();
    if window == 0 || n < window {
        return Err(Error::Dimension(format!(
            "cannot stack windows of length {window} from {n} samples"
        )));
    }
    let cols = n - window + 1;
    let mut out = CMatrix::zeros(m * window, cols);
    for t in 0..cols {
        for r in 0..window {
            let src = obs.samples().column(t + window - 1 - r);
            out.view_mut((r * m, t), (m, 1)).copy_from(&src);
        }
    }
    Ok(out)
}

/// Sample covariance `X Xᴴ / T`, made exactly Hermitian by averaging with
/// its own adjoint.
pub fn sample_covariance(x: &CMatrix) -> CMatrix {
    assert!(x.ncols() > 0, "need at least one window");
    let t = x.ncols() as f64;
    let r = x * x.adjoint() / Complex64::new(t, 0.0);
    (&r + r.adjoint()) * Complex64::new(0.5, 0.0)
}

/// Eigendecomposes a Hermitian covariance into signal and noise subspaces.
///
/// The `K = M+L-1` dominant eigenvectors form the signal basis, the rest the
/// noise basis; requires a nonempty noise subspace (`mM > K`). Ties at the
/// split are resolved by the deterministic eigenvalue ordering.
pub fn decompose(
    r: &CMatrix,
    n_channels: usize,
    window: usize,
    n_taps: usize,
) -> Result<SubspaceDecomposition> {
    let dim = n_channels * window;
    let signal_dim = window + n_taps - 1;
    if n_channels == 0 || window == 0 || n_taps == 0 {
        return Err(Error::InvalidParameter("dimensions must be positive".into()));
    }
    if r.nrows() != dim || r.ncols() != dim {
        return Err(Error::Dimension(format!(
            "covariance must be {dim}x{dim}, got {}x{}",
            r.nrows(),
            r.ncols()
        )));
    }
    if dim <= signal_dim {
        return Err(Error::InvalidParameter(format!(
            "noise subspace is empty: mM={dim} must exceed K={signal_dim}"
        )));
    }
    let scale = r.norm().max(1.0);
    let asym = (r - r.adjoint()).norm();
    if asym > 1e-10 * scale {
        return Err(Error::InvalidParameter(
            "covariance is not Hermitian".into(),
        ));
    }

    let (eigenvalues, vectors) = hermitian_eigen(r)?;
    if eigenvalues[dim - 1] < -1e-10 * eigenvalues[0].abs().max(1.0) {
        return Err(Error::InvalidParameter(
            "covariance is not positive semidefinite".into(),
        ));
    }
    let vs = vectors.columns(0, signal_dim).into_owned();
    let ve = vectors.columns(signal_dim, dim - signal_dim).into_owned();
    Ok(SubspaceDecomposition {
        vs,
        ve,
        eigenvalues,
        n_channels,
        window,
        n_taps,
    })
}
