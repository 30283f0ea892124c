//! Blind identification of multichannel FIR systems from output samples.
//!
//! The library estimates the impulse responses of `m` parallel FIR channels
//! driven by a common unknown symbol stream, using only second-order
//! statistics of the observed outputs. Two estimators are provided:
//!
//! * the noise-subspace (SS) estimator, which forces block-Toeplitz channel
//!   structure and minimizes the orthogonality error against the noise
//!   subspace of the sample covariance, and
//! * the structure-based subspace (SSS) estimator, which searches for the
//!   filtering matrix inside the signal subspace and minimizes its deviation
//!   from block-Toeplitz structure through a Kronecker-assembled quadratic
//!   penalty.
//!
//! [`evaluation`] adds scalar-ambiguity alignment, MSE aggregation, and a
//! seeded Monte Carlo runner for MSE-vs-SNR sweeps; CSV export of the result
//! tables lives there as well.

pub mod error;
pub mod evaluation;
pub mod linalg;
pub mod signal_model;
pub mod ss;
pub mod sss;
pub mod subspace;

pub use error::{Error, Result};
pub use evaluation::{
    run_experiment, ChannelSpec, ExperimentConfig, ExperimentResults, Method,
};
pub use linalg::{CMatrix, CVector};
pub use signal_model::{BlockToeplitzMatrix, ChannelSet, ObservationSet};
pub use subspace::SubspaceDecomposition;
