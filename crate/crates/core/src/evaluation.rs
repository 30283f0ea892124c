//! Scalar-ambiguity alignment, MSE aggregation, and the seeded Monte Carlo
//! experiment runner, plus CSV serialization of the result tables.
//!
//! Blind estimates carry an inherent complex scale ambiguity, so each trial
//! aligns the estimate to the truth with the least-squares scalar before
//! measuring error. Every enabled method sees the same data realization per
//! trial (paired design), trial seeds are derived deterministically from the
//! master seed, and trials run in parallel without affecting the output.

use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::CVector;
use crate::signal_model::{
    build_channel_pair, generate_qam4_symbols, noise_variance_for_snr, simulate_output,
    ChannelSet,
};
use crate::ss::estimate_ss;
use crate::sss::solve_sss;
use crate::subspace::{decompose, sample_covariance, stack_windows};

/// Lower clamp for reported MSE values; exact recovery reports this floor
/// instead of negative infinity.
pub const MSE_FLOOR_DB: f64 = -300.0;

/// Estimator selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    /// Standard noise-subspace estimator.
    Ss,
    /// Structure-based subspace estimator.
    Sss,
}

impl Method {
    pub fn label(self) -> &'static str {
        match self {
            Method::Ss => "ss",
            Method::Sss => "sss",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ss" => Ok(Method::Ss),
            "sss" => Ok(Method::Sss),
            other => Err(Error::InvalidParameter(format!(
                "unknown method {other:?} (expected \"ss\" or \"sss\")"
            ))),
        }
    }
}

/// How the unknown system is specified: a two-channel pair generated from
/// angles, or an explicit channel set.
#[derive(Debug, Clone)]
pub enum ChannelSpec {
    Pair { theta: f64, delta: f64 },
    Explicit(ChannelSet),
}

impl ChannelSpec {
    pub fn resolve(&self) -> ChannelSet {
        match self {
            ChannelSpec::Pair { theta, delta } => build_channel_pair(*theta, *delta),
            ChannelSpec::Explicit(ch) => ch.clone(),
        }
    }

    /// The pair angles, when the channel is angle-generated.
    pub fn angles(&self) -> (Option<f64>, Option<f64>) {
        match self {
            ChannelSpec::Pair { theta, delta } => (Some(*theta), Some(*delta)),
            ChannelSpec::Explicit(_) => (None, None),
        }
    }
}

/// Full description of one Monte Carlo experiment.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub channel: ChannelSpec,
    /// Output samples per trial (`N`).
    pub n_samples: usize,
    /// Monte Carlo runs per SNR point.
    pub n_trials: usize,
    pub snr_grid_db: Vec<f64>,
    /// Stacking window length (`M`).
    pub window: usize,
    pub methods: Vec<Method>,
    pub master_seed: u64,
    /// Force zero noise regardless of the SNR grid (exact-recovery checks).
    pub noiseless: bool,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.window < 1 {
            return Err(Error::InvalidParameter("window must be at least 1".into()));
        }
        if self.n_samples < self.window {
            return Err(Error::InvalidParameter(format!(
                "need N >= M, got N={} M={}",
                self.n_samples, self.window
            )));
        }
        if self.n_trials < 1 {
            return Err(Error::InvalidParameter("need at least one trial".into()));
        }
        if self.snr_grid_db.is_empty() {
            return Err(Error::InvalidParameter("SNR grid must be nonempty".into()));
        }
        if self.snr_grid_db.iter().any(|s| !s.is_finite()) {
            return Err(Error::InvalidParameter("SNR grid must be finite".into()));
        }
        if self.methods.is_empty() {
            return Err(Error::InvalidParameter("select at least one method".into()));
        }
        let mut seen = self.methods.clone();
        seen.dedup();
        if seen.len() != self.methods.len() {
            return Err(Error::InvalidParameter("duplicate methods".into()));
        }
        Ok(())
    }
}

/// Outcome of one estimator on one trial. `squared_error`/`residual` are
/// `None` when the estimator (or the shared decomposition) failed; failures
/// never abort a sweep.
#[derive(Debug, Clone)]
pub struct TrialResult {
    pub method: Method,
    pub snr_db: f64,
    pub trial: usize,
    /// The trial-level seed both method runs share.
    pub seed: u64,
    /// Aligned squared error `‖α·ĥ - h‖²`.
    pub squared_error: Option<f64>,
    /// Smallest eigenvalue of the method's quadratic form.
    pub residual: Option<f64>,
}

/// Aggregated MSE for one (method, SNR) cell.
#[derive(Debug, Clone, PartialEq)]
pub struct CellSummary {
    pub method: Method,
    pub snr_db: f64,
    pub window: usize,
    pub theta: Option<f64>,
    pub delta: Option<f64>,
    pub mse_db: f64,
    /// Successful trials contributing to the mean.
    pub n_trials: usize,
    pub n_failures: usize,
}

/// Results table plus the per-trial records behind it.
#[derive(Debug, Clone)]
pub struct ExperimentResults {
    pub cells: Vec<CellSummary>,
    pub trials: Vec<TrialResult>,
}

/// Least-squares scalar aligning a blind estimate with the truth:
/// the minimizer of `‖α·ĥ - h‖²`, namely `⟨ĥ, h⟩ / ‖ĥ‖²`.
pub fn align_scale(h_hat: &CVector, h_true: &CVector) -> Result<Complex64> {
    let denom = h_hat.norm_squared();
    if denom == 0.0 {
        return Err(Error::InvalidParameter("cannot align a zero estimate".into()));
    }
    Ok(h_hat.dotc(h_true) / Complex64::new(denom, 0.0))
}

/// Squared error after optimal scalar alignment.
pub fn aligned_squared_error(h_hat: &CVector, h_true: &CVector) -> Result<f64> {
    let alpha = align_scale(h_hat, h_true)?;
    Ok((h_hat * alpha - h_true).norm_squared())
}

/// Normalized MSE in dB over a set of aligned squared errors:
/// `20·log10( sqrt(mean(errors)) / ‖h‖ )`, clamped at [`MSE_FLOOR_DB`].
pub fn mse_db(squared_errors: &[f64], h_true: &CVector) -> f64 {
    assert!(!squared_errors.is_empty(), "need at least one trial");
    let mean = squared_errors.iter().sum::<f64>() / squared_errors.len() as f64;
    let rel = mean.sqrt() / h_true.norm();
    if rel <= 0.0 {
        return MSE_FLOOR_DB;
    }
    (20.0 * rel.log10()).max(MSE_FLOOR_DB)
}

/// Derives an independent stream seed from a parent seed and two indices
/// (splitmix64 finalization). Used for per-trial symbol and noise streams so
/// results do not depend on scheduling.
pub fn derive_seed(parent: u64, stream: u64, index: u64) -> u64 {
    let mut z = parent
        ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15)
        ^ index.wrapping_mul(0xD1B5_4A32_D192_ED03);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn run_trial(
    cfg: &ExperimentConfig,
    ch: &ChannelSet,
    h_true: &CVector,
    snr_idx: usize,
    trial: usize,
) -> Vec<TrialResult> {
    let snr_db = cfg.snr_grid_db[snr_idx];
    let seed = derive_seed(cfg.master_seed, snr_idx as u64, trial as u64);
    let all_failed = |seed: u64| {
        cfg.methods
            .iter()
            .map(|&method| TrialResult {
                method,
                snr_db,
                trial,
                seed,
                squared_error: None,
                residual: None,
            })
            .collect::<Vec<_>>()
    };

    let symbols = generate_qam4_symbols(cfg.n_samples + ch.n_taps() - 1, derive_seed(seed, 1, 0));
    let noise_variance = if cfg.noiseless {
        0.0
    } else {
        match noise_variance_for_snr(ch, &symbols, snr_db) {
            Ok(v) => v,
            Err(_) => return all_failed(seed),
        }
    };
    let obs = simulate_output(ch, &symbols, noise_variance, derive_seed(seed, 2, 0));
    let dec = match stack_windows(&obs, cfg.window).and_then(|x| {
        decompose(
            &sample_covariance(&x),
            ch.n_channels(),
            cfg.window,
            ch.n_taps(),
        )
    }) {
        Ok(dec) => dec,
        Err(_) => return all_failed(seed),
    };

    cfg.methods
        .iter()
        .map(|&method| {
            let estimate = match method {
                Method::Ss => estimate_ss(&dec).map(|e| (e.h_hat, e.residual)),
                Method::Sss => solve_sss(&dec).map(|s| (s.h_hat, s.residual)),
            };
            let outcome = estimate.and_then(|(h_hat, residual)| {
                aligned_squared_error(&h_hat, h_true).map(|se| (se, residual))
            });
            match outcome {
                Ok((se, residual)) => TrialResult {
                    method,
                    snr_db,
                    trial,
                    seed,
                    squared_error: Some(se),
                    residual: Some(residual),
                },
                Err(_) => TrialResult {
                    method,
                    snr_db,
                    trial,
                    seed,
                    squared_error: None,
                    residual: None,
                },
            }
        })
        .collect()
}

/// Runs the full Monte Carlo sweep described by the config.
///
/// Trials execute in parallel on the current rayon pool; results are reduced
/// in `(snr, trial)` order so the output is identical for any level of
/// parallelism. Per-cell summaries appear method-major in the order the
/// methods were configured.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentResults> {
    cfg.validate()?;
    let ch = cfg.channel.resolve();
    let h_true = ch.stacked();
    let (theta, delta) = cfg.channel.angles();

    let coords: Vec<(usize, usize)> = (0..cfg.snr_grid_db.len())
        .flat_map(|s| (0..cfg.n_trials).map(move |t| (s, t)))
        .collect();
    let trials: Vec<TrialResult> = coords
        .par_iter()
        .map(|&(snr_idx, trial)| run_trial(cfg, &ch, &h_true, snr_idx, trial))
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect();

    let mut cells = Vec::with_capacity(cfg.methods.len() * cfg.snr_grid_db.len());
    for &method in &cfg.methods {
        for &snr in &cfg.snr_grid_db {
            let errors: Vec<f64> = trials
                .iter()
                .filter(|t| t.method == method && t.snr_db == snr)
                .filter_map(|t| t.squared_error)
                .collect();
            let n_failures = trials
                .iter()
                .filter(|t| t.method == method && t.snr_db == snr && t.squared_error.is_none())
                .count();
            let mse = if errors.is_empty() {
                f64::NAN
            } else {
                mse_db(&errors, &h_true)
            };
            cells.push(CellSummary {
                method,
                snr_db: snr,
                window: cfg.window,
                theta,
                delta,
                mse_db: mse,
                n_trials: errors.len(),
                n_failures,
            });
        }
    }
    Ok(ExperimentResults { cells, trials })
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Writes the per-cell results table. Columns:
/// `method,snr_db,M,theta,delta,mse_db,n_trials,n_failures`.
pub fn write_summary_csv<W: Write>(cells: &[CellSummary], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record([
        "method",
        "snr_db",
        "M",
        "theta",
        "delta",
        "mse_db",
        "n_trials",
        "n_failures",
    ])?;
    for c in cells {
        w.write_record(&[
            c.method.label().to_string(),
            c.snr_db.to_string(),
            c.window.to_string(),
            fmt_opt(c.theta),
            fmt_opt(c.delta),
            c.mse_db.to_string(),
            c.n_trials.to_string(),
            c.n_failures.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// The summary table as a CSV string.
pub fn summary_csv_string(cells: &[CellSummary]) -> String {
    let mut buf = Vec::new();
    write_summary_csv(cells, &mut buf).expect("writing to a Vec cannot fail");
    String::from_utf8(buf).expect("CSV output is UTF-8")
}

/// Reads a summary table back from CSV (the inverse of
/// [`write_summary_csv`]).
pub fn read_summary_csv<R: Read>(reader: R) -> Result<Vec<CellSummary>> {
    let mut r = csv::Reader::from_reader(reader);
    let mut cells = Vec::new();
    for record in r.records() {
        let record = record?;
        let field = |i: usize| -> &str { record.get(i).unwrap_or("") };
        let parse_f64 = |s: &str| -> Result<f64> {
            s.parse::<f64>()
                .map_err(|_| Error::InvalidParameter(format!("bad float {s:?} in CSV")))
        };
        let parse_opt = |s: &str| -> Result<Option<f64>> {
            if s.is_empty() {
                Ok(None)
            } else {
                parse_f64(s).map(Some)
            }
        };
        cells.push(CellSummary {
            method: field(0).parse()?,
            snr_db: parse_f64(field(1))?,
            window: field(2)
                .parse()
                .map_err(|_| Error::InvalidParameter("bad window in CSV".into()))?,
            theta: parse_opt(field(3))?,
            delta: parse_opt(field(4))?,
            mse_db: parse_f64(field(5))?,
            n_trials: field(6)
                .parse()
                .map_err(|_| Error::InvalidParameter("bad n_trials in CSV".into()))?,
            n_failures: field(7)
                .parse()
                .map_err(|_| Error::InvalidParameter("bad n_failures in CSV".into()))?,
        });
    }
    Ok(cells)
}

/// Writes the per-trial records. Columns:
/// `method,snr_db,trial,seed,aligned_squared_error,residual,status`.
pub fn write_trials_csv<W: Write>(trials: &[TrialResult], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record([
        "method",
        "snr_db",
        "trial",
        "seed",
        "aligned_squared_error",
        "residual",
        "status",
    ])?;
    for t in trials {
        let status = if t.squared_error.is_some() { "ok" } else { "failed" };
        w.write_record(&[
            t.method.label().to_string(),
            t.snr_db.to_string(),
            t.trial.to_string(),
            t.seed.to_string(),
            fmt_opt(t.squared_error),
            fmt_opt(t.residual),
            status.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
