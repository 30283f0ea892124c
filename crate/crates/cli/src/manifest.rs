//! Run manifests: every resolved parameter needed to reproduce a run
//! byte-for-byte, serialized as TOML next to the results.

use bsi_core::evaluation::{ChannelSpec, ExperimentConfig};
use serde::Serialize;

#[derive(Debug, Serialize)]
pub struct Manifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub preset: String,
    pub master_seed: u64,
    pub jobs: usize,
    pub n_samples: usize,
    pub n_trials: usize,
    pub snr_grid_db: Vec<f64>,
    pub methods: Vec<String>,
    pub noiseless: bool,
    pub results_csv: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials_csv: Option<String>,
    pub runs: Vec<RunEntry>,
}

#[derive(Debug, Serialize)]
pub struct RunEntry {
    pub window: usize,
    pub channel: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
}

impl Manifest {
    pub fn new(
        preset: &str,
        runs: &[ExperimentConfig],
        channel_labels: &[String],
        jobs: usize,
        results_csv: &str,
        trials_csv: Option<&str>,
    ) -> Self {
        let first = &runs[0];
        Manifest {
            tool: "bsi",
            version: env!("CARGO_PKG_VERSION"),
            preset: preset.to_string(),
            master_seed: first.master_seed,
            jobs,
            n_samples: first.n_samples,
            n_trials: first.n_trials,
            snr_grid_db: first.snr_grid_db.clone(),
            methods: first.methods.iter().map(|m| m.label().to_string()).collect(),
            noiseless: first.noiseless,
            results_csv: results_csv.to_string(),
            trials_csv: trials_csv.map(str::to_string),
            runs: runs
                .iter()
                .zip(channel_labels)
                .map(|(run, label)| {
                    let (theta, delta) = run.channel.angles();
                    RunEntry {
                        window: run.window,
                        channel: label.clone(),
                        theta,
                        delta,
                    }
                })
                .collect(),
        }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("manifest serializes")
    }
}

/// Short human-readable description of a channel spec for the manifest.
pub fn channel_label(spec: &ChannelSpec, origin: &str) -> String {
    match spec {
        ChannelSpec::Pair { .. } => "pair".to_string(),
        ChannelSpec::Explicit(ch) => format!(
            "{origin} (m={}, L={})",
            ch.n_channels(),
            ch.n_taps()
        ),
    }
}
