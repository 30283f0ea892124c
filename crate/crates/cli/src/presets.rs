//! Built-in experiment presets, one per study, plus the bundled
//! three-channel five-tap system used by the window-length sweep.

use anyhow::{Context, Result};
use bsi_core::evaluation::{ChannelSpec, ExperimentConfig, Method};
use bsi_core::signal_model::{parse_channel_csv, ChannelSet};
use std::f64::consts::PI;

/// Seed used when none is given, so bare runs are still reproducible.
pub const DEFAULT_SEED: u64 = 0xB11D_5EED;

/// Coefficients of the bundled m=3, L=5 channel set. A fixed randomly
/// generated complex system, checked to have well-separated subchannel
/// zeros (minimum zero distance 0.355).
pub const CHANNEL_M3_L5_CSV: &str = include_str!("../../../data/channel_m3_l5.csv");

/// The bundled m=3, L=5 channel set.
pub fn builtin_m3_l5() -> ChannelSet {
    parse_channel_csv(CHANNEL_M3_L5_CSV).expect("bundled channel file is well-formed")
}

/// A named experiment: one or more runs whose result rows concatenate into a
/// single table.
pub struct Preset {
    pub name: &'static str,
    pub title: &'static str,
    pub runs: Vec<ExperimentConfig>,
}

fn snr_grid() -> Vec<f64> {
    vec![0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0]
}

fn pair_run(delta: f64) -> ExperimentConfig {
    ExperimentConfig {
        channel: ChannelSpec::Pair {
            theta: PI / 10.0,
            delta,
        },
        n_samples: 100,
        n_trials: 100,
        snr_grid_db: snr_grid(),
        window: 4,
        methods: vec![Method::Ss, Method::Sss],
        master_seed: DEFAULT_SEED,
        noiseless: false,
    }
}

/// Log-spaced delta grid from pi/100 to pi, 20 points.
pub fn delta_sweep_grid() -> Vec<f64> {
    let lo = (PI / 100.0).ln();
    let hi = PI.ln();
    (0..20)
        .map(|i| (lo + (hi - lo) * i as f64 / 19.0).exp())
        .collect()
}

/// Looks up a preset by its subcommand name.
pub fn preset(name: &str) -> Result<Preset> {
    let preset = match name {
        "exp1-well" => Preset {
            name: "exp1-well",
            title: "Well-conditioned pair (theta=pi/10, delta=pi), MSE vs SNR",
            runs: vec![pair_run(PI)],
        },
        "exp2-ill" => Preset {
            name: "exp2-ill",
            title: "Ill-conditioned pair (delta=pi/10), MSE vs SNR",
            runs: vec![pair_run(PI / 10.0)],
        },
        "exp2-severe" => Preset {
            name: "exp2-severe",
            title: "Severely ill-conditioned pair (delta=pi/50), MSE vs SNR",
            runs: vec![pair_run(PI / 50.0)],
        },
        "exp3-delta-sweep" => Preset {
            name: "exp3-delta-sweep",
            title: "MSE vs delta at SNR = 10 dB",
            runs: delta_sweep_grid()
                .into_iter()
                .map(|delta| {
                    let mut run = pair_run(delta);
                    run.snr_grid_db = vec![10.0];
                    run
                })
                .collect(),
        },
        "exp4-window-sweep" => Preset {
            name: "exp4-window-sweep",
            title: "Window-length sweep on the bundled m=3, L=5 system",
            runs: [3usize, 4, 5, 6]
                .into_iter()
                .map(|window| ExperimentConfig {
                    channel: ChannelSpec::Explicit(builtin_m3_l5()),
                    n_samples: 100,
                    n_trials: 100,
                    snr_grid_db: snr_grid(),
                    window,
                    methods: vec![Method::Ss, Method::Sss],
                    master_seed: DEFAULT_SEED,
                    noiseless: false,
                })
                .collect(),
        },
        other => anyhow::bail!("unknown preset {other:?}"),
    };
    for run in &preset.runs {
        run.validate().context("preset config invalid")?;
    }
    Ok(preset)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_channel_is_well_formed() {
        let ch = builtin_m3_l5();
        assert_eq!(ch.n_channels(), 3);
        assert_eq!(ch.n_taps(), 5);
        let sep = bsi_core::signal_model::zero_separation(&ch).unwrap();
        assert!(sep > 0.3, "zero separation {sep}");
    }

    #[test]
    fn preset_shapes() {
        assert_eq!(preset("exp1-well").unwrap().runs.len(), 1);
        assert_eq!(preset("exp1-well").unwrap().runs[0].snr_grid_db.len(), 7);
        let sweep = preset("exp3-delta-sweep").unwrap();
        assert_eq!(sweep.runs.len(), 20);
        assert!(sweep
            .runs
            .iter()
            .all(|r| r.snr_grid_db == vec![10.0]));
        let windows: Vec<usize> = preset("exp4-window-sweep")
            .unwrap()
            .runs
            .iter()
            .map(|r| r.window)
            .collect();
        assert_eq!(windows, vec![3, 4, 5, 6]);
        assert!(preset("exp9").is_err());
    }

    #[test]
    fn delta_grid_is_log_spaced_and_spans_the_range() {
        let grid = delta_sweep_grid();
        assert_eq!(grid.len(), 20);
        assert!((grid[0] - PI / 100.0).abs() < 1e-12);
        assert!((grid[19] - PI).abs() < 1e-12);
        let ratio = grid[1] / grid[0];
        for w in grid.windows(2) {
            assert!((w[1] / w[0] - ratio).abs() < 1e-9);
        }
    }
}
