//! TOML experiment configs and the angle grammar.
//!
//! Configs are flat key-value TOML. Angles may be plain numbers (radians) or
//! strings in multiples of pi: `"pi"`, `"pi/10"`, `"3pi/4"`, `"-pi/2"`,
//! `"0.5*pi"`. The channel is either a `(theta, delta)` pair or an external
//! coefficient CSV referenced by `channel_file` (resolved relative to the
//! config file).

use std::path::Path;

use anyhow::{bail, Context, Result};
use bsi_core::evaluation::{ChannelSpec, ExperimentConfig, Method};
use bsi_core::signal_model::parse_channel_csv;
use serde::Deserialize;

use crate::presets::DEFAULT_SEED;

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum Angle {
    Number(f64),
    Text(String),
}

impl Angle {
    fn radians(&self, field: &str) -> Result<f64> {
        match self {
            Angle::Number(x) => Ok(*x),
            Angle::Text(s) => {
                parse_angle(s).with_context(|| format!("in config field `{field}`"))
            }
        }
    }
}

/// Parses an angle given as a decimal number or a multiple of pi.
pub fn parse_angle(text: &str) -> Result<f64> {
    let s = text.trim().to_ascii_lowercase().replace(' ', "");
    if s.is_empty() {
        bail!("empty angle");
    }
    let Some(pi_at) = s.find("pi") else {
        return s
            .parse::<f64>()
            .with_context(|| format!("cannot parse angle {text:?} as a number"));
    };
    let (coef_part, rest) = s.split_at(pi_at);
    let rest = &rest[2..];
    let coef = match coef_part.strip_suffix('*').unwrap_or(coef_part) {
        "" => 1.0,
        "-" => -1.0,
        "+" => 1.0,
        c => c
            .parse::<f64>()
            .with_context(|| format!("bad coefficient in angle {text:?}"))?,
    };
    let divisor = match rest {
        "" => 1.0,
        d => {
            let Some(d) = d.strip_prefix('/') else {
                bail!("unexpected trailing {d:?} in angle {text:?}");
            };
            let d: f64 = d
                .parse()
                .with_context(|| format!("bad divisor in angle {text:?}"))?;
            if d == 0.0 {
                bail!("zero divisor in angle {text:?}");
            }
            d
        }
    };
    Ok(coef * std::f64::consts::PI / divisor)
}

fn default_samples() -> usize {
    100
}

fn default_trials() -> usize {
    100
}

fn default_snr_grid() -> Vec<f64> {
    vec![0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0]
}

fn default_window() -> usize {
    4
}

fn default_methods() -> Vec<String> {
    vec!["ss".into(), "sss".into()]
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    theta: Option<Angle>,
    delta: Option<Angle>,
    /// Path to a channel coefficient CSV (columns channel,tap,re,im).
    channel_file: Option<String>,
    #[serde(default = "default_samples")]
    samples: usize,
    #[serde(default = "default_trials")]
    trials: usize,
    #[serde(default = "default_snr_grid")]
    snr_db: Vec<f64>,
    #[serde(default = "default_window")]
    window: usize,
    #[serde(default = "default_methods")]
    methods: Vec<String>,
    seed: Option<u64>,
    #[serde(default)]
    noiseless: bool,
}

/// Loads an experiment config from TOML text. `base_dir` anchors relative
/// `channel_file` paths.
pub fn parse_config(text: &str, base_dir: &Path) -> Result<ExperimentConfig> {
    let raw: RawConfig = toml::from_str(text).context("config parse error")?;

    let channel = match (&raw.theta, &raw.delta, &raw.channel_file) {
        (Some(theta), Some(delta), None) => ChannelSpec::Pair {
            theta: theta.radians("theta")?,
            delta: delta.radians("delta")?,
        },
        (None, None, Some(file)) => {
            let path = base_dir.join(file);
            let text = std::fs::read_to_string(&path)
                .with_context(|| format!("cannot read channel_file {}", path.display()))?;
            let ch = parse_channel_csv(&text)
                .with_context(|| format!("bad channel file {}", path.display()))?;
            ChannelSpec::Explicit(ch)
        }
        (None, None, None) => bail!("config needs either theta+delta or channel_file"),
        _ => bail!("config must set either theta+delta or channel_file, not both"),
    };

    let methods = raw
        .methods
        .iter()
        .map(|s| s.parse::<Method>().map_err(anyhow::Error::from))
        .collect::<Result<Vec<_>>>()?;

    let cfg = ExperimentConfig {
        channel,
        n_samples: raw.samples,
        n_trials: raw.trials,
        snr_grid_db: raw.snr_db,
        window: raw.window,
        methods,
        master_seed: raw.seed.unwrap_or(DEFAULT_SEED),
        noiseless: raw.noiseless,
    };
    cfg.validate()?;
    Ok(cfg)
}
