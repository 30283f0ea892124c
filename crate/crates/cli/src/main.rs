//! Command-line harness for the blind multichannel identification
//! experiments: preset and custom Monte Carlo sweeps, CSV results, run
//! manifests, and SVG plots.

mod config;
mod manifest;
mod plot;
mod presets;

use std::fs;
use std::path::PathBuf;

use anyhow::{Context, Result};
use bsi_core::evaluation::{
    run_experiment, summary_csv_string, write_trials_csv, CellSummary, ExperimentConfig,
    TrialResult,
};
use bsi_core::signal_model::zero_separation;
use clap::{Args, Parser, Subcommand};

use manifest::{channel_label, Manifest};
use presets::preset;

#[derive(Parser)]
#[command(
    name = "bsi",
    version,
    about = "Blind multichannel FIR system identification benchmarks (SS vs SSS)"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct RunArgs {
    /// Output directory for CSVs, manifests, and plots.
    #[arg(long, env = "BSI_OUT_DIR", default_value = "results")]
    out: PathBuf,
    /// Master seed override (presets carry a fixed default).
    #[arg(long)]
    seed: Option<u64>,
    /// Render SVG plots from the written CSV.
    #[arg(long)]
    plot: bool,
    /// Worker threads; defaults to all cores. Output is identical either way.
    #[arg(long)]
    jobs: Option<usize>,
    /// SNR grid override in dB, comma separated (e.g. "0,10,20").
    #[arg(long, value_delimiter = ',')]
    snr_grid: Option<Vec<f64>>,
    /// Monte Carlo trials per SNR point.
    #[arg(long)]
    trials: Option<usize>,
    /// Output samples per trial.
    #[arg(long)]
    samples: Option<usize>,
    /// Also dump per-trial records to `<name>_trials.csv`.
    #[arg(long)]
    trial_dump: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Well-conditioned channel pair (theta=pi/10, delta=pi), MSE vs SNR.
    Exp1Well(RunArgs),
    /// Moderately ill-conditioned pair (delta=pi/10), MSE vs SNR.
    Exp2Ill(RunArgs),
    /// Severely ill-conditioned pair (delta=pi/50), MSE vs SNR.
    Exp2Severe(RunArgs),
    /// Sweep the zero spacing delta at fixed SNR = 10 dB.
    Exp3DeltaSweep(RunArgs),
    /// Sweep the stacking window M on the bundled m=3, L=5 system.
    Exp4WindowSweep(RunArgs),
    /// Run an experiment described by a TOML config file.
    Custom {
        /// Path to the TOML config (see README for the schema).
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        args: RunArgs,
    },
    /// Render SVG plots from an existing results CSV.
    Plot {
        /// Results CSV produced by a run.
        #[arg(long)]
        csv: PathBuf,
        /// Output directory (defaults to the CSV's directory).
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    match cli.command {
        Command::Exp1Well(args) => run_named_preset("exp1-well", args),
        Command::Exp2Ill(args) => run_named_preset("exp2-ill", args),
        Command::Exp2Severe(args) => run_named_preset("exp2-severe", args),
        Command::Exp3DeltaSweep(args) => run_named_preset("exp3-delta-sweep", args),
        Command::Exp4WindowSweep(args) => run_named_preset("exp4-window-sweep", args),
        Command::Custom { config, args } => run_custom(&config, args),
        Command::Plot { csv, out } => {
            let out_dir = out.unwrap_or_else(|| {
                csv.parent().map(PathBuf::from).unwrap_or_else(|| ".".into())
            });
            let path = plot::plot_csv(&csv, &out_dir)?;
            println!("wrote {}", path.display());
            Ok(())
        }
    }
}

fn run_named_preset(name: &str, args: RunArgs) -> Result<()> {
    let preset = preset(name)?;
    println!("{}: {}", preset.name, preset.title);
    let mut runs = preset.runs;
    apply_overrides(&mut runs, &args);
    let labels: Vec<String> = runs
        .iter()
        .map(|r| channel_label(&r.channel, "builtin:channel_m3_l5"))
        .collect();
    execute(name, runs, labels, &args)
}

fn run_custom(config_path: &PathBuf, args: RunArgs) -> Result<()> {
    let text = fs::read_to_string(config_path)
        .with_context(|| format!("cannot read config {}", config_path.display()))?;
    let base = config_path
        .parent()
        .map(PathBuf::from)
        .unwrap_or_else(|| ".".into());
    let cfg = config::parse_config(&text, &base)
        .with_context(|| format!("in config {}", config_path.display()))?;
    let label = channel_label(&cfg.channel, "file");
    let mut runs = vec![cfg];
    apply_overrides(&mut runs, &args);
    execute("custom", runs, vec![label], &args)
}

fn apply_overrides(runs: &mut [ExperimentConfig], args: &RunArgs) {
    for run in runs.iter_mut() {
        if let Some(seed) = args.seed {
            run.master_seed = seed;
        }
        if let Some(grid) = &args.snr_grid {
            run.snr_grid_db = grid.clone();
        }
        if let Some(trials) = args.trials {
            run.n_trials = trials;
        }
        if let Some(samples) = args.samples {
            run.n_samples = samples;
        }
    }
}

fn execute(
    name: &str,
    runs: Vec<ExperimentConfig>,
    channel_labels: Vec<String>,
    args: &RunArgs,
) -> Result<()> {
    for run in &runs {
        run.validate()?;
    }
    print_channel_diagnostics(&runs);

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.jobs.unwrap_or(0))
        .build()
        .context("cannot build worker pool")?;
    let jobs = pool.current_num_threads();

    let mut cells: Vec<CellSummary> = Vec::new();
    let mut trials: Vec<TrialResult> = Vec::new();
    for run in &runs {
        let results = pool.install(|| run_experiment(run))?;
        cells.extend(results.cells);
        trials.extend(results.trials);
    }

    fs::create_dir_all(&args.out)
        .with_context(|| format!("cannot create output dir {}", args.out.display()))?;
    let results_name = format!("{name}_results.csv");
    let results_path = args.out.join(&results_name);
    fs::write(&results_path, summary_csv_string(&cells))
        .with_context(|| format!("cannot write {}", results_path.display()))?;

    let trials_name = args.trial_dump.then(|| format!("{name}_trials.csv"));
    if let Some(trials_name) = &trials_name {
        let path = args.out.join(trials_name);
        let file = fs::File::create(&path)
            .with_context(|| format!("cannot write {}", path.display()))?;
        write_trials_csv(&trials, file)?;
    }

    let manifest = Manifest::new(
        name,
        &runs,
        &channel_labels,
        jobs,
        &results_name,
        trials_name.as_deref(),
    );
    let manifest_path = args.out.join(format!("{name}_manifest.toml"));
    fs::write(&manifest_path, manifest.to_toml())
        .with_context(|| format!("cannot write {}", manifest_path.display()))?;

    print_summary(&cells);
    println!("wrote {}", results_path.display());
    println!("wrote {}", manifest_path.display());
    if let Some(trials_name) = &trials_name {
        println!("wrote {}", args.out.join(trials_name).display());
    }
    if args.plot {
        let path = plot::plot_csv(&results_path, &args.out)?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn print_channel_diagnostics(runs: &[ExperimentConfig]) {
    let mut seen: Vec<String> = Vec::new();
    for run in runs {
        let ch = run.channel.resolve();
        let key = match run.channel.angles() {
            (Some(theta), Some(delta)) => format!("pair theta={theta:.6} delta={delta:.6}"),
            _ => format!("explicit m={} L={}", ch.n_channels(), ch.n_taps()),
        };
        if seen.contains(&key) {
            continue;
        }
        seen.push(key.clone());
        match zero_separation(&ch) {
            Ok(sep) if sep < 1e-9 => {
                println!("channel {key}: common subchannel zeros, not identifiable")
            }
            Ok(sep) => println!("channel {key}: zero separation {sep:.4}"),
            Err(_) => println!("channel {key}: zero separation unavailable"),
        }
    }
}

fn print_summary(cells: &[CellSummary]) {
    println!(
        "{:<5} {:>7} {:>3} {:>9} {:>10} {:>7} {:>5}",
        "meth", "snr_db", "M", "delta", "mse_db", "trials", "fail"
    );
    for c in cells {
        let delta = c
            .delta
            .map(|d| format!("{d:.4}"))
            .unwrap_or_else(|| "-".into());
        println!(
            "{:<5} {:>7} {:>3} {:>9} {:>10.3} {:>7} {:>5}",
            c.method.label(),
            c.snr_db,
            c.window,
            delta,
            c.mse_db,
            c.n_trials,
            c.n_failures
        );
    }
}
