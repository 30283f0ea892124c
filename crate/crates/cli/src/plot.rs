//! Static SVG line plots rendered purely from a results CSV.
//!
//! Tables with two or more SNR points become MSE-vs-SNR plots with one line
//! per (method, window, delta) combination; single-SNR tables spanning
//! several delta values become MSE-vs-delta plots on a log-x axis.

use std::collections::BTreeSet;
use std::fs::File;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use bsi_core::evaluation::{read_summary_csv, CellSummary};
use plotters::prelude::*;

const SIZE: (u32, u32) = (900, 600);
const COLORS: [RGBColor; 8] = [
    RGBColor(214, 69, 65),
    RGBColor(31, 119, 180),
    RGBColor(44, 160, 44),
    RGBColor(148, 103, 189),
    RGBColor(255, 127, 14),
    RGBColor(23, 190, 207),
    RGBColor(140, 86, 75),
    RGBColor(0, 0, 0),
];

/// Renders the plot for a results CSV; returns the written SVG path.
pub fn plot_csv(csv_path: &Path, out_dir: &Path) -> Result<PathBuf> {
    let cells = read_summary_csv(File::open(csv_path).with_context(|| {
        format!("cannot open results CSV {}", csv_path.display())
    })?)?;
    if cells.is_empty() {
        bail!("results CSV {} has no rows", csv_path.display());
    }
    let stem = csv_path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("results");

    let snrs: BTreeSet<u64> = cells.iter().map(|c| c.snr_db.to_bits()).collect();
    let deltas: BTreeSet<u64> = cells
        .iter()
        .filter_map(|c| c.delta.map(f64::to_bits))
        .collect();

    std::fs::create_dir_all(out_dir)?;
    if snrs.len() >= 2 || deltas.len() < 2 {
        let path = out_dir.join(format!("{stem}_mse_vs_snr.svg"));
        plot_vs_snr(&cells, &path)?;
        Ok(path)
    } else {
        let path = out_dir.join(format!("{stem}_mse_vs_delta.svg"));
        plot_vs_delta(&cells, &path)?;
        Ok(path)
    }
}

/// Series key for SNR plots: method, plus window/delta when they vary.
fn series_label(cell: &CellSummary, multi_window: bool, multi_delta: bool) -> String {
    let mut label = cell.method.label().to_uppercase();
    if multi_window {
        label.push_str(&format!(" M={}", cell.window));
    }
    if multi_delta {
        if let Some(delta) = cell.delta {
            label.push_str(&format!(" delta={delta:.4}"));
        }
    }
    label
}

fn finite_bounds(values: impl Iterator<Item = f64>) -> Result<(f64, f64)> {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for v in values.filter(|v| v.is_finite()) {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if !lo.is_finite() {
        bail!("no finite values to plot");
    }
    if lo == hi {
        lo -= 1.0;
        hi += 1.0;
    }
    let pad = 0.05 * (hi - lo);
    Ok((lo - pad, hi + pad))
}

fn plot_vs_snr(cells: &[CellSummary], path: &Path) -> Result<()> {
    let windows: BTreeSet<usize> = cells.iter().map(|c| c.window).collect();
    let deltas: BTreeSet<u64> = cells
        .iter()
        .filter_map(|c| c.delta.map(f64::to_bits))
        .collect();
    let multi_window = windows.len() > 1;
    let multi_delta = deltas.len() > 1;

    let mut series: Vec<(String, Vec<(f64, f64)>)> = Vec::new();
    for cell in cells {
        if !cell.mse_db.is_finite() {
            continue;
        }
        let label = series_label(cell, multi_window, multi_delta);
        match series.iter_mut().find(|(name, _)| *name == label) {
            Some((_, points)) => points.push((cell.snr_db, cell.mse_db)),
            None => series.push((label, vec![(cell.snr_db, cell.mse_db)])),
        }
    }
    for (_, points) in &mut series {
        points.sort_by(|a, b| a.0.total_cmp(&b.0));
    }

    let (x_lo, x_hi) = finite_bounds(cells.iter().map(|c| c.snr_db))?;
    let (y_lo, y_hi) = finite_bounds(cells.iter().map(|c| c.mse_db))?;

    let root = SVGBackend::new(path, SIZE).into_drawing_area();
    root.fill(&WHITE)?;
    let mut chart = ChartBuilder::on(&root)
        .margin(16)
        .caption("Channel estimation MSE vs SNR", ("sans-serif", 22))
        .x_label_area_size(42)
        .y_label_area_size(56)
        .build_cartesian_2d(x_lo..x_hi, y_lo..y_hi)?;
    chart
        .configure_mesh()
        .x_desc("SNR (dB)")
        .y_desc("MSE (dB)")
        .draw()?;
    for (i, (label, points)) in series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        chart
            .draw_series(LineSeries::new(points.iter().copied(), &color))?
            .label(label.clone())
            .legend(move |(x, y)| PathElement::new(vec![(x, y), (x + 18, y)], color));
    }
    chart
        .configure_series_labels()
        .border_style(BLACK)
        .background_style(WHITE.mix(0.85))
        .draw()?;
    root.present()?;
    Ok(())
}

fn plot_vs_delta(cells: &[CellSummary], path: &Path) -> Result<()> {
    let mut series: Vec<(String, Vec<(f64, f64)>)> = Vec::new();
    for cell in cells {
        let Some(delta) = cell.delta else { continue };
        if !cell.mse_db.is_finite() {
            continue;
        }
        let label = cell.method.label().to_uppercase();
        match series.iter_mut().find(|(name, _)| *name == label) {
            Some((_, points)) => points.push((delta, cell.mse_db)),
            None => series.push((label, vec![(delta, cell.mse_db)])),
        }
    }
    if series.is_empty() {
        bail!("no delta-parameterized rows to plot");
    }
    for (_, points) in &mut series {
        points.sort_by(|a, b| a.0.total_cmp(&b.0));
    }

    let (x_lo, x_hi) = finite_bounds(
        cells.iter().filter_map(|c| c.delta).filter(|&d| d > 0.0),
    )?;
    let (y_lo, y_hi) = finite_bounds(cells.iter().map(|c| c.mse_db))?;

    let root = SVGBackend::new(path, SIZE).into_drawing_area();
    root.fill(&WHITE)?;
    let mut chart = ChartBuilder::on(&root)
        .margin(16)
        .caption("Channel estimation MSE vs zero spacing", ("sans-serif", 22))
        .x_label_area_size(42)
        .y_label_area_size(56)
        .build_cartesian_2d((x_lo..x_hi).log_scale(), y_lo..y_hi)?;
    chart
        .configure_mesh()
        .x_desc("delta (rad)")
        .y_desc("MSE (dB)")
        .draw()?;
    for (i, (label, points)) in series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        chart
            .draw_series(LineSeries::new(points.iter().copied(), &color))?
            .label(label.clone())
            .legend(move |(x, y)| PathElement::new(vec![(x, y), (x + 18, y)], color));
    }
    chart
        .configure_series_labels()
        .border_style(BLACK)
        .background_style(WHITE.mix(0.85))
        .draw()?;
    root.present()?;
    Ok(())
}
