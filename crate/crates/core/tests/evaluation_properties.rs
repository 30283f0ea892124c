//! Statistical sanity of the Monte Carlo runner on the well-conditioned
//! pair: MSE should fall as SNR rises for both methods.

use bsi_core::evaluation::{run_experiment, ChannelSpec, ExperimentConfig, Method};
use std::f64::consts::PI;

/// Spearman rank correlation for a short series with distinct values.
fn spearman(xs: &[f64], ys: &[f64]) -> f64 {
    let rank = |vals: &[f64]| -> Vec<f64> {
        let mut order: Vec<usize> = (0..vals.len()).collect();
        order.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
        let mut ranks = vec![0.0; vals.len()];
        for (r, &i) in order.iter().enumerate() {
            ranks[i] = r as f64;
        }
        ranks
    };
    let rx = rank(xs);
    let ry = rank(ys);
    let n = xs.len() as f64;
    let mean = (n - 1.0) / 2.0;
    let mut num = 0.0;
    let mut dx = 0.0;
    let mut dy = 0.0;
    for i in 0..xs.len() {
        num += (rx[i] - mean) * (ry[i] - mean);
        dx += (rx[i] - mean).powi(2);
        dy += (ry[i] - mean).powi(2);
    }
    num / (dx.sqrt() * dy.sqrt())
}

#[test]
fn mse_decreases_with_snr_on_well_conditioned_channels() {
    let cfg = ExperimentConfig {
        channel: ChannelSpec::Pair {
            theta: PI / 10.0,
            delta: PI,
        },
        n_samples: 100,
        n_trials: 100,
        snr_grid_db: vec![0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0],
        window: 4,
        methods: vec![Method::Ss, Method::Sss],
        master_seed: 0xB11D_5EED,
        noiseless: false,
    };
    let res = run_experiment(&cfg).unwrap();
    for method in [Method::Ss, Method::Sss] {
        let (snrs, mses): (Vec<f64>, Vec<f64>) = res
            .cells
            .iter()
            .filter(|c| c.method == method)
            .map(|c| (c.snr_db, c.mse_db))
            .unzip();
        let rho = spearman(&snrs, &mses);
        assert!(rho < 0.0, "{method}: Spearman correlation {rho} not negative");
    }
}
