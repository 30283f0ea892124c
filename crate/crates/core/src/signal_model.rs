//! Multichannel FIR signal model: channel sets, the block-Toeplitz filtering
//! matrix, 4-QAM excitation, noisy observation synthesis, and the
//! common-zeros identifiability diagnostic.
//!
//! The model is `y(t) = Σ_{k=0}^{L-1} h(k) s(t-k) + e(t)` with `m` sensor
//! outputs per time step, a single unknown symbol stream `s`, and circular
//! complex white noise `e`. All randomness is seeded and reproducible.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, CVector};

/// A set of `m` FIR subchannels with `L` taps each.
///
/// Stored as an `m x L` matrix whose column `k` is the tap vector `h(k)`
/// across subchannels; row `i` is the impulse response of subchannel `i`.
/// The stacked parameter vector is `[h(0)ᵀ, …, h(L-1)ᵀ]ᵀ`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSet {
    taps: CMatrix,
}

impl ChannelSet {
    /// Builds a channel set from its `m x L` tap matrix.
    ///
    /// Rejects empty shapes, non-finite entries, and the identically-zero
    /// channel.
    pub fn new(taps: CMatrix) -> Result<Self> {
        if taps.nrows() == 0 || taps.ncols() == 0 {
            return Err(Error::InvalidParameter(
                "channel needs at least one subchannel and one tap".into(),
            ));
        }
        if taps.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::InvalidParameter("channel taps must be finite".into()));
        }
        if taps.iter().all(|c| c.norm_sqr() == 0.0) {
            return Err(Error::InvalidParameter(
                "channel must not be identically zero".into(),
            ));
        }
        Ok(Self { taps })
    }

    /// Rebuilds a channel from the stacked vector `[h(0)ᵀ, …, h(L-1)ᵀ]ᵀ`.
    pub fn from_stacked(h: &CVector, n_channels: usize) -> Result<Self> {
        if n_channels == 0 || h.is_empty() || !h.len().is_multiple_of(n_channels) {
            return Err(Error::Dimension(format!(
                "stacked length {} is not a positive multiple of m={}",
                h.len(),
                n_channels
            )));
        }
        let n_taps = h.len() / n_channels;
        let taps = CMatrix::from_fn(n_channels, n_taps, |i, k| h[k * n_channels + i]);
        Self::new(taps)
    }

    /// Number of subchannels `m`.
    pub fn n_channels(&self) -> usize {
        self.taps.nrows()
    }

    /// Taps per subchannel `L`.
    pub fn n_taps(&self) -> usize {
        self.taps.ncols()
    }

    /// The `m x L` tap matrix.
    pub fn taps(&self) -> &CMatrix {
        &self.taps
    }

    /// Stacked parameter vector of length `m·L`.
    pub fn stacked(&self) -> CVector {
        let m = self.n_channels();
        CVector::from_fn(m * self.n_taps(), |idx, _| self.taps[(idx % m, idx / m)])
    }
}

/// Builds the two-sensor second-order test pair
/// `h1 = [1, -2cos(θ), 1]ᵀ`, `h2 = [1, -2cos(θ+δ), 1]ᵀ`.
///
/// `θ` is the phase of the first subchannel's unit-circle zeros and `δ` the
/// angular distance to the second subchannel's zeros, so small `δ` yields an
/// ill-conditioned system.
pub fn build_channel_pair(theta: f64, delta: f64) -> ChannelSet {
    let mid = [-2.0 * theta.cos(), -2.0 * (theta + delta).cos()];
    let taps = CMatrix::from_fn(2, 3, |i, k| match k {
        1 => Complex64::new(mid[i], 0.0),
        _ => Complex64::new(1.0, 0.0),
    });
    ChannelSet::new(taps).expect("finite angles produce a valid channel pair")
}

/// The `mM x (M+L-1)` block-Toeplitz filtering matrix of a channel set.
///
/// Block-row `r` holds `h(0) … h(L-1)` starting at column `r`, zeros
/// elsewhere, so that the stacked window of `M` successive outputs equals
/// this matrix applied to the corresponding symbol window.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockToeplitzMatrix {
    n_channels: usize,
    window: usize,
    n_taps: usize,
    data: CMatrix,
}

impl BlockToeplitzMatrix {
    pub fn n_channels(&self) -> usize {
        self.n_channels
    }

    /// Window length `M` (number of block rows).
    pub fn window(&self) -> usize {
        self.window
    }

    pub fn n_taps(&self) -> usize {
        self.n_taps
    }

    /// Column count `K = M + L - 1`.
    pub fn signal_dim(&self) -> usize {
        self.window + self.n_taps - 1
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.data
    }

    /// Reads the channel back out of the first block row (exact round trip).
    pub fn channel(&self) -> ChannelSet {
        let taps = CMatrix::from_fn(self.n_channels, self.n_taps, |i, k| self.data[(i, k)]);
        ChannelSet::new(taps).expect("filter matrix rows hold a valid channel")
    }
}

/// Assembles the block-Toeplitz filtering matrix for window length `M ≥ 1`.
pub fn build_filter_matrix(ch: &ChannelSet, window: usize) -> BlockToeplitzMatrix {
    assert!(window >= 1, "window length must be at least 1");
    let m = ch.n_channels();
    let l = ch.n_taps();
    let mut data = CMatrix::zeros(m * window, window + l - 1);
    for r in 0..window {
        for k in 0..l {
            for i in 0..m {
                data[(r * m + i, r + k)] = ch.taps()[(i, k)];
            }
        }
    }
    BlockToeplitzMatrix {
        n_channels: m,
        window,
        n_taps: l,
        data,
    }
}

/// Draws `n` i.i.d. 4-QAM symbols, uniform over `{(±1 ± j)/√2}`.
///
/// Each symbol has unit modulus, so the constellation is unit average power
/// by construction. Deterministic for a fixed seed.
pub fn generate_qam4_symbols(n: usize, seed: u64) -> CVector {
    assert!(n >= 1, "need at least one symbol");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = std::f64::consts::FRAC_1_SQRT_2;
    CVector::from_fn(n, |_, _| {
        let re = if rng.random::<bool>() { a } else { -a };
        let im = if rng.random::<bool>() { a } else { -a };
        Complex64::new(re, im)
    })
}

/// A batch of observed sensor outputs together with everything needed to
/// reproduce it.
#[derive(Debug, Clone)]
pub struct ObservationSet {
    samples: CMatrix,
    symbols: CVector,
    noise_variance: f64,
    seed: u64,
}

impl ObservationSet {
    /// Observed outputs, one column per time step (`m x N`).
    pub fn samples(&self) -> &CMatrix {
        &self.samples
    }

    /// The full transmitted symbol vector, warm-up history included.
    pub fn symbols(&self) -> &CVector {
        &self.symbols
    }

    /// Total noise variance per complex entry per sensor.
    pub fn noise_variance(&self) -> f64 {
        self.noise_variance
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn n_channels(&self) -> usize {
        self.samples.nrows()
    }

    pub fn n_samples(&self) -> usize {
        self.samples.ncols()
    }
}

/// Synthesizes sensor outputs by FIR convolution of the symbol stream with
/// each subchannel, plus circular complex Gaussian noise with total variance
/// `noise_variance` per complex entry (real and imaginary parts each carry
/// half).
///
/// The first `L-1` symbols act as warm-up history so that every emitted
/// sample is in convolution steady state: `P` input symbols yield
/// `N = P - L + 1` output samples, and output `t` corresponds to symbol
/// index `t + L - 1` of the input vector.
pub fn simulate_output(
    ch: &ChannelSet,
    symbols: &CVector,
    noise_variance: f64,
    seed: u64,
) -> ObservationSet {
    let l = ch.n_taps();
    assert!(
        symbols.len() >= l,
        "need at least L symbols to reach steady state"
    );
    assert!(
        noise_variance >= 0.0 && noise_variance.is_finite(),
        "noise variance must be finite and non-negative"
    );
    let m = ch.n_channels();
    let n = symbols.len() - l + 1;
    let mut samples = CMatrix::zeros(m, n);
    for t in 0..n {
        for i in 0..m {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..l {
                acc += ch.taps()[(i, k)] * symbols[t + l - 1 - k];
            }
            samples[(i, t)] = acc;
        }
    }
    if noise_variance > 0.0 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let normal = Normal::new(0.0, (noise_variance / 2.0).sqrt())
            .expect("standard deviation is finite and non-negative");
        for t in 0..n {
            for i in 0..m {
                let re = normal.sample(&mut rng);
                let im = normal.sample(&mut rng);
                samples[(i, t)] += Complex64::new(re, im);
            }
        }
    }
    ObservationSet {
        samples,
        symbols: symbols.clone(),
        noise_variance,
        seed,
    }
}

/// Noise variance that realizes a target SNR in dB for the given channel and
/// symbol draw: `10·log10(‖noiseless output‖² / (m·N·σ²)) = snr_db`.
///
/// The signal energy is the realized squared norm of the noiseless filtered
/// output for this symbol vector, not its expectation, so per-trial
/// calibration is exactly reproducible from the seeds.
pub fn noise_variance_for_snr(ch: &ChannelSet, symbols: &CVector, snr_db: f64) -> Result<f64> {
    if !snr_db.is_finite() {
        return Err(Error::InvalidParameter(
            "snr_db must be finite (±inf rejected)".into(),
        ));
    }
    if symbols.len() < ch.n_taps() {
        return Err(Error::Dimension(format!(
            "need at least L={} symbols, got {}",
            ch.n_taps(),
            symbols.len()
        )));
    }
    let noiseless = simulate_output(ch, symbols, 0.0, 0);
    let energy: f64 = noiseless.samples().iter().map(|c| c.norm_sqr()).sum();
    let denom = ch.n_channels() as f64 * noiseless.n_samples() as f64;
    Ok(energy / (denom * 10f64.powf(snr_db / 10.0)))
}

/// Parses a channel set from CSV text with columns `channel,tap,re,im`
/// (0-based indices). Every (channel, tap) cell of the `m x L` grid must
/// appear exactly once.
pub fn parse_channel_csv(text: &str) -> Result<ChannelSet> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let mut entries: Vec<(usize, usize, Complex64)> = Vec::new();
    for record in reader.records() {
        let record = record?;
        if record.len() != 4 {
            return Err(Error::InvalidParameter(format!(
                "channel CSV rows need 4 fields (channel,tap,re,im), got {}",
                record.len()
            )));
        }
        let idx = |i: usize| -> Result<usize> {
            record[i]
                .trim()
                .parse()
                .map_err(|_| Error::InvalidParameter(format!("bad index {:?}", &record[i])))
        };
        let num = |i: usize| -> Result<f64> {
            record[i]
                .trim()
                .parse()
                .map_err(|_| Error::InvalidParameter(format!("bad number {:?}", &record[i])))
        };
        entries.push((idx(0)?, idx(1)?, Complex64::new(num(2)?, num(3)?)));
    }
    if entries.is_empty() {
        return Err(Error::InvalidParameter("channel CSV has no data rows".into()));
    }
    let m = entries.iter().map(|e| e.0).max().unwrap() + 1;
    let l = entries.iter().map(|e| e.1).max().unwrap() + 1;
    if entries.len() != m * l {
        return Err(Error::InvalidParameter(format!(
            "channel CSV must cover the full {m}x{l} grid, got {} rows",
            entries.len()
        )));
    }
    let mut taps = CMatrix::zeros(m, l);
    let mut seen = vec![false; m * l];
    for (i, k, value) in entries {
        if std::mem::replace(&mut seen[i * l + k], true) {
            return Err(Error::InvalidParameter(format!(
                "duplicate channel CSV cell ({i},{k})"
            )));
        }
        taps[(i, k)] = value;
    }
    ChannelSet::new(taps)
}

/// Serializes a channel set to the CSV format accepted by
/// [`parse_channel_csv`].
pub fn channel_csv_string(ch: &ChannelSet) -> String {
    let mut out = String::from("channel,tap,re,im\n");
    for i in 0..ch.n_channels() {
        for k in 0..ch.n_taps() {
            let c = ch.taps()[(i, k)];
            out.push_str(&format!("{i},{k},{},{}\n", c.re, c.im));
        }
    }
    out
}

/// Minimum distance between the zeros of different subchannel transfer
/// polynomials `H_i(z) = Σ_k h_i(k) z^{-k}`.
///
/// Zero means common zeros (identifiability violated). Returns infinity when
/// no cross-channel pair of finite zeros exists. Requires `m ≥ 2` and
/// `L ≥ 2`; a subchannel whose coefficients all vanish is an error.
pub fn zero_separation(ch: &ChannelSet) -> Result<f64> {
    if ch.n_channels() < 2 || ch.n_taps() < 2 {
        return Err(Error::InvalidParameter(
            "zero separation needs m >= 2 subchannels and L >= 2 taps".into(),
        ));
    }
    let mut zero_sets = Vec::with_capacity(ch.n_channels());
    for i in 0..ch.n_channels() {
        let coeffs: Vec<Complex64> = (0..ch.n_taps()).map(|k| ch.taps()[(i, k)]).collect();
        zero_sets.push(polynomial_roots(&coeffs)?);
    }
    let mut best = f64::INFINITY;
    for i in 0..zero_sets.len() {
        for k in (i + 1)..zero_sets.len() {
            for zi in &zero_sets[i] {
                for zk in &zero_sets[k] {
                    best = best.min((zi - zk).norm());
                }
            }
        }
    }
    Ok(best)
}

/// All complex roots of a polynomial given by descending-power coefficients,
/// via Durand–Kerner iteration.
///
/// Leading near-zero coefficients are trimmed (the corresponding zeros
/// escape to infinity and are dropped). A constant polynomial has no roots.
fn polynomial_roots(coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
    let max_abs = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if max_abs == 0.0 {
        return Err(Error::DegeneratePolynomial);
    }
    let first = coeffs
        .iter()
        .position(|c| c.norm() > 1e-12 * max_abs)
        .ok_or(Error::DegeneratePolynomial)?;
    let trimmed = &coeffs[first..];
    let degree = trimmed.len() - 1;
    if degree == 0 {
        return Ok(Vec::new());
    }
    let lead = trimmed[0];
    let monic: Vec<Complex64> = trimmed.iter().map(|c| c / lead).collect();
    if degree == 1 {
        return Ok(vec![-monic[1]]);
    }

    let eval = |z: Complex64| {
        monic
            .iter()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    };

    // Staggered start points just inside the unit circle.
    let base = Complex64::new(0.4, 0.9);
    let mut roots: Vec<Complex64> = (1..=degree).map(|k| base.powu(k as u32)).collect();
    for _ in 0..500 {
        let mut shift = 0.0f64;
        for k in 0..degree {
            let zk = roots[k];
            let mut denom = Complex64::new(1.0, 0.0);
            for (j, &zj) in roots.iter().enumerate() {
                if j != k {
                    denom *= zk - zj;
                }
            }
            if denom.norm() == 0.0 {
                // Collided approximations; nudge apart and keep iterating.
                roots[k] += Complex64::new(1e-6, 2e-6);
                shift = f64::MAX;
                continue;
            }
            let delta = eval(zk) / denom;
            roots[k] = zk - delta;
            shift = shift.max(delta.norm() / (1.0 + roots[k].norm()));
        }
        if shift < 1e-13 {
            return Ok(roots);
        }
    }
    Err(Error::RootNonConvergence)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    // 2cos(pi/10) evaluated independently to 20 digits.
    const TWO_COS_PI_10: f64 = 1.9021130325903071442;
    // 2(cos(pi/10) - cos(pi/10 + pi/50)), same source.
    const TAP_DIFF_PI_50: f64 = 0.042560060813804336911;

    #[test]
    fn channel_pair_well_conditioned() {
        let ch = build_channel_pair(PI / 10.0, PI);
        assert_eq!(ch.n_channels(), 2);
        assert_eq!(ch.n_taps(), 3);
        assert_relative_eq!(ch.taps()[(0, 1)].re, -TWO_COS_PI_10, epsilon = 1e-14);
        assert_relative_eq!(ch.taps()[(1, 1)].re, TWO_COS_PI_10, epsilon = 1e-14);
        for k in [0, 2] {
            assert_eq!(ch.taps()[(0, k)], Complex64::new(1.0, 0.0));
            assert_eq!(ch.taps()[(1, k)], Complex64::new(1.0, 0.0));
        }
        assert!(ch.taps().iter().all(|c| c.im == 0.0));
    }

    #[test]
    fn channel_pair_identical_when_delta_zero() {
        let ch = build_channel_pair(PI / 2.0, 0.0);
        for k in 0..3 {
            assert_eq!(ch.taps()[(0, k)], ch.taps()[(1, k)]);
        }
        assert!(ch.taps()[(0, 1)].norm() < 1e-15);
    }

    #[test]
    fn channel_pair_severely_ill_conditioned_tap_gap() {
        let ch = build_channel_pair(PI / 10.0, PI / 50.0);
        let gap = (ch.taps()[(1, 1)] - ch.taps()[(0, 1)]).norm();
        assert_relative_eq!(gap, TAP_DIFF_PI_50, epsilon = 1e-13);
    }

    #[test]
    fn filter_matrix_hand_example() {
        // m=2, L=2, h(0)=[1,0], h(1)=[0,1]: rows are [1 0 0; 0 1 0; 0 1 0; 0 0 1].
        let taps = CMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new(1.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(1.0, 0.0),
            ],
        );
        let ch = ChannelSet::new(taps).unwrap();
        let h = build_filter_matrix(&ch, 2);
        let expect = [
            [1.0, 0.0, 0.0],
            [0.0, 1.0, 0.0],
            [0.0, 1.0, 0.0],
            [0.0, 0.0, 1.0],
        ];
        for (i, row) in expect.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                assert_eq!(h.matrix()[(i, j)], Complex64::new(v, 0.0));
            }
        }
    }

    #[test]
    fn filter_matrix_scalar_channel_is_scaled_identity() {
        let c = Complex64::new(0.3, -1.2);
        let ch = ChannelSet::new(CMatrix::from_element(1, 1, c)).unwrap();
        let h = build_filter_matrix(&ch, 3);
        assert_eq!(h.matrix().shape(), (3, 3));
        let expected = CMatrix::identity(3, 3) * c;
        assert_eq!(h.matrix(), &expected);
    }

    /// Independent reference: fills the matrix straight from the index rule
    /// "block-row i, column j holds h(j-i) when 0 <= j-i <= L-1".
    fn filter_matrix_reference(ch: &ChannelSet, window: usize) -> CMatrix {
        let (m, l) = (ch.n_channels(), ch.n_taps());
        CMatrix::from_fn(m * window, window + l - 1, |row, j| {
            let (block, i) = (row / m, row % m);
            if j >= block && j - block < l {
                ch.taps()[(i, j - block)]
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }

    #[test]
    fn filter_matrix_matches_index_rule_reference() {
        let ch = build_channel_pair(PI / 10.0, PI);
        let h = build_filter_matrix(&ch, 4);
        assert_eq!(h.matrix().shape(), (8, 6));
        assert_eq!(h.matrix(), &filter_matrix_reference(&ch, 4));
    }

    #[test]
    fn filter_matrix_nested_windows() {
        let ch = build_channel_pair(0.7, 1.1);
        let small = build_filter_matrix(&ch, 2);
        let large = build_filter_matrix(&ch, 5);
        let top_left = large.matrix().view((0, 0), (4, 4)).into_owned();
        assert_eq!(&top_left, small.matrix());
    }

    #[test]
    fn filter_matrix_channel_round_trip() {
        let ch = build_channel_pair(1.3, -0.4);
        let h = build_filter_matrix(&ch, 6);
        assert_eq!(&h.channel(), &ch);
    }

    #[test]
    fn qam_symbols_live_on_the_constellation() {
        let s = generate_qam4_symbols(4, 9);
        let a = std::f64::consts::FRAC_1_SQRT_2;
        for c in s.iter() {
            assert!((c.re.abs() - a).abs() < 1e-15);
            assert!((c.im.abs() - a).abs() < 1e-15);
            assert_relative_eq!(c.norm_sqr(), 1.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn qam_symbols_unit_power_and_small_mean() {
        let n = 100_000;
        let s = generate_qam4_symbols(n, 42);
        let power: f64 = s.iter().map(|c| c.norm_sqr()).sum::<f64>() / n as f64;
        assert_relative_eq!(power, 1.0, epsilon = 1e-12);
        let mean = s.iter().sum::<Complex64>() / n as f64;
        assert!(mean.norm() < 3.0 / (n as f64).sqrt());
    }

    #[test]
    fn qam_symbols_deterministic_per_seed() {
        assert_eq!(generate_qam4_symbols(256, 7), generate_qam4_symbols(256, 7));
        assert_ne!(generate_qam4_symbols(256, 7), generate_qam4_symbols(256, 8));
    }

    #[test]
    fn impulse_excitation_reads_out_the_taps() {
        let ch = build_channel_pair(PI / 10.0, PI / 3.0);
        let l = ch.n_taps();
        // Impulse at symbol time 0, i.e. right after the L-1 warm-up slots.
        let mut symbols = CVector::zeros(l - 1 + 8);
        symbols[l - 1] = Complex64::new(1.0, 0.0);
        let obs = simulate_output(&ch, &symbols, 0.0, 0);
        for i in 0..ch.n_channels() {
            for t in 0..obs.n_samples() {
                let expect = if t < l {
                    ch.taps()[(i, t)]
                } else {
                    Complex64::new(0.0, 0.0)
                };
                assert_eq!(obs.samples()[(i, t)], expect);
            }
        }
    }

    #[test]
    fn near_zero_channel_output_is_noise() {
        let ch = ChannelSet::new(CMatrix::from_element(1, 1, Complex64::new(1e-150, 0.0))).unwrap();
        let sigma2 = 0.09;
        let n = 10_000;
        let symbols = generate_qam4_symbols(n, 3);
        let obs = simulate_output(&ch, &symbols, sigma2, 11);
        let var: f64 = obs.samples().iter().map(|c| c.norm_sqr()).sum::<f64>() / n as f64;
        assert!((var - sigma2).abs() < 0.05 * sigma2, "var {var}");
    }

    #[test]
    fn simulate_output_deterministic_per_seed() {
        let ch = build_channel_pair(0.9, 0.2);
        let symbols = generate_qam4_symbols(64, 5);
        let a = simulate_output(&ch, &symbols, 0.5, 17);
        let b = simulate_output(&ch, &symbols, 0.5, 17);
        assert_eq!(a.samples(), b.samples());
        let c = simulate_output(&ch, &symbols, 0.5, 18);
        assert_ne!(a.samples(), c.samples());
    }

    #[test]
    fn noise_variance_matches_snr_definition() {
        let ch = build_channel_pair(PI / 10.0, PI);
        let n = 100;
        let symbols = generate_qam4_symbols(n + ch.n_taps() - 1, 21);
        let noiseless = simulate_output(&ch, &symbols, 0.0, 0);
        let energy: f64 = noiseless.samples().iter().map(|c| c.norm_sqr()).sum();
        let sigma2 = noise_variance_for_snr(&ch, &symbols, 10.0).unwrap();
        assert_relative_eq!(sigma2, energy / (2.0 * 100.0 * 10.0), epsilon = 1e-12);
    }

    #[test]
    fn noise_variance_scales_with_signal_energy() {
        let ch = build_channel_pair(0.4, 2.0);
        let symbols = generate_qam4_symbols(128, 2);
        let base = noise_variance_for_snr(&ch, &symbols, 7.0).unwrap();
        let boosted = ChannelSet::new(ch.taps() * Complex64::new(2f64.sqrt(), 0.0)).unwrap();
        let doubled = noise_variance_for_snr(&boosted, &symbols, 7.0).unwrap();
        assert_relative_eq!(doubled, 2.0 * base, epsilon = 1e-12);
        // Higher SNR means less noise; the infinite-SNR limit is zero.
        let tiny = noise_variance_for_snr(&ch, &symbols, 300.0).unwrap();
        assert!(tiny < base * 1e-28);
    }

    #[test]
    fn noise_variance_rejects_infinite_snr() {
        let ch = build_channel_pair(0.4, 2.0);
        let symbols = generate_qam4_symbols(16, 2);
        assert!(noise_variance_for_snr(&ch, &symbols, f64::INFINITY).is_err());
        assert!(noise_variance_for_snr(&ch, &symbols, f64::NEG_INFINITY).is_err());
    }

    // Zero-separation oracle: the pair channels are x^2 - 2cos(a)x + 1 with
    // roots e^{±ia}, so distances come straight from points on the unit
    // circle (evaluated independently to 20 digits).
    const ZERO_SEP_DELTA_PI: f64 = 1.9021130325903071442;
    const ZERO_SEP_DELTA_PI_50: f64 = 0.062821518156256587678;

    #[test]
    fn zero_separation_of_test_pairs() {
        let sep = zero_separation(&build_channel_pair(PI / 10.0, PI)).unwrap();
        assert_relative_eq!(sep, ZERO_SEP_DELTA_PI, epsilon = 1e-10);
        let sep = zero_separation(&build_channel_pair(PI / 10.0, PI / 50.0)).unwrap();
        assert_relative_eq!(sep, ZERO_SEP_DELTA_PI_50, epsilon = 1e-10);
    }

    #[test]
    fn zero_separation_detects_common_zeros() {
        let sep = zero_separation(&build_channel_pair(PI / 10.0, 0.0)).unwrap();
        assert!(sep < 1e-10, "sep {sep}");
    }

    #[test]
    fn zero_separation_coprime_monomials() {
        // h1 = [1, 0] has its zero at the origin; h2 = [0, 1] is constant
        // after trimming, so no cross pair exists.
        let taps = CMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new(1.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(1.0, 0.0),
            ],
        );
        let ch = ChannelSet::new(taps).unwrap();
        let sep = zero_separation(&ch).unwrap();
        assert!(sep > 0.0);
        assert!(sep.is_infinite());
    }

    #[test]
    fn zero_separation_requires_multichannel_fir() {
        let ch = ChannelSet::new(CMatrix::from_element(1, 3, Complex64::new(1.0, 0.0))).unwrap();
        assert!(zero_separation(&ch).is_err());
    }

    #[test]
    fn polynomial_roots_match_analytic_quadratic() {
        let theta: f64 = PI / 10.0;
        let coeffs = [
            Complex64::new(1.0, 0.0),
            Complex64::new(-2.0 * theta.cos(), 0.0),
            Complex64::new(1.0, 0.0),
        ];
        let mut roots = polynomial_roots(&coeffs).unwrap();
        roots.sort_by(|a, b| a.im.partial_cmp(&b.im).unwrap());
        assert_relative_eq!(roots[0].re, theta.cos(), epsilon = 1e-12);
        assert_relative_eq!(roots[0].im, -theta.sin(), epsilon = 1e-12);
        assert_relative_eq!(roots[1].im, theta.sin(), epsilon = 1e-12);
    }

    #[test]
    fn polynomial_roots_reconstruct_coefficients() {
        // Residual + coefficient reconstruction check on a degree-5 complex
        // polynomial.
        let coeffs: Vec<Complex64> = (0..6)
            .map(|k| Complex64::new(1.3 - 0.4 * k as f64, 0.2 * k as f64 - 0.5))
            .collect();
        let roots = polynomial_roots(&coeffs).unwrap();
        assert_eq!(roots.len(), 5);
        let mut rebuilt = vec![Complex64::new(1.0, 0.0)];
        for r in &roots {
            let mut next = vec![Complex64::new(0.0, 0.0); rebuilt.len() + 1];
            for (i, &c) in rebuilt.iter().enumerate() {
                next[i] += c;
                next[i + 1] -= c * r;
            }
            rebuilt = next;
        }
        for (i, &c) in rebuilt.iter().enumerate() {
            let expect = coeffs[i] / coeffs[0];
            assert!((c - expect).norm() < 1e-9, "coeff {i}: {c} vs {expect}");
        }
    }

    #[test]
    fn polynomial_roots_degenerate_is_an_error() {
        let coeffs = [Complex64::new(0.0, 0.0); 3];
        assert!(matches!(
            polynomial_roots(&coeffs),
            Err(Error::DegeneratePolynomial)
        ));
    }

    #[test]
    fn channel_csv_round_trip() {
        let mut ch = build_channel_pair(0.8, 1.9);
        // Make it complex so both fields are exercised.
        let taps = ch.taps() + CMatrix::from_element(2, 3, Complex64::new(0.0, 0.125));
        ch = ChannelSet::new(taps).unwrap();
        let text = channel_csv_string(&ch);
        let back = parse_channel_csv(&text).unwrap();
        assert_eq!(&back, &ch);
    }

    #[test]
    fn channel_csv_rejects_malformed_input() {
        assert!(parse_channel_csv("channel,tap,re,im\n").is_err());
        assert!(parse_channel_csv("channel,tap,re,im\n0,0,1.0,0.0\n0,0,2.0,0.0\n").is_err());
        // Hole in the grid: (1,1) missing.
        assert!(parse_channel_csv(
            "channel,tap,re,im\n0,0,1,0\n0,1,1,0\n1,0,1,0\n"
        )
        .is_err());
        assert!(parse_channel_csv("channel,tap,re,im\n0,0,abc,0\n").is_err());
    }

    #[test]
    fn channel_set_rejects_invalid_taps() {
        assert!(ChannelSet::new(CMatrix::zeros(2, 3)).is_err());
        let nan = CMatrix::from_element(1, 2, Complex64::new(f64::NAN, 0.0));
        assert!(ChannelSet::new(nan).is_err());
    }

    fn finite_complex() -> impl Strategy<Value = Complex64> {
        (-10.0f64..10.0, -10.0f64..10.0).prop_map(|(re, im)| Complex64::new(re, im))
    }

    proptest! {
        #[test]
        fn stacked_round_trip(
            m in 1usize..4,
            l in 1usize..6,
            values in proptest::collection::vec(finite_complex(), 24),
        ) {
            let taps = CMatrix::from_fn(m, l, |i, k| {
                values[(i * l + k) % values.len()] + Complex64::new(1.0, 0.0)
            });
            let ch = ChannelSet::new(taps).unwrap();
            let back = ChannelSet::from_stacked(&ch.stacked(), m).unwrap();
            prop_assert_eq!(&back, &ch);
        }

        #[test]
        fn stacking_order_is_tap_major(m in 1usize..4, l in 1usize..6) {
            let taps = CMatrix::from_fn(m, l, |i, k| Complex64::new(i as f64 + 1.0, k as f64));
            let ch = ChannelSet::new(taps).unwrap();
            let h = ch.stacked();
            for k in 0..l {
                for i in 0..m {
                    prop_assert_eq!(h[k * m + i], ch.taps()[(i, k)]);
                }
            }
        }
    }
}
