//! OFDM numerology, band plans, pilot-symbol frames, time-domain
//! propagation, and least-squares channel estimation in both domains.
//!
//! DFT convention: `cir_to_cfr` is the plain forward DFT (no scaling) with
//! the output reordered to ascending subcarrier index n in
//! {-(N-1)/2, ..., (N-1)/2}; `cfr_to_cir` is its exact inverse (1/N
//! scaling). With this pair the tap energy equals the mean CFR power
//! (Parseval).

use ndarray::{Array1, Array2};
use num_complex::Complex;
use rustfft::FftPlanner;

use crate::channel_model::{add_awgn, NoiseModel, SparseChannel};
use crate::error::SpliceError;
use crate::linalg::lstsq;
use crate::numeric::Real;

/// Subcarrier indices n for an odd N: -(N-1)/2 ..= (N-1)/2.
pub fn subcarrier_indices(n_subcarriers: usize) -> impl Iterator<Item = i64> {
    let half = (n_subcarriers as i64 - 1) / 2;
    -half..=half
}

/// M sub-bands of N subcarriers each, spaced `spacing_hz` apart. N is odd
/// and shared across bands; centers are strictly increasing.
#[derive(Clone, Debug, PartialEq)]
pub struct BandPlan<F> {
    centers_hz: Vec<F>,
    n_subcarriers: usize,
    spacing_hz: F,
}

impl<F: Real> BandPlan<F> {
    pub fn new(centers_hz: Vec<F>, n_subcarriers: usize, spacing_hz: F) -> Result<Self, SpliceError> {
        if centers_hz.is_empty() || spacing_hz <= F::zero() {
            return Err(SpliceError::NonPositiveBandwidth);
        }
        if n_subcarriers % 2 == 0 {
            return Err(SpliceError::BadConfig(
                "subcarrier count must be odd".into(),
            ));
        }
        for w in centers_hz.windows(2) {
            if w[1] <= w[0] {
                return Err(SpliceError::BadConfig(
                    "band centers must be strictly increasing".into(),
                ));
            }
        }
        Ok(Self {
            centers_hz,
            n_subcarriers,
            spacing_hz,
        })
    }

    pub fn num_bands(&self) -> usize {
        self.centers_hz.len()
    }

    pub fn num_subcarriers(&self) -> usize {
        self.n_subcarriers
    }

    pub fn spacing_hz(&self) -> F {
        self.spacing_hz
    }

    pub fn centers_hz(&self) -> &[F] {
        &self.centers_hz
    }

    pub fn center_hz(&self, m: usize) -> Result<F, SpliceError> {
        self.centers_hz
            .get(m)
            .copied()
            .ok_or(SpliceError::BandOutOfRange {
                index: m,
                bands: self.num_bands(),
            })
    }

    /// Sample rate of one band's useful OFDM symbol, `N * f_s`.
    pub fn band_rate_hz(&self) -> F {
        F::of(self.n_subcarriers as f64) * self.spacing_hz
    }
}

/// Builds a contiguous band plan: `total_bw / sub_bw` bands symmetric about
/// `overall_center`, each with the largest odd subcarrier count fitting
/// `sub_bw / f_s`.
pub fn build_band_plan<F: Real>(
    total_bw_hz: F,
    sub_bw_hz: F,
    overall_center_hz: F,
    spacing_hz: F,
) -> Result<BandPlan<F>, SpliceError> {
    if total_bw_hz <= F::zero() || sub_bw_hz <= F::zero() || spacing_hz <= F::zero() {
        return Err(SpliceError::NonPositiveBandwidth);
    }
    let m = exact_ratio(total_bw_hz, sub_bw_hz)?;
    let tones = exact_ratio(sub_bw_hz, spacing_hz)?;
    let n = if tones % 2 == 0 { tones - 1 } else { tones };
    let centers = (0..m)
        .map(|i| {
            let offset = F::of(i as f64) - F::of((m - 1) as f64) / F::of(2.0);
            overall_center_hz + offset * sub_bw_hz
        })
        .collect();
    BandPlan::new(centers, n, spacing_hz)
}

fn exact_ratio<F: Real>(num: F, den: F) -> Result<usize, SpliceError> {
    let r = (num / den).as_f64();
    let rounded = r.round();
    if rounded < 1.0 || (r - rounded).abs() > 1e-6 * rounded {
        return Err(SpliceError::NotDivisible {
            num: num.as_f64(),
            den: den.as_f64(),
        });
    }
    Ok(rounded as usize)
}

/// Absolute subcarrier frequencies of band m: `f_{m,0} + n f_s`.
pub fn subcarrier_freqs<F: Real>(plan: &BandPlan<F>, m: usize) -> Result<Vec<F>, SpliceError> {
    let center = plan.center_hz(m)?;
    Ok(subcarrier_indices(plan.num_subcarriers())
        .map(|n| center + F::of(n as f64) * plan.spacing_hz())
        .collect())
}

/// Known pilot symbols of one band, unit modulus per subcarrier.
#[derive(Clone, Debug)]
pub struct PilotGrid<F> {
    pub band: usize,
    pub symbols: Vec<Complex<F>>,
}

impl<F: Real> PilotGrid<F> {
    pub fn new(band: usize, symbols: Vec<Complex<F>>) -> Result<Self, SpliceError> {
        for (i, s) in symbols.iter().enumerate() {
            if (s.norm() - F::one()).abs() > F::of(1e-9) {
                return Err(SpliceError::NonUnitPilot(i));
            }
        }
        Ok(Self { band, symbols })
    }

    /// All-ones pilots (the default in the measurement model).
    pub fn unit(band: usize, n_subcarriers: usize) -> Self {
        Self {
            band,
            symbols: vec![Complex::new(F::one(), F::zero()); n_subcarriers],
        }
    }
}

/// Measurement flavor carried along with CFR samples.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CfrKind {
    Clean,
    Noisy,
    Distorted,
}

/// Per-band CFR samples over the band's subcarrier frequencies.
#[derive(Clone, Debug)]
pub struct CfrMeasurement<F> {
    pub band: usize,
    pub freqs_hz: Vec<F>,
    pub samples: Vec<Complex<F>>,
    pub kind: CfrKind,
}

impl<F: Real> CfrMeasurement<F> {
    pub fn new(
        band: usize,
        freqs_hz: Vec<F>,
        samples: Vec<Complex<F>>,
        kind: CfrKind,
    ) -> Result<Self, SpliceError> {
        if freqs_hz.len() != samples.len() {
            return Err(SpliceError::LengthMismatch {
                expected: freqs_hz.len(),
                actual: samples.len(),
            });
        }
        Ok(Self {
            band,
            freqs_hz,
            samples,
            kind,
        })
    }
}

/// One OFDM symbol in time: cyclic prefix followed by the N useful samples
/// at rate `N * f_s`.
#[derive(Clone, Debug)]
pub struct TimeDomainFrame<F> {
    pub samples: Vec<Complex<F>>,
    pub cp_len: usize,
}

impl<F: Real> TimeDomainFrame<F> {
    pub fn useful(&self) -> &[Complex<F>] {
        &self.samples[self.cp_len..]
    }
}

/// Forward DFT of CIR taps, output in ascending subcarrier-index order.
pub fn cir_to_cfr<F: Real>(taps: &[Complex<F>]) -> Result<Vec<Complex<F>>, SpliceError> {
    if taps.is_empty() {
        return Err(SpliceError::EmptyInput);
    }
    let n = taps.len();
    let mut buf = taps.to_vec();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    // fftshift: bin k holds n = k for k <= (N-1)/2, n = k - N above
    let half = (n + 1) / 2;
    buf.rotate_left(half % n);
    Ok(buf)
}

/// Inverse of [`cir_to_cfr`]: samples ordered by ascending subcarrier index,
/// returns N CIR taps (tap l sits at delay `l / (N f_s)`).
pub fn cfr_to_cir<F: Real>(samples: &[Complex<F>]) -> Result<Vec<Complex<F>>, SpliceError> {
    if samples.is_empty() {
        return Err(SpliceError::EmptyInput);
    }
    let n = samples.len();
    let mut buf = samples.to_vec();
    // ifftshift: undo the rotation above
    let half = (n + 1) / 2;
    buf.rotate_right(half % n);
    FftPlanner::new().plan_fft_inverse(n).process(&mut buf);
    let scale = F::one() / F::of(n as f64);
    for x in &mut buf {
        *x = *x * Complex::new(scale, F::zero());
    }
    Ok(buf)
}

/// Builds the time-domain pilot frame of band m: inverse DFT of the pilot
/// symbols with a cyclic prefix of `cp_len` samples prepended.
pub fn make_pilot_frame<F: Real>(
    plan: &BandPlan<F>,
    m: usize,
    grid: &PilotGrid<F>,
    cp_len: usize,
) -> Result<TimeDomainFrame<F>, SpliceError> {
    plan.center_hz(m)?;
    if grid.band != m || grid.symbols.len() != plan.num_subcarriers() {
        return Err(SpliceError::PlanMismatch(format!(
            "pilot grid for band {} with {} symbols does not match band {} with N = {}",
            grid.band,
            grid.symbols.len(),
            m,
            plan.num_subcarriers()
        )));
    }
    let useful = cfr_to_cir(&grid.symbols)?;
    let mut samples = Vec::with_capacity(cp_len + useful.len());
    samples.extend_from_slice(&useful[useful.len() - cp_len.min(useful.len())..]);
    samples.extend_from_slice(&useful);
    Ok(TimeDomainFrame { samples, cp_len })
}

/// Rounds a sparse channel to discrete taps at the given sample rate.
pub fn channel_to_taps<F: Real>(
    channel: &SparseChannel<F>,
    rate_hz: F,
    len: usize,
) -> Vec<Complex<F>> {
    let mut taps = vec![Complex::new(F::zero(), F::zero()); len];
    for &(tau, gain) in channel.paths() {
        let idx = (tau * rate_hz).round().as_f64() as usize;
        if idx < len {
            taps[idx] += gain;
        }
    }
    taps
}

/// Linear convolution of a frame with channel taps (truncated to the frame
/// length) plus AWGN. The channel must fit inside the cyclic prefix.
pub fn propagate_time<F: Real>(
    frame: &TimeDomainFrame<F>,
    taps: &[Complex<F>],
    noise: &NoiseModel<F>,
) -> Result<TimeDomainFrame<F>, SpliceError> {
    if taps.len() > frame.cp_len + 1 {
        return Err(SpliceError::ChannelTooLong {
            taps: taps.len(),
            max: frame.cp_len + 1,
        });
    }
    let x = &frame.samples;
    let mut y = vec![Complex::new(F::zero(), F::zero()); x.len()];
    for (i, out) in y.iter_mut().enumerate() {
        for (l, tap) in taps.iter().enumerate() {
            if i >= l {
                *out += *tap * x[i - l];
            }
        }
    }
    let y = add_awgn(&y, noise)?;
    Ok(TimeDomainFrame {
        samples: y,
        cp_len: frame.cp_len,
    })
}

/// Time-domain LS channel estimate: `h = X^+ y` with X the Toeplitz
/// convolution matrix of the known transmit frame, L columns.
pub fn ls_estimate_time<F: Real>(
    rx: &TimeDomainFrame<F>,
    tx: &TimeDomainFrame<F>,
    channel_len: usize,
) -> Result<Vec<Complex<F>>, SpliceError> {
    if rx.samples.len() != tx.samples.len() {
        return Err(SpliceError::LengthMismatch {
            expected: tx.samples.len(),
            actual: rx.samples.len(),
        });
    }
    if channel_len == 0 || channel_len > tx.samples.len() {
        return Err(SpliceError::BadConfig(format!(
            "channel length {channel_len} invalid for frame of {} samples",
            tx.samples.len()
        )));
    }
    let rows = tx.samples.len();
    let zero = Complex::new(F::zero(), F::zero());
    let mut x = Array2::from_elem((rows, channel_len), zero);
    for i in 0..rows {
        for l in 0..channel_len.min(i + 1) {
            x[[i, l]] = tx.samples[i - l];
        }
    }
    let y = Array1::from_vec(rx.samples.clone());
    let sol = lstsq(&x, &y)?;
    Ok(sol.solution.to_vec())
}

/// Frequency-domain LS: element-wise `H = Y / X` with protected division.
pub fn ls_estimate_freq<F: Real>(
    rx_grid: &CfrMeasurement<F>,
    pilots: &PilotGrid<F>,
) -> Result<CfrMeasurement<F>, SpliceError> {
    if rx_grid.band != pilots.band {
        return Err(SpliceError::PlanMismatch(format!(
            "measurement band {} vs pilot band {}",
            rx_grid.band, pilots.band
        )));
    }
    if rx_grid.samples.len() != pilots.symbols.len() {
        return Err(SpliceError::LengthMismatch {
            expected: pilots.symbols.len(),
            actual: rx_grid.samples.len(),
        });
    }
    let cutoff = F::of(1e-12);
    let samples = rx_grid
        .samples
        .iter()
        .zip(&pilots.symbols)
        .enumerate()
        .map(|(i, (y, x))| {
            if x.norm() < cutoff {
                Err(SpliceError::PilotUnderflow(i))
            } else {
                Ok(y / x)
            }
        })
        .collect::<Result<Vec<_>, _>>()?;
    CfrMeasurement::new(rx_grid.band, rx_grid.freqs_hz.clone(), samples, rx_grid.kind)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel_model::synth_cfr;
    use crate::numeric::norm2;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn band_plan_table_160mhz() {
        // 160 MHz split at 5 GHz: 2x80, 4x40, 8x20
        let plan = build_band_plan(160e6, 80e6, 5.0e9, 312.5e3).unwrap();
        assert_eq!(plan.centers_hz(), &[4.96e9, 5.04e9]);
        assert_eq!(plan.num_subcarriers(), 255);

        let plan = build_band_plan(160e6, 40e6, 5.0e9, 312.5e3).unwrap();
        assert_eq!(plan.centers_hz(), &[4.94e9, 4.98e9, 5.02e9, 5.06e9]);
        assert_eq!(plan.num_subcarriers(), 127);

        let plan = build_band_plan(160e6_f64, 20e6, 5.0e9, 312.5e3).unwrap();
        let expected: Vec<f64> = (0..8).map(|i| 4.93e9 + i as f64 * 20e6).collect();
        for (a, b) in plan.centers_hz().iter().zip(&expected) {
            assert!((a - b).abs() < 1e-3, "{a} vs {b}");
        }
        assert_eq!(plan.num_subcarriers(), 63);
    }

    #[test]
    fn band_plan_table_80mhz() {
        // 80 MHz split at 2.45 GHz: 2x40, 4x20
        let plan = build_band_plan(80e6, 40e6, 2.45e9, 312.5e3).unwrap();
        assert_eq!(plan.centers_hz(), &[2.43e9, 2.47e9]);

        let plan = build_band_plan(80e6_f64, 20e6, 2.45e9, 312.5e3).unwrap();
        let expected = [2.42e9_f64, 2.44e9, 2.46e9, 2.48e9];
        for (a, b) in plan.centers_hz().iter().zip(&expected) {
            assert!((a - b).abs() < 1e-3, "{a} vs {b}");
        }
    }

    #[test]
    fn band_plan_single_band_and_errors() {
        let plan = build_band_plan(20e6, 20e6, 2.412e9, 312.5e3).unwrap();
        assert_eq!(plan.num_bands(), 1);
        assert_eq!(plan.centers_hz()[0], 2.412e9);

        assert!(matches!(
            build_band_plan(100e6, 40e6, 5.0e9, 312.5e3),
            Err(SpliceError::NotDivisible { .. })
        ));
    }

    #[test]
    fn subcarrier_freqs_formula() {
        let plan = BandPlan::new(vec![100.0], 3, 10.0).unwrap();
        assert_eq!(subcarrier_freqs(&plan, 0).unwrap(), vec![90.0, 100.0, 110.0]);
        assert!(matches!(
            subcarrier_freqs(&plan, 1),
            Err(SpliceError::BandOutOfRange { .. })
        ));
    }

    #[test]
    fn subcarrier_freqs_equispaced_and_contain_center() {
        let plan = build_band_plan(20e6_f64, 20e6, 5.0e9, 312.5e3).unwrap();
        let freqs = subcarrier_freqs(&plan, 0).unwrap();
        assert_eq!(freqs.len(), 63);
        assert!(freqs.iter().any(|&f| f == 5.0e9));
        for w in freqs.windows(2) {
            assert!((w[1] - w[0] - 312.5e3).abs() < 1e-3);
        }
    }

    #[test]
    fn dft_pair_impulse_and_roundtrip() {
        let mut taps = vec![c(0.0, 0.0); 7];
        taps[0] = c(1.0, 0.0);
        let cfr = cir_to_cfr(&taps).unwrap();
        for h in &cfr {
            assert!((h - c(1.0, 0.0)).norm() < 1e-12);
        }
        let back = cfr_to_cir(&cfr).unwrap();
        for (a, b) in back.iter().zip(&taps) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn dft_matches_synth_cfr_at_baseband_grid() {
        // two on-grid taps; compare against direct evaluation of the CFR sum
        let n = 63usize;
        let fs = 312.5e3;
        let mut taps = vec![c(0.0, 0.0); n];
        taps[0] = c(1.0, 0.0);
        taps[5] = c(0.5, -0.25);
        let cfr = cir_to_cfr(&taps).unwrap();

        let rate = n as f64 * fs;
        let channel = crate::channel_model::SparseChannel::new(vec![
            (0.0, taps[0]),
            (5.0 / rate, taps[5]),
        ])
        .unwrap();
        let freqs: Vec<f64> = subcarrier_indices(n).map(|k| k as f64 * fs).collect();
        let direct = synth_cfr(&channel, &freqs);
        for (a, b) in cfr.iter().zip(&direct) {
            assert!((a - b).norm() < 1e-9, "{a} vs {b}");
        }
    }

    #[test]
    fn parseval_energy_identity() {
        let taps: Vec<Complex<f64>> = (0..15)
            .map(|i| c((i as f64 * 0.37).sin(), (i as f64 * 0.91).cos()))
            .collect();
        let cfr = cir_to_cfr(&taps).unwrap();
        let tap_energy: f64 = taps.iter().map(|t| t.norm_sqr()).sum();
        let mean_power: f64 =
            cfr.iter().map(|h| h.norm_sqr()).sum::<f64>() / cfr.len() as f64;
        assert!((tap_energy - mean_power).abs() < 1e-9 * tap_energy);
    }

    #[test]
    fn pilot_frame_roundtrip_and_lengths() {
        let plan = build_band_plan(20e6, 20e6, 5.0e9, 312.5e3).unwrap();
        let grid = PilotGrid::unit(0, plan.num_subcarriers());
        let frame = make_pilot_frame(&plan, 0, &grid, 16).unwrap();
        assert_eq!(frame.samples.len(), 63 + 16);

        // all-ones pilots concentrate energy at sample 0 of the useful part
        let useful = frame.useful();
        let peak: f64 = useful[0].norm();
        for s in &useful[1..] {
            assert!(s.norm() < 1e-9 * peak.max(1.0));
        }

        let spectrum = cir_to_cfr(useful).unwrap();
        for (s, p) in spectrum.iter().zip(&grid.symbols) {
            assert!((s - p).norm() < 1e-9);
        }

        let no_cp = make_pilot_frame(&plan, 0, &grid, 0).unwrap();
        assert_eq!(no_cp.samples.len(), 63);
    }

    #[test]
    fn propagate_unit_and_scaled_taps() {
        let plan = build_band_plan(20e6, 20e6, 5.0e9, 312.5e3).unwrap();
        let grid = PilotGrid::unit(0, plan.num_subcarriers());
        let frame = make_pilot_frame(&plan, 0, &grid, 8).unwrap();

        let out = propagate_time(&frame, &[c(1.0, 0.0)], &NoiseModel::Noiseless).unwrap();
        for (a, b) in out.samples.iter().zip(&frame.samples) {
            assert!((a - b).norm() < 1e-15);
        }
        let out = propagate_time(&frame, &[c(0.5, 0.0)], &NoiseModel::Noiseless).unwrap();
        for (a, b) in out.samples.iter().zip(&frame.samples) {
            assert!((a - b * c(0.5, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn propagate_two_tap_impulse() {
        let mut samples = vec![c(0.0, 0.0); 16];
        samples[4] = c(1.0, 0.0); // impulse within the useful part
        let frame = TimeDomainFrame { samples, cp_len: 4 };
        let out = propagate_time(&frame, &[c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)], &NoiseModel::Noiseless)
            .unwrap();
        for (i, s) in out.samples.iter().enumerate() {
            let expected = if i == 4 || i == 6 { 1.0 } else { 0.0 };
            assert!((s.norm() - expected).abs() < 1e-15, "sample {i}");
        }
    }

    #[test]
    fn propagate_rejects_long_channel() {
        let frame = TimeDomainFrame {
            samples: vec![c(1.0, 0.0); 16],
            cp_len: 2,
        };
        assert!(matches!(
            propagate_time(&frame, &[c(1.0, 0.0); 4], &NoiseModel::Noiseless),
            Err(SpliceError::ChannelTooLong { .. })
        ));
    }

    #[test]
    fn ls_time_identity_toeplitz() {
        // impulse tx: X is identity, estimate equals rx
        let mut tx = vec![c(0.0, 0.0); 5];
        tx[0] = c(1.0, 0.0);
        let tx = TimeDomainFrame { samples: tx, cp_len: 0 };
        let rx = TimeDomainFrame {
            samples: vec![c(0.3, 1.0), c(-1.0, 0.2), c(0.0, 0.0), c(2.0, -2.0), c(0.1, 0.1)],
            cp_len: 0,
        };
        let h = ls_estimate_time(&rx, &tx, 5).unwrap();
        for (a, b) in h.iter().zip(&rx.samples) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn ls_time_recovers_sparse_taps() {
        let plan = build_band_plan(20e6, 20e6, 5.0e9, 312.5e3).unwrap();
        let grid = PilotGrid::unit(0, plan.num_subcarriers());
        let tx = make_pilot_frame(&plan, 0, &grid, 8).unwrap();
        let taps = [c(1.0, 0.0), c(0.0, 0.0), c(0.5, 0.0)];
        let rx = propagate_time(&tx, &taps, &NoiseModel::Noiseless).unwrap();
        let h = ls_estimate_time(&rx, &tx, 3).unwrap();
        for (a, b) in h.iter().zip(&taps) {
            assert!((a - b).norm() < 1e-9, "{a} vs {b}");
        }
        // exact-model residual
        let hr = ls_estimate_time(&rx, &tx, 9).unwrap();
        let mut resid = rx.samples.clone();
        for (i, r) in resid.iter_mut().enumerate() {
            for (l, tap) in hr.iter().enumerate() {
                if i >= l {
                    *r -= *tap * tx.samples[i - l];
                }
            }
        }
        assert!(norm2(&resid) / norm2(&rx.samples) < 1e-9);
    }

    #[test]
    fn ls_freq_identity_and_unit_pilots() {
        let plan = build_band_plan(20e6, 20e6, 5.0e9, 312.5e3).unwrap();
        let freqs = subcarrier_freqs(&plan, 0).unwrap();
        let pilots = PilotGrid::unit(0, plan.num_subcarriers());

        // Y = X -> all-ones estimate
        let rx = CfrMeasurement::new(0, freqs.clone(), pilots.symbols.clone(), CfrKind::Clean)
            .unwrap();
        let est = ls_estimate_freq(&rx, &pilots).unwrap();
        for h in &est.samples {
            assert!((h - c(1.0, 0.0)).norm() < 1e-12);
        }

        // unit pilots: estimate equals the synthesized CFR exactly
        let channel = crate::channel_model::SparseChannel::new(vec![
            (0.0, c(1.0, 0.0)),
            (30e-9, c(0.5, 0.5)),
        ])
        .unwrap();
        let samples = synth_cfr(&channel, &freqs);
        let rx = CfrMeasurement::new(0, freqs, samples.clone(), CfrKind::Clean).unwrap();
        let est = ls_estimate_freq(&rx, &pilots).unwrap();
        for (a, b) in est.samples.iter().zip(&samples) {
            assert!((a - b).norm() < 1e-15);
        }
    }

    #[test]
    fn ls_freq_noise_variance() {
        // with AWGN at linear snr, the per-subcarrier estimation error
        // variance is 1/snr (unit pilots)
        let plan = build_band_plan(20e6, 20e6, 5.0e9, 312.5e3).unwrap();
        let freqs = subcarrier_freqs(&plan, 0).unwrap();
        let pilots = PilotGrid::unit(0, plan.num_subcarriers());
        let clean = vec![c(1.0, 0.0); freqs.len()];
        let snr = 10.0;
        let mut acc = 0.0;
        let mut count = 0usize;
        for seed in 0..400u64 {
            let noisy = add_awgn(&clean, &NoiseModel::Awgn { snr, seed }).unwrap();
            let rx = CfrMeasurement::new(0, freqs.clone(), noisy, CfrKind::Noisy).unwrap();
            let est = ls_estimate_freq(&rx, &pilots).unwrap();
            for (a, b) in est.samples.iter().zip(&clean) {
                acc += (a - b).norm_sqr();
                count += 1;
            }
        }
        let var = acc / count as f64;
        assert!((var - 1.0 / snr).abs() < 0.05 / snr, "variance {var}");
    }

    #[test]
    fn ls_freq_protected_division() {
        let pilots = PilotGrid {
            band: 0,
            symbols: vec![c(0.0, 0.0)],
        };
        let rx = CfrMeasurement::new(0, vec![1e9], vec![c(1.0, 0.0)], CfrKind::Clean).unwrap();
        assert!(matches!(
            ls_estimate_freq(&rx, &pilots),
            Err(SpliceError::PilotUnderflow(0))
        ));
    }

    proptest! {
        #[test]
        fn dft_roundtrip_random(len in 1usize..40, seed in 0u64..1000) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let taps: Vec<Complex<f64>> = (0..len)
                .map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect();
            let back = cfr_to_cir(&cir_to_cfr(&taps).unwrap()).unwrap();
            for (a, b) in back.iter().zip(&taps) {
                prop_assert!((a - b).norm() < 1e-12);
            }
        }
    }
}
