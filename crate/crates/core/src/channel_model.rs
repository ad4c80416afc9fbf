//! Ground-truth sparse multipath channels, CFR synthesis at arbitrary
//! frequency points, per-band phase distortion, AWGN, and delay-resolution
//! arithmetic.

use num_complex::Complex;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::SpliceError;
use crate::numeric::{cis, Real, SPEED_OF_LIGHT};

/// How a path's complex gain is realized from its average power.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GainMode {
    /// Gain magnitude `10^(avg_power_db/20)`, phase 0.
    Deterministic,
    /// Complex Gaussian gain with mean power `10^(avg_power_db/10)`,
    /// independently redrawn per realization (per seed).
    Rayleigh,
}

/// One multipath component to realize.
#[derive(Clone, Copy, Debug)]
pub struct PathSpec<F> {
    pub delay_s: F,
    pub avg_power_db: F,
    pub gain_mode: GainMode,
}

/// A sparse multipath channel: K delays with complex gains, delays strictly
/// increasing.
#[derive(Clone, Debug)]
pub struct SparseChannel<F: Real> {
    paths: Vec<(F, Complex<F>)>,
}

impl<F: Real> SparseChannel<F> {
    /// Builds a channel from explicit (delay, gain) pairs. Delays must be
    /// strictly increasing and the list non-empty.
    pub fn new(paths: Vec<(F, Complex<F>)>) -> Result<Self, SpliceError> {
        if paths.is_empty() {
            return Err(SpliceError::EmptyPathList);
        }
        for w in paths.windows(2) {
            if w[1].0 <= w[0].0 {
                return Err(SpliceError::DuplicateDelay(w[1].0.as_f64()));
            }
        }
        Ok(Self { paths })
    }

    pub fn paths(&self) -> &[(F, Complex<F>)] {
        &self.paths
    }

    pub fn num_paths(&self) -> usize {
        self.paths.len()
    }

    pub fn delays(&self) -> impl Iterator<Item = F> + '_ {
        self.paths.iter().map(|p| p.0)
    }

    pub fn max_delay(&self) -> F {
        self.paths.last().expect("non-empty").0
    }

    /// Checks all delays fit the unambiguous range `[0, 1/f_s)` for the
    /// subcarrier spacing the channel is about to be sounded with.
    pub fn check_sounding_range(&self, spacing_hz: F) -> Result<(), SpliceError> {
        let max_s = F::one() / spacing_hz;
        for (delay, _) in &self.paths {
            if *delay < F::zero() || *delay >= max_s {
                return Err(SpliceError::DelayOutOfRange {
                    delay_s: delay.as_f64(),
                    max_s: max_s.as_f64(),
                    spacing_hz: spacing_hz.as_f64(),
                });
            }
        }
        Ok(())
    }
}

/// Per-band hardware distortion: timing offset (seconds, in `[0, 1/f_s)`) and
/// phase offset (cycles, in `[0, 1)`).
#[derive(Clone, Copy, Debug)]
pub struct DistortionParams<F> {
    pub timing_offset_s: F,
    pub phase_offset_cycles: F,
}

/// Additive noise description. `Noiseless` is an explicit sentinel so no
/// infinity arithmetic is involved.
#[derive(Clone, Copy, Debug)]
pub enum NoiseModel<F> {
    Noiseless,
    Awgn {
        /// Linear SNR; the per-sample complex noise variance is `1/snr`.
        snr: F,
        seed: u64,
    },
}

impl<F: Real> NoiseModel<F> {
    pub fn from_snr_db(snr_db: Option<F>, seed: u64) -> Self {
        match snr_db {
            None => NoiseModel::Noiseless,
            Some(db) => NoiseModel::Awgn {
                snr: F::of(10.0).powf(db / F::of(10.0)),
                seed,
            },
        }
    }
}

/// Realizes a channel from path specs. Deterministic: the same `(specs,
/// seed)` always yields the same channel. Rayleigh paths draw their gain from
/// a seeded PRNG in delay order.
pub fn make_sparse_channel<F: Real>(
    specs: &[PathSpec<F>],
    seed: u64,
) -> Result<SparseChannel<F>, SpliceError> {
    if specs.is_empty() {
        return Err(SpliceError::EmptyPathList);
    }
    let mut sorted: Vec<PathSpec<F>> = specs.to_vec();
    sorted.sort_by(|a, b| a.delay_s.partial_cmp(&b.delay_s).expect("finite delays"));
    for w in sorted.windows(2) {
        if w[1].delay_s == w[0].delay_s {
            return Err(SpliceError::DuplicateDelay(w[1].delay_s.as_f64()));
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let half = F::of(0.5);
    let paths = sorted
        .iter()
        .map(|spec| {
            let mag = F::of(10.0).powf(spec.avg_power_db / F::of(20.0));
            let gain = match spec.gain_mode {
                GainMode::Deterministic => Complex::new(mag, F::zero()),
                GainMode::Rayleigh => {
                    let re = F::std_normal(&mut rng);
                    let im = F::std_normal(&mut rng);
                    Complex::new(re, im) * Complex::new(mag * half.sqrt(), F::zero())
                }
            };
            (spec.delay_s, gain)
        })
        .collect();
    SparseChannel::new(paths)
}

/// CFR samples of the channel at the given (absolute) frequencies:
/// `H(f) = sum_k c_k exp(-j 2 pi f tau_k)`.
pub fn synth_cfr<F: Real>(channel: &SparseChannel<F>, freqs: &[F]) -> Vec<Complex<F>> {
    let two_pi = F::TAU();
    freqs
        .iter()
        .map(|&f| {
            channel
                .paths
                .iter()
                .map(|&(tau, c)| c * cis(-two_pi * f * tau))
                .sum()
        })
        .collect()
}

/// Applies the per-band distortion phase `psi[m, n] = -2 pi (delta_m n f_s +
/// phi_m)` to samples indexed by subcarrier `n`. Magnitudes are preserved.
pub fn apply_distortion<F: Real>(
    samples: &[Complex<F>],
    n_indices: &[i64],
    d: &DistortionParams<F>,
    spacing_hz: F,
) -> Result<Vec<Complex<F>>, SpliceError> {
    if samples.len() != n_indices.len() {
        return Err(SpliceError::LengthMismatch {
            expected: samples.len(),
            actual: n_indices.len(),
        });
    }
    let two_pi = F::TAU();
    Ok(samples
        .iter()
        .zip(n_indices)
        .map(|(&s, &n)| {
            let nf = F::of(n as f64);
            let psi = -two_pi * (d.timing_offset_s * nf * spacing_hz + d.phase_offset_cycles);
            s * cis(psi)
        })
        .collect())
}

/// Adds seeded complex AWGN with per-sample variance `1/snr` (split equally
/// between real and imaginary parts).
pub fn add_awgn<F: Real>(
    samples: &[Complex<F>],
    noise: &NoiseModel<F>,
) -> Result<Vec<Complex<F>>, SpliceError> {
    match noise {
        NoiseModel::Noiseless => Ok(samples.to_vec()),
        NoiseModel::Awgn { snr, seed } => {
            if *snr <= F::zero() {
                return Err(SpliceError::NonPositiveSnr(snr.as_f64()));
            }
            let sigma = (F::one() / (F::of(2.0) * *snr)).sqrt();
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            Ok(samples
                .iter()
                .map(|&s| {
                    let re = F::std_normal(&mut rng);
                    let im = F::std_normal(&mut rng);
                    s + Complex::new(re * sigma, im * sigma)
                })
                .collect())
        }
    }
}

/// Delay resolution of a sounding bandwidth: `(1/bw, c/bw)` in seconds and
/// meters. For M spliced bands pass `M * N * f_s`.
pub fn delay_resolution<F: Real>(total_bw_hz: F) -> Result<(F, F), SpliceError> {
    if total_bw_hz <= F::zero() {
        return Err(SpliceError::NonPositiveBandwidth);
    }
    let dt = F::one() / total_bw_hz;
    Ok((dt, dt * F::of(SPEED_OF_LIGHT)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::norm2;
    use proptest::prelude::*;

    const NS: f64 = 1e-9;

    fn det(delay_ns: f64, power_db: f64) -> PathSpec<f64> {
        PathSpec {
            delay_s: delay_ns * NS,
            avg_power_db: power_db,
            gain_mode: GainMode::Deterministic,
        }
    }

    #[test]
    fn single_zero_delay_path_is_identity() {
        let ch = make_sparse_channel(&[det(0.0, 0.0)], 0).unwrap();
        assert_eq!(ch.num_paths(), 1);
        let (tau, gain) = ch.paths()[0];
        assert_eq!(tau, 0.0);
        assert!((gain - Complex::new(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn two_path_magnitudes() {
        let ch = make_sparse_channel(&[det(0.0, 0.0), det(18.75, -2.0)], 0).unwrap();
        let mags: Vec<f64> = ch.paths().iter().map(|p| p.1.norm()).collect();
        assert!((mags[0] - 1.0).abs() < 1e-12);
        assert!((mags[1] - 0.7943282347242815).abs() < 1e-12);
    }

    #[test]
    fn duplicate_delay_rejected() {
        let err = make_sparse_channel(&[det(5.0, 0.0), det(5.0, -1.0)], 0);
        assert!(matches!(err, Err(SpliceError::DuplicateDelay(_))));
        assert!(matches!(
            make_sparse_channel::<f64>(&[], 0),
            Err(SpliceError::EmptyPathList)
        ));
    }

    #[test]
    fn rayleigh_mean_power_matches_average_power() {
        // Monte-Carlo oracle: mean |gain|^2 over many seeded draws.
        let spec = PathSpec {
            delay_s: 0.0,
            avg_power_db: -2.0,
            gain_mode: GainMode::Rayleigh,
        };
        let n = 100_000u64;
        let mut acc = 0.0;
        for seed in 0..n {
            let ch = make_sparse_channel(&[spec], seed).unwrap();
            acc += ch.paths()[0].1.norm_sqr();
        }
        let mean = acc / n as f64;
        let expected = 10f64.powf(-2.0 / 10.0);
        assert!(
            (mean - expected).abs() / expected < 0.02,
            "mean power {mean} vs {expected}"
        );
    }

    #[test]
    fn rayleigh_same_seed_same_channel() {
        let spec = PathSpec {
            delay_s: 1.0 * NS,
            avg_power_db: 0.0,
            gain_mode: GainMode::Rayleigh,
        };
        let a = make_sparse_channel(&[spec], 7).unwrap();
        let b = make_sparse_channel(&[spec], 7).unwrap();
        assert_eq!(a.paths()[0].1, b.paths()[0].1);
    }

    #[test]
    fn synth_cfr_zero_delay_is_all_ones() {
        let ch = make_sparse_channel(&[det(0.0, 0.0)], 0).unwrap();
        let freqs = [1e9, 2.4e9, 5.0e9];
        for h in synth_cfr(&ch, &freqs) {
            assert!((h - Complex::new(1.0, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn synth_cfr_two_path_hand_value() {
        let ch = make_sparse_channel(&[det(0.0, 0.0), det(18.75, -2.0)], 0).unwrap();
        let h = synth_cfr(&ch, &[5e9])[0];
        let phase = -std::f64::consts::TAU * 5e9 * 18.75e-9;
        let expected = Complex::new(1.0, 0.0)
            + Complex::new(0.7943282347242815, 0.0) * Complex::new(phase.cos(), phase.sin());
        assert!((h - expected).norm() < 1e-9);
    }

    #[test]
    fn synth_cfr_half_cycle_delay() {
        let f = 100e6;
        let ch = SparseChannel::new(vec![(1.0 / (2.0 * f), Complex::new(1.0, 0.0))]).unwrap();
        let h = synth_cfr(&ch, &[f])[0];
        assert!((h - Complex::new(-1.0, 0.0)).norm() < 1e-9);
    }

    #[test]
    fn distortion_identity_and_hand_value() {
        let samples = vec![Complex::new(1.0, 0.0), Complex::new(0.0, 1.0)];
        let d0 = DistortionParams {
            timing_offset_s: 0.0,
            phase_offset_cycles: 0.0,
        };
        let out = apply_distortion(&samples, &[0, 5], &d0, 312.5e3).unwrap();
        assert_eq!(out, samples);

        let d = DistortionParams {
            timing_offset_s: 100e-9,
            phase_offset_cycles: 0.25,
        };
        let out = apply_distortion(&[Complex::new(1.0, 0.0)], &[2], &d, 312.5e3).unwrap();
        let expected_phase = -std::f64::consts::TAU * 0.3125;
        let expected = Complex::new(expected_phase.cos(), expected_phase.sin());
        assert!((out[0] - expected).norm() < 1e-12);
    }

    #[test]
    fn distortion_phase_affine_in_subcarrier_index() {
        let d = DistortionParams {
            timing_offset_s: 37e-9,
            phase_offset_cycles: 0.6,
        };
        let ones = vec![Complex::new(1.0, 0.0); 3];
        let out = apply_distortion(&ones, &[1, 2, 3], &d, 312.5e3).unwrap();
        // consecutive indices: ratio of phase factors must be constant
        let r1 = out[1] / out[0];
        let r2 = out[2] / out[1];
        assert!((r1 - r2).norm() < 1e-12);
    }

    #[test]
    fn distortion_length_mismatch() {
        let d = DistortionParams {
            timing_offset_s: 0.0,
            phase_offset_cycles: 0.0,
        };
        assert!(matches!(
            apply_distortion(&[Complex::new(1.0, 0.0)], &[0, 1], &d, 1.0),
            Err(SpliceError::LengthMismatch { .. })
        ));
    }

    #[test]
    fn awgn_noiseless_is_identity_and_seeded_reproducible() {
        let samples = vec![Complex::new(1.0, -2.0); 8];
        assert_eq!(
            add_awgn(&samples, &NoiseModel::Noiseless).unwrap(),
            samples
        );
        let noisy1 = add_awgn(&samples, &NoiseModel::Awgn { snr: 10.0, seed: 3 }).unwrap();
        let noisy2 = add_awgn(&samples, &NoiseModel::Awgn { snr: 10.0, seed: 3 }).unwrap();
        assert_eq!(noisy1, noisy2);
        assert_ne!(noisy1, samples);
    }

    #[test]
    fn awgn_variance_oracle() {
        let zeros = vec![Complex::new(0.0, 0.0); 1_000_000];
        let noisy = add_awgn(&zeros, &NoiseModel::Awgn { snr: 1.0, seed: 11 }).unwrap();
        let var = noisy.iter().map(|z| z.norm_sqr()).sum::<f64>() / noisy.len() as f64;
        assert!((var - 1.0).abs() < 0.01, "variance {var}");
    }

    #[test]
    fn awgn_rejects_bad_snr() {
        assert!(matches!(
            add_awgn(&[Complex::new(0.0, 0.0)], &NoiseModel::Awgn { snr: 0.0, seed: 0 }),
            Err(SpliceError::NonPositiveSnr(_))
        ));
    }

    #[test]
    fn resolution_known_values() {
        let (dt, dm) = delay_resolution(20e6_f64).unwrap();
        assert!((dt - 50e-9).abs() < 1e-20);
        assert!((dm - 14.9896229).abs() < 1e-6);

        let (dt, dm) = delay_resolution(160e6_f64).unwrap();
        assert!((dt - 6.25e-9).abs() < 1e-20);
        assert!((dm - 1.87370286).abs() < 1e-6);

        let (dt, dm) = delay_resolution(1.0_f64).unwrap();
        assert_eq!(dt, 1.0);
        assert_eq!(dm, SPEED_OF_LIGHT);

        assert!(delay_resolution(0.0_f64).is_err());
    }

    #[test]
    fn resolution_scales_with_band_count() {
        let n_fs = 20e6_f64;
        let m = 8.0;
        let (single, _) = delay_resolution(n_fs).unwrap();
        let (spliced, _) = delay_resolution(m * n_fs).unwrap();
        assert_eq!(spliced, single / m);
    }

    proptest! {
        #[test]
        fn synth_cfr_linear_in_gains(alpha_re in -2.0..2.0f64, alpha_im in -2.0..2.0f64,
                                     tau_ns in 0.0..100.0f64) {
            let alpha = Complex::new(alpha_re, alpha_im);
            let base = SparseChannel::new(vec![(tau_ns * NS, Complex::new(0.8, -0.3))]).unwrap();
            let scaled = SparseChannel::new(
                base.paths().iter().map(|&(t, c)| (t, c * alpha)).collect()).unwrap();
            let freqs = [2.4e9, 2.41e9, 2.42e9];
            let h0 = synth_cfr(&base, &freqs);
            let h1 = synth_cfr(&scaled, &freqs);
            for (a, b) in h0.iter().zip(&h1) {
                prop_assert!((a * alpha - b).norm() < 1e-9);
            }
        }

        #[test]
        fn distortion_preserves_magnitude(delta_ns in 0.0..3000.0f64, phi in 0.0..1.0f64,
                                          re in -2.0..2.0f64, im in -2.0..2.0f64) {
            let d = DistortionParams { timing_offset_s: delta_ns * NS, phase_offset_cycles: phi };
            let s = [Complex::new(re, im)];
            let out = apply_distortion(&s, &[-3], &d, 312.5e3).unwrap();
            prop_assert!((out[0].norm() - s[0].norm()).abs() < 1e-12);
        }
    }

    #[test]
    fn synth_cfr_periodic_in_delay_for_on_grid_freqs() {
        // frequencies that are integer multiples of f_s make the CFR
        // periodic in tau with period 1/f_s
        let fs = 312.5e3;
        let freqs: Vec<f64> = (0..5).map(|k| 4.96e9 + k as f64 * fs).collect();
        let tau = 40e-9;
        let a = SparseChannel::new(vec![(tau, Complex::new(1.0, 0.0))]).unwrap();
        let b = SparseChannel::new(vec![(tau + 1.0 / fs, Complex::new(1.0, 0.0))]).unwrap();
        let ha = synth_cfr(&a, &freqs);
        let hb = synth_cfr(&b, &freqs);
        let diff: f64 = ha.iter().zip(&hb).map(|(x, y)| (x - y).norm()).sum();
        assert!(diff < 1e-6 * norm2(&ha), "diff {diff}");
    }
}
