//! Scenario execution: per-packet channel realization, per-band CFR
//! synthesis with noise, sub-band subsetting, splicing, wideband-reference
//! comparison, peak matching, and per-packet ECDF statistics.
//!
//! The harness runs at `f64`; the underlying math modules stay generic.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::channel_model::{
    add_awgn, delay_resolution, make_sparse_channel, synth_cfr, GainMode, NoiseModel, PathSpec,
    SparseChannel,
};
use crate::error::SpliceError;
use crate::numeric::derive_seed;
use crate::ofdm_link::{
    build_band_plan, cfr_to_cir, ls_estimate_freq, subcarrier_freqs, BandPlan, CfrKind,
    CfrMeasurement, PilotGrid,
};
use crate::splicer::{build_dictionary, omp, stack_measurements, support_to_delays, Dictionary};

/// Which sub-bands to keep when splicing from a fraction of the spectrum.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SubsetPolicy {
    /// Every other band, starting from the lowest.
    Alternating,
    /// The lowest bands.
    Lowest,
    /// An explicit list of band indices.
    Explicit { bands: Vec<usize> },
}

/// Band-plan parameters of a scenario.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BandPlanConfig {
    pub total_bw_hz: f64,
    pub sub_bw_hz: f64,
    pub center_hz: f64,
    pub subcarrier_spacing_hz: f64,
}

/// One configured multipath component.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PathConfig {
    pub delay_ns: f64,
    pub avg_power_db: f64,
}

fn default_subset_fraction() -> f64 {
    1.0
}
fn default_subset_policy() -> SubsetPolicy {
    SubsetPolicy::Alternating
}
fn default_grid_factor() -> usize {
    3
}
fn default_window() -> f64 {
    3.0
}
fn default_packets() -> usize {
    1
}

/// Full description of a simulation scenario.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub band_plan: BandPlanConfig,
    pub paths: Vec<PathConfig>,
    pub gain_mode: GainMode,
    /// `None` means noiseless.
    pub snr_db: Option<f64>,
    #[serde(default = "default_subset_fraction")]
    pub subset_fraction: f64,
    #[serde(default = "default_subset_policy")]
    pub subset_policy: SubsetPolicy,
    #[serde(default = "default_grid_factor")]
    pub grid_factor: usize,
    /// Sparsity order for OMP; defaults to the number of configured paths.
    #[serde(default)]
    pub sparsity: Option<usize>,
    #[serde(default = "default_packets")]
    pub packets: usize,
    pub seed: u64,
    /// Peak-matching window in wideband samples.
    #[serde(default = "default_window")]
    pub match_window_samples: f64,
}

impl ScenarioConfig {
    pub fn sparsity_order(&self) -> usize {
        self.sparsity.unwrap_or(self.paths.len())
    }

    pub fn validate(&self) -> Result<(), SpliceError> {
        if self.paths.is_empty() {
            return Err(SpliceError::EmptyPathList);
        }
        if self.packets < 1 {
            return Err(SpliceError::BadConfig("packets must be >= 1".into()));
        }
        if !(self.subset_fraction > 0.0 && self.subset_fraction <= 1.0) {
            return Err(SpliceError::BadConfig(
                "subset_fraction must be in (0, 1]".into(),
            ));
        }
        Ok(())
    }

    pub fn path_specs(&self) -> Vec<PathSpec<f64>> {
        self.paths
            .iter()
            .map(|p| PathSpec {
                delay_s: p.delay_ns * 1e-9,
                avg_power_db: p.avg_power_db,
                gain_mode: self.gain_mode,
            })
            .collect()
    }
}

/// One true path's matching outcome, errors in wideband samples
/// (units of `1/total_bw`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PeakMatchEntry {
    pub true_delay_s: f64,
    pub matched_delay_s: Option<f64>,
    pub error_samples: Option<f64>,
}

/// Greedy nearest-delay matching of estimated against true delays.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PeakMatchReport {
    pub wideband_sample_s: f64,
    pub entries: Vec<PeakMatchEntry>,
}

impl PeakMatchReport {
    pub fn num_missed(&self) -> usize {
        self.entries
            .iter()
            .filter(|e| e.matched_delay_s.is_none())
            .count()
    }

    pub fn max_abs_error_samples(&self) -> Option<f64> {
        self.entries
            .iter()
            .filter_map(|e| e.error_samples.map(f64::abs))
            .fold(None, |acc, v| Some(acc.map_or(v, |a: f64| a.max(v))))
    }
}

/// Empirical CDF over per-packet delay estimates: sorted step points with
/// cumulative probabilities, ties stacked.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EcdfSeries {
    pub points: Vec<EcdfPoint>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EcdfPoint {
    pub value: f64,
    pub probability: f64,
}

/// One recovered path: delay plus complex coefficient.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimatedPath {
    pub delay_s: f64,
    pub coeff_re: f64,
    pub coeff_im: f64,
}

impl EstimatedPath {
    pub fn coeff(&self) -> Complex<f64> {
        Complex::new(self.coeff_re, self.coeff_im)
    }
}

/// Per-packet outcome.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PacketReport {
    pub packet: usize,
    /// Recovered paths sorted by delay.
    pub estimated: Vec<EstimatedPath>,
    pub residual_norms: Vec<f64>,
    /// Peak delays extracted from the wideband LS reference CIR.
    pub wideband_peaks_s: Vec<f64>,
    /// Matching against the configured ground-truth delays.
    pub truth_match: PeakMatchReport,
    /// Matching against the wideband reference peaks.
    pub reference_match: PeakMatchReport,
    /// Set when the packet failed; the packet is recorded, not fatal.
    pub error: Option<String>,
}

/// Aggregated scenario outcome. Fully determined by the config (criterion:
/// same seed, byte-identical report).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioReport {
    pub config: ScenarioConfig,
    pub selected_bands: Vec<usize>,
    pub wideband_sample_s: f64,
    pub wideband_resolution_m: f64,
    pub packets: Vec<PacketReport>,
    /// ECDF of the k-th strongest recovered delay over packets, k = rank.
    pub ecdf_by_rank: Vec<EcdfSeries>,
}

/// Deterministic sub-band selection.
pub fn select_subbands(
    plan: &BandPlan<f64>,
    fraction: f64,
    policy: &SubsetPolicy,
) -> Result<Vec<usize>, SpliceError> {
    let m = plan.num_bands();
    let count_f = fraction * m as f64;
    let count = count_f.round();
    if count < 1.0 || (count_f - count).abs() > 1e-9 {
        return Err(SpliceError::BadSubsetSize(count_f));
    }
    let count = count as usize;
    let bands = match policy {
        SubsetPolicy::Alternating => {
            let stride = m / count;
            (0..count).map(|i| i * stride.max(1)).collect::<Vec<_>>()
        }
        SubsetPolicy::Lowest => (0..count).collect(),
        SubsetPolicy::Explicit { bands } => {
            let mut bands = bands.clone();
            bands.sort_unstable();
            bands.dedup();
            if bands.len() != count {
                return Err(SpliceError::BadSubsetSize(count_f));
            }
            for &b in &bands {
                if b >= m {
                    return Err(SpliceError::BandOutOfRange { index: b, bands: m });
                }
            }
            bands
        }
    };
    Ok(bands)
}

/// Greedy nearest-delay matching of estimates to true delays within
/// `window` wideband samples; signed errors in wideband samples.
pub fn match_peaks(
    estimated: &[(f64, Complex<f64>)],
    truth: &[f64],
    total_bw_hz: f64,
    window_samples: f64,
) -> PeakMatchReport {
    let sample = 1.0 / total_bw_hz;
    let mut pairs: Vec<(f64, usize, usize)> = Vec::new(); // |error|, truth idx, est idx
    for (t, &tr) in truth.iter().enumerate() {
        for (e, &(est, _)) in estimated.iter().enumerate() {
            let err = (est - tr).abs();
            if err <= window_samples * sample {
                pairs.push((err, t, e));
            }
        }
    }
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite errors"));
    let mut truth_used = vec![false; truth.len()];
    let mut est_used = vec![false; estimated.len()];
    let mut matched: Vec<Option<usize>> = vec![None; truth.len()];
    for (_, t, e) in pairs {
        if !truth_used[t] && !est_used[e] {
            truth_used[t] = true;
            est_used[e] = true;
            matched[t] = Some(e);
        }
    }
    let entries = truth
        .iter()
        .enumerate()
        .map(|(t, &tr)| match matched[t] {
            Some(e) => PeakMatchEntry {
                true_delay_s: tr,
                matched_delay_s: Some(estimated[e].0),
                error_samples: Some((estimated[e].0 - tr) / sample),
            },
            None => PeakMatchEntry {
                true_delay_s: tr,
                matched_delay_s: None,
                error_samples: None,
            },
        })
        .collect();
    PeakMatchReport {
        wideband_sample_s: sample,
        entries,
    }
}

/// Standard empirical CDF: sorted values with stacked ties.
pub fn ecdf(values: &[f64]) -> Result<EcdfSeries, SpliceError> {
    if values.is_empty() {
        return Err(SpliceError::EmptyInput);
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite values"));
    let n = sorted.len() as f64;
    let mut points: Vec<EcdfPoint> = Vec::new();
    for (i, v) in sorted.iter().enumerate() {
        let p = (i + 1) as f64 / n;
        match points.last_mut() {
            Some(last) if last.value == *v => last.probability = p,
            _ => points.push(EcdfPoint {
                value: *v,
                probability: p,
            }),
        }
    }
    Ok(EcdfSeries { points })
}

/// Extracts up to `k` peak delays from CIR taps: local maxima of the tap
/// magnitude, strongest first, returned as delays at the tap spacing.
pub fn extract_peaks(taps: &[Complex<f64>], k: usize, tap_spacing_s: f64) -> Vec<f64> {
    let n = taps.len();
    let mut candidates: Vec<(f64, usize)> = (0..n)
        .filter(|&i| {
            let mag = taps[i].norm();
            let left = if i > 0 { taps[i - 1].norm() } else { 0.0 };
            let right = if i + 1 < n { taps[i + 1].norm() } else { 0.0 };
            mag >= left && mag >= right
        })
        .map(|i| (taps[i].norm(), i))
        .collect();
    candidates.sort_by(|a, b| b.0.partial_cmp(&a.0).expect("finite").then(a.1.cmp(&b.1)));
    candidates
        .into_iter()
        .take(k)
        .map(|(_, i)| i as f64 * tap_spacing_s)
        .collect()
}

// Seed-derivation lanes, kept distinct per purpose.
const LANE_CHANNEL: u64 = 0;
const LANE_BAND_NOISE: u64 = 1;
const LANE_WIDEBAND_NOISE: u64 = 1 << 32;

fn packet_seed(master: u64, packet: usize) -> u64 {
    derive_seed(master, packet as u64)
}

/// Synthesizes the per-band CFR measurements of one packet, reproducibly.
/// This is the exact data `run_scenario` splices; the CLI uses it to dump
/// CFR trace files that round-trip to identical results.
pub fn synth_packet_measurements(
    cfg: &ScenarioConfig,
    plan: &BandPlan<f64>,
    bands: &[usize],
    packet: usize,
) -> Result<Vec<CfrMeasurement<f64>>, SpliceError> {
    let pseed = packet_seed(cfg.seed, packet);
    let channel = make_sparse_channel(&cfg.path_specs(), derive_seed(pseed, LANE_CHANNEL))?;
    channel.check_sounding_range(plan.spacing_hz())?;
    let kind = if cfg.snr_db.is_some() {
        CfrKind::Noisy
    } else {
        CfrKind::Clean
    };
    bands
        .iter()
        .map(|&m| {
            let freqs = subcarrier_freqs(plan, m)?;
            let clean = synth_cfr(&channel, &freqs);
            let noise = NoiseModel::from_snr_db(
                cfg.snr_db,
                derive_seed(pseed, LANE_BAND_NOISE + m as u64),
            );
            let samples = add_awgn(&clean, &noise)?;
            CfrMeasurement::new(m, freqs, samples, kind)
        })
        .collect()
}

fn wideband_reference(
    cfg: &ScenarioConfig,
    channel: &SparseChannel<f64>,
    packet: usize,
) -> Result<(Vec<Complex<f64>>, f64), SpliceError> {
    let bp = &cfg.band_plan;
    let plan = build_band_plan(bp.total_bw_hz, bp.total_bw_hz, bp.center_hz, bp.subcarrier_spacing_hz)?;
    let freqs = subcarrier_freqs(&plan, 0)?;
    let clean = synth_cfr(channel, &freqs);
    let pseed = packet_seed(cfg.seed, packet);
    let noise = NoiseModel::from_snr_db(cfg.snr_db, derive_seed(pseed, LANE_WIDEBAND_NOISE));
    let noisy = add_awgn(&clean, &noise)?;
    let rx = CfrMeasurement::new(0, freqs, noisy, CfrKind::Noisy)?;
    let pilots = PilotGrid::unit(0, plan.num_subcarriers());
    let est = ls_estimate_freq(&rx, &pilots)?;
    let taps = cfr_to_cir(&est.samples)?;
    let tap_spacing = 1.0 / (plan.num_subcarriers() as f64 * plan.spacing_hz());
    Ok((taps, tap_spacing))
}

/// Runs a full scenario: per packet realize the channel, synthesize per-band
/// CFRs, stack, splice with OMP, and compare against both the configured
/// truth and the wideband LS reference. Deterministic given the config.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<ScenarioReport, SpliceError> {
    cfg.validate()?;
    let bp = &cfg.band_plan;
    let plan = build_band_plan(
        bp.total_bw_hz,
        bp.sub_bw_hz,
        bp.center_hz,
        bp.subcarrier_spacing_hz,
    )?;
    let bands = select_subbands(&plan, cfg.subset_fraction, &cfg.subset_policy)?;
    let k = cfg.sparsity_order();

    // Stacked frequency grid and dictionary are packet-independent.
    let stacked_freqs: Vec<f64> = {
        let mut f = Vec::new();
        for &m in &bands {
            f.extend(subcarrier_freqs(&plan, m)?);
        }
        f
    };
    let dict: Dictionary<f64> = build_dictionary(&stacked_freqs, plan.spacing_hz(), cfg.grid_factor)?;

    let truth_delays: Vec<f64> = cfg.paths.iter().map(|p| p.delay_ns * 1e-9).collect();
    let (wideband_sample_s, wideband_resolution_m) = delay_resolution(bp.total_bw_hz)?;

    let mut packets = Vec::with_capacity(cfg.packets);
    for packet in 0..cfg.packets {
        match run_packet(cfg, &plan, &bands, &dict, &truth_delays, packet) {
            Ok(report) => packets.push(report),
            Err(e) => packets.push(PacketReport {
                packet,
                estimated: Vec::new(),
                residual_norms: Vec::new(),
                wideband_peaks_s: Vec::new(),
                truth_match: match_peaks(&[], &truth_delays, bp.total_bw_hz, cfg.match_window_samples),
                reference_match: match_peaks(&[], &[], bp.total_bw_hz, cfg.match_window_samples),
                error: Some(e.to_string()),
            }),
        }
    }

    // ECDF of the k-th strongest delay estimate across packets.
    let mut ecdf_by_rank = Vec::new();
    for rank in 0..k {
        let values: Vec<f64> = packets
            .iter()
            .filter_map(|p| {
                let mut by_strength: Vec<&EstimatedPath> = p.estimated.iter().collect();
                by_strength.sort_by(|a, b| {
                    b.coeff()
                        .norm()
                        .partial_cmp(&a.coeff().norm())
                        .expect("finite")
                });
                by_strength.get(rank).map(|e| e.delay_s)
            })
            .collect();
        if !values.is_empty() {
            ecdf_by_rank.push(ecdf(&values)?);
        }
    }

    Ok(ScenarioReport {
        config: cfg.clone(),
        selected_bands: bands,
        wideband_sample_s,
        wideband_resolution_m,
        packets,
        ecdf_by_rank,
    })
}

fn run_packet(
    cfg: &ScenarioConfig,
    plan: &BandPlan<f64>,
    bands: &[usize],
    dict: &Dictionary<f64>,
    truth_delays: &[f64],
    packet: usize,
) -> Result<PacketReport, SpliceError> {
    let measurements = synth_packet_measurements(cfg, plan, bands, packet)?;
    let stacked = stack_measurements(&measurements, plan)?;
    let result = omp(&stacked, dict, cfg.sparsity_order(), 0.0)?;
    let estimated = support_to_delays(&result, dict);

    let pseed = packet_seed(cfg.seed, packet);
    let channel = make_sparse_channel(&cfg.path_specs(), derive_seed(pseed, LANE_CHANNEL))?;
    let (wide_taps, tap_spacing) = wideband_reference(cfg, &channel, packet)?;
    let wideband_peaks_s = extract_peaks(&wide_taps, cfg.sparsity_order(), tap_spacing);

    let truth_match = match_peaks(
        &estimated,
        truth_delays,
        cfg.band_plan.total_bw_hz,
        cfg.match_window_samples,
    );
    let reference_match = match_peaks(
        &estimated,
        &wideband_peaks_s,
        cfg.band_plan.total_bw_hz,
        cfg.match_window_samples,
    );

    Ok(PacketReport {
        packet,
        estimated: estimated
            .iter()
            .map(|&(d, c)| EstimatedPath {
                delay_s: d,
                coeff_re: c.re,
                coeff_im: c.im,
            })
            .collect(),
        residual_norms: result.residual_norms,
        wideband_peaks_s,
        truth_match,
        reference_match,
        error: None,
    })
}
