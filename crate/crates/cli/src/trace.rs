//! CFR trace files: a text container for per-packet, per-band CFR samples,
//! either dumped by `simulate --dump-cfr` or produced externally. The format
//! is documented in `docs/formats.md`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use num_complex::Complex;
use splice_core::ofdm_link::{subcarrier_freqs, BandPlan, CfrKind, CfrMeasurement};

pub const TRACE_MAGIC: &str = "# splice-cfr-trace v1";

/// Header of a trace file: the band plan, the packet count, and the splicing
/// parameters the producer used.
#[derive(Clone, Debug, PartialEq)]
pub struct TraceHeader {
    pub total_bw_hz: f64,
    pub sub_bw_hz: f64,
    pub center_hz: f64,
    pub subcarrier_spacing_hz: f64,
    pub packets: usize,
    pub bands: Vec<usize>,
    pub sparsity: usize,
    pub grid_factor: usize,
}

/// Parsed trace: header plus per-packet measurements, packets in order.
pub struct CfrTrace {
    pub header: TraceHeader,
    pub packets: Vec<Vec<CfrMeasurement<f64>>>,
}

/// How a trace failed to load: `Parse` for malformed files (bad header,
/// unparsable or missing rows), `Grid` for files that are well formed but
/// describe an inconsistent band plan.
pub enum TraceError {
    Parse(anyhow::Error),
    Grid(anyhow::Error),
}

pub fn write_trace(
    header: &TraceHeader,
    plan: &BandPlan<f64>,
    packets: &[Vec<CfrMeasurement<f64>>],
) -> Result<String> {
    let mut out = String::new();
    out.push_str(TRACE_MAGIC);
    out.push('\n');
    writeln!(out, "# total_bw_hz={}", header.total_bw_hz)?;
    writeln!(out, "# sub_bw_hz={}", header.sub_bw_hz)?;
    writeln!(out, "# center_hz={}", header.center_hz)?;
    writeln!(out, "# subcarrier_spacing_hz={}", header.subcarrier_spacing_hz)?;
    writeln!(out, "# packets={}", header.packets)?;
    writeln!(
        out,
        "# bands={}",
        header
            .bands
            .iter()
            .map(|b| b.to_string())
            .collect::<Vec<_>>()
            .join(",")
    )?;
    writeln!(out, "# sparsity={}", header.sparsity)?;
    writeln!(out, "# grid_factor={}", header.grid_factor)?;
    out.push_str("packet,band,subcarrier,real,imag\n");

    let half = (plan.num_subcarriers() as i64 - 1) / 2;
    for (packet, measurements) in packets.iter().enumerate() {
        for meas in measurements {
            for (i, s) in meas.samples.iter().enumerate() {
                let n = i as i64 - half;
                writeln!(out, "{},{},{},{},{}", packet, meas.band, n, s.re, s.im)?;
            }
        }
    }
    Ok(out)
}

/// Reads and validates a trace file. Parse-level problems (missing header
/// keys, bad numbers, missing or duplicate subcarrier rows) are reported
/// with row-level diagnostics.
pub fn read_trace(path: &Path) -> Result<CfrTrace, TraceError> {
    let (header, grid) = parse_rows(path).map_err(TraceError::Parse)?;
    let plan = header.build_plan().map_err(TraceError::Grid)?;
    assemble(header, grid, &plan).map_err(TraceError::Parse)
}

type RowGrid = BTreeMap<(usize, usize), BTreeMap<i64, Complex<f64>>>;

fn parse_rows(path: &Path) -> Result<(TraceHeader, RowGrid)> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading trace file {}", path.display()))?;
    let mut lines = text.lines().enumerate();

    let (_, first) = lines.next().ok_or_else(|| anyhow!("empty trace file"))?;
    if first.trim() != TRACE_MAGIC {
        bail!("not a CFR trace file (missing `{TRACE_MAGIC}` magic line)");
    }

    let mut kv: BTreeMap<String, String> = BTreeMap::new();
    let mut column_line = None;
    for (lineno, line) in lines.by_ref() {
        let line = line.trim();
        if let Some(rest) = line.strip_prefix('#') {
            let rest = rest.trim();
            let (key, value) = rest
                .split_once('=')
                .ok_or_else(|| anyhow!("line {}: malformed header entry `{rest}`", lineno + 1))?;
            kv.insert(key.trim().to_string(), value.trim().to_string());
        } else {
            column_line = Some((lineno, line.to_string()));
            break;
        }
    }

    let get = |key: &str| -> Result<&String> {
        kv.get(key)
            .ok_or_else(|| anyhow!("trace header missing `{key}`"))
    };
    let parse_f64 = |key: &str| -> Result<f64> {
        get(key)?
            .parse::<f64>()
            .with_context(|| format!("trace header `{key}`"))
    };
    let parse_usize = |key: &str| -> Result<usize> {
        get(key)?
            .parse::<usize>()
            .with_context(|| format!("trace header `{key}`"))
    };
    let header = TraceHeader {
        total_bw_hz: parse_f64("total_bw_hz")?,
        sub_bw_hz: parse_f64("sub_bw_hz")?,
        center_hz: parse_f64("center_hz")?,
        subcarrier_spacing_hz: parse_f64("subcarrier_spacing_hz")?,
        packets: parse_usize("packets")?,
        bands: get("bands")?
            .split(',')
            .map(|b| b.trim().parse::<usize>().context("trace header `bands`"))
            .collect::<Result<Vec<_>>>()?,
        sparsity: parse_usize("sparsity")?,
        grid_factor: parse_usize("grid_factor")?,
    };

    let (colno, columns) =
        column_line.ok_or_else(|| anyhow!("trace file has no column header line"))?;
    if columns != "packet,band,subcarrier,real,imag" {
        bail!("line {}: unexpected column header `{columns}`", colno + 1);
    }

    // (packet, band) -> subcarrier -> sample
    let mut grid: RowGrid = BTreeMap::new();
    for (lineno, line) in lines {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 5 {
            bail!("line {}: expected 5 fields, got {}", lineno + 1, fields.len());
        }
        let row = || format!("line {}", lineno + 1);
        let packet: usize = fields[0].parse().with_context(row)?;
        let band: usize = fields[1].parse().with_context(row)?;
        let n: i64 = fields[2].parse().with_context(row)?;
        let re: f64 = fields[3].parse().with_context(row)?;
        let im: f64 = fields[4].parse().with_context(row)?;
        if grid
            .entry((packet, band))
            .or_default()
            .insert(n, Complex::new(re, im))
            .is_some()
        {
            bail!("line {}: duplicate row for packet {packet} band {band} subcarrier {n}", lineno + 1);
        }
    }

    Ok((header, grid))
}

fn assemble(header: TraceHeader, mut grid: RowGrid, plan: &BandPlan<f64>) -> Result<CfrTrace> {
    let n_sub = plan.num_subcarriers();
    let half = (n_sub as i64 - 1) / 2;
    let mut packets: Vec<Vec<CfrMeasurement<f64>>> = Vec::with_capacity(header.packets);
    for packet in 0..header.packets {
        let mut measurements = Vec::with_capacity(header.bands.len());
        for &band in &header.bands {
            let rows = grid.remove(&(packet, band)).ok_or_else(|| {
                anyhow!("trace is missing packet {packet} band {band} entirely")
            })?;
            let mut samples = Vec::with_capacity(n_sub);
            for n in -half..=half {
                let s = rows.get(&n).ok_or_else(|| {
                    anyhow!("packet {packet} band {band}: missing subcarrier row n={n}")
                })?;
                samples.push(*s);
            }
            if rows.len() != n_sub {
                let extra: Vec<i64> = rows
                    .keys()
                    .filter(|k| **k < -half || **k > half)
                    .copied()
                    .collect();
                bail!("packet {packet} band {band}: unexpected subcarrier rows {extra:?}");
            }
            let freqs = subcarrier_freqs(plan, band)?;
            measurements.push(CfrMeasurement::new(band, freqs, samples, CfrKind::Noisy)?);
        }
        packets.push(measurements);
    }
    if let Some(((packet, band), _)) = grid.into_iter().next() {
        bail!("trace has rows for packet {packet} band {band} beyond the declared header");
    }

    Ok(CfrTrace { header, packets })
}

impl TraceHeader {
    /// Band plan described by the header. Failures here are grid
    /// inconsistencies, not parse errors.
    pub fn build_plan(&self) -> Result<BandPlan<f64>> {
        let plan = splice_core::ofdm_link::build_band_plan(
            self.total_bw_hz,
            self.sub_bw_hz,
            self.center_hz,
            self.subcarrier_spacing_hz,
        )?;
        for &b in &self.bands {
            if b >= plan.num_bands() {
                bail!(
                    "trace header band {b} out of range for a plan with {} bands",
                    plan.num_bands()
                );
            }
        }
        Ok(plan)
    }
}
