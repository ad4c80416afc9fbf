//! `splice` — command-line front end for the channel-splicing toolkit.
//!
//! Subcommands:
//! * `simulate`   — run a configured scenario end to end, write reports.
//! * `splice`     — recover sparse delays from a recorded CFR trace file.
//! * `resolution` — print single-band vs. spliced delay resolution.
//!
//! Exit codes: 0 success, 1 runtime/scenario error, 2 input parse error.

mod trace;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use splice_core::channel_model::delay_resolution;
use splice_core::eval_harness::{
    run_scenario, synth_packet_measurements, ScenarioConfig, ScenarioReport,
};
use splice_core::ofdm_link::build_band_plan;
use splice_core::splicer::{build_dictionary, omp, stack_measurements, support_to_delays};
use trace::{read_trace, write_trace, TraceHeader};

#[derive(Parser)]
#[command(name = "splice", version, about = "Multi-band OFDM channel splicing")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a simulation scenario from a TOML config and write reports.
    Simulate(SimulateArgs),
    /// Estimate sparse path delays from a CFR trace file.
    Splice(SpliceArgs),
    /// Print achievable delay resolution for a band plan.
    Resolution(ResolutionArgs),
}

#[derive(Args)]
struct SimulateArgs {
    /// Scenario config (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Output directory; created if missing.
    #[arg(long, default_value = "out")]
    out_dir: PathBuf,
    /// Override the master seed from the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the number of packets.
    #[arg(long)]
    packets: Option<usize>,
    /// Override the sub-band subset fraction, e.g. 0.5.
    #[arg(long)]
    subset: Option<f64>,
    /// Override the dictionary grid oversampling factor.
    #[arg(long)]
    grid_factor: Option<usize>,
    /// Also dump the per-packet CFR samples as a trace file.
    #[arg(long)]
    dump_cfr: bool,
}

#[derive(Args)]
struct SpliceArgs {
    /// CFR trace file to process.
    #[arg(long)]
    trace: PathBuf,
    /// Write the result CSV here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ResolutionArgs {
    /// Overall sounded bandwidth in Hz.
    #[arg(long)]
    total_bw: Option<f64>,
    /// Number of spliced sub-bands.
    #[arg(long, default_value_t = 1)]
    bands: usize,
    /// Subcarriers per sub-band; together with --spacing overrides --total-bw.
    #[arg(long)]
    subcarriers: Option<usize>,
    /// Subcarrier spacing in Hz.
    #[arg(long)]
    spacing: Option<f64>,
}

/// An error tagged with the process exit code it should produce.
struct CliError {
    code: i32,
    source: anyhow::Error,
}

fn parse_err(e: anyhow::Error) -> CliError {
    CliError { code: 2, source: e }
}

fn run_err(e: anyhow::Error) -> CliError {
    CliError { code: 1, source: e }
}

fn main() {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Simulate(args) => cmd_simulate(&args),
        Command::Splice(args) => cmd_splice(&args),
        Command::Resolution(args) => cmd_resolution(&args),
    };
    if let Err(e) = outcome {
        eprintln!("error: {:#}", e.source);
        std::process::exit(e.code);
    }
}

#[derive(Serialize)]
struct Manifest<'a> {
    config_path: String,
    resolved_config: &'a ScenarioConfig,
    tool_version: &'static str,
    timestamp_unix_s: u64,
    seed: u64,
}

fn cmd_simulate(args: &SimulateArgs) -> Result<(), CliError> {
    // Everything up to a validated config is a parse error (exit 2) and must
    // write no outputs.
    let text = std::fs::read_to_string(&args.config)
        .with_context(|| format!("reading config {}", args.config.display()))
        .map_err(parse_err)?;
    let mut cfg: ScenarioConfig = toml::from_str(&text)
        .with_context(|| format!("parsing config {}", args.config.display()))
        .map_err(parse_err)?;
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(packets) = args.packets {
        cfg.packets = packets;
    }
    if let Some(subset) = args.subset {
        cfg.subset_fraction = subset;
    }
    if let Some(grid_factor) = args.grid_factor {
        cfg.grid_factor = grid_factor;
    }
    cfg.validate()
        .context("validating config")
        .map_err(parse_err)?;

    let report = run_scenario(&cfg)
        .context("running scenario")
        .map_err(run_err)?;

    std::fs::create_dir_all(&args.out_dir)
        .with_context(|| format!("creating output directory {}", args.out_dir.display()))
        .map_err(run_err)?;

    let manifest = Manifest {
        config_path: args.config.display().to_string(),
        resolved_config: &cfg,
        tool_version: env!("CARGO_PKG_VERSION"),
        timestamp_unix_s: SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0),
        seed: cfg.seed,
    };
    write_file(
        &args.out_dir.join("manifest.json"),
        &serde_json::to_string_pretty(&manifest).map_err(|e| run_err(e.into()))?,
    )?;
    write_file(
        &args.out_dir.join("report.json"),
        &serde_json::to_string_pretty(&report).map_err(|e| run_err(e.into()))?,
    )?;
    write_file(&args.out_dir.join("peaks.csv"), &peaks_csv(&report))?;
    write_file(&args.out_dir.join("ecdf.csv"), &ecdf_csv(&report))?;

    if args.dump_cfr {
        let dump = dump_cfr(&cfg, &report).map_err(run_err)?;
        write_file(&args.out_dir.join("cfr_trace.csv"), &dump)?;
    }

    let good = report.packets.iter().filter(|p| p.error.is_none()).count();
    eprintln!(
        "simulate: {} packets ({} ok), bands {:?}, outputs in {}",
        report.packets.len(),
        good,
        report.selected_bands,
        args.out_dir.display()
    );
    Ok(())
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents)
        .with_context(|| format!("writing {}", path.display()))
        .map_err(run_err)
}

/// Per-packet truth matching, one row per configured path.
fn peaks_csv(report: &ScenarioReport) -> String {
    let mut out = String::from("packet,path,true_delay_ns,matched_delay_ns,error_samples\n");
    for p in &report.packets {
        for (path, e) in p.truth_match.entries.iter().enumerate() {
            let matched = e
                .matched_delay_s
                .map(|d| (d * 1e9).to_string())
                .unwrap_or_default();
            let err = e.error_samples.map(|v| v.to_string()).unwrap_or_default();
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                p.packet,
                path,
                e.true_delay_s * 1e9,
                matched,
                err
            );
        }
    }
    out
}

/// ECDF of the k-th strongest recovered delay, one series per rank.
fn ecdf_csv(report: &ScenarioReport) -> String {
    let mut out = String::from("rank,delay_ns,probability\n");
    for (rank, series) in report.ecdf_by_rank.iter().enumerate() {
        for pt in &series.points {
            let _ = writeln!(out, "{},{},{}", rank, pt.value * 1e9, pt.probability);
        }
    }
    out
}

/// Re-synthesizes exactly the CFRs that `run_scenario` spliced and renders
/// them as a trace file, so `splice` on the dump reproduces the report.
fn dump_cfr(cfg: &ScenarioConfig, report: &ScenarioReport) -> Result<String> {
    let bp = &cfg.band_plan;
    let plan = build_band_plan(
        bp.total_bw_hz,
        bp.sub_bw_hz,
        bp.center_hz,
        bp.subcarrier_spacing_hz,
    )?;
    let bands = report.selected_bands.clone();
    let mut packets = Vec::with_capacity(cfg.packets);
    for packet in 0..cfg.packets {
        packets.push(synth_packet_measurements(cfg, &plan, &bands, packet)?);
    }
    let header = TraceHeader {
        total_bw_hz: bp.total_bw_hz,
        sub_bw_hz: bp.sub_bw_hz,
        center_hz: bp.center_hz,
        subcarrier_spacing_hz: bp.subcarrier_spacing_hz,
        packets: cfg.packets,
        bands,
        sparsity: cfg.sparsity_order(),
        grid_factor: cfg.grid_factor,
    };
    write_trace(&header, &plan, &packets)
}

fn cmd_splice(args: &SpliceArgs) -> Result<(), CliError> {
    // Malformed files are parse errors (exit 2); a well-formed file whose
    // header describes an inconsistent band plan is a runtime error (exit 1).
    let trace = read_trace(&args.trace).map_err(|e| match e {
        trace::TraceError::Parse(e) => parse_err(e),
        trace::TraceError::Grid(e) => run_err(e),
    })?;
    let plan = trace.header.build_plan().map_err(run_err)?;

    let mut stacked_freqs: Vec<f64> = Vec::new();
    for &m in &trace.header.bands {
        stacked_freqs.extend(
            splice_core::ofdm_link::subcarrier_freqs(&plan, m).map_err(|e| run_err(e.into()))?,
        );
    }
    let dict = build_dictionary(&stacked_freqs, plan.spacing_hz(), trace.header.grid_factor)
        .map_err(|e| run_err(e.into()))?;

    let mut out = String::from("packet,path,delay_ns,coeff_mag,coeff_phase_rad\n");
    for (packet, measurements) in trace.packets.iter().enumerate() {
        let stacked = stack_measurements(measurements, &plan).map_err(|e| run_err(e.into()))?;
        let result =
            omp(&stacked, &dict, trace.header.sparsity, 0.0).map_err(|e| run_err(e.into()))?;
        for (path, (delay_s, coeff)) in support_to_delays(&result, &dict).iter().enumerate() {
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                packet,
                path,
                delay_s * 1e9,
                coeff.norm(),
                coeff.arg()
            );
        }
    }

    match &args.out {
        Some(path) => write_file(path, &out)?,
        None => print!("{out}"),
    }
    Ok(())
}

fn cmd_resolution(args: &ResolutionArgs) -> Result<(), CliError> {
    if args.bands == 0 {
        return Err(parse_err(anyhow::anyhow!("--bands must be >= 1")));
    }
    let sub_bw = match (args.subcarriers, args.spacing) {
        (Some(n), Some(fs)) => n as f64 * fs,
        (None, None) => {
            let total = args.total_bw.ok_or_else(|| {
                parse_err(anyhow::anyhow!(
                    "provide --total-bw, or both --subcarriers and --spacing"
                ))
            })?;
            total / args.bands as f64
        }
        _ => {
            return Err(parse_err(anyhow::anyhow!(
                "--subcarriers and --spacing must be given together"
            )))
        }
    };
    let total = args.bands as f64 * sub_bw;
    let (single_s, single_m) = delay_resolution(sub_bw).map_err(|e| parse_err(e.into()))?;
    let (spliced_s, spliced_m) = delay_resolution(total).map_err(|e| parse_err(e.into()))?;
    println!(
        "single band ({:.4} MHz): {:.4} ns = {:.4} m",
        sub_bw / 1e6,
        single_s * 1e9,
        single_m
    );
    println!(
        "spliced x{} ({:.4} MHz): {:.4} ns = {:.4} m",
        args.bands,
        total / 1e6,
        spliced_s * 1e9,
        spliced_m
    );
    Ok(())
}
