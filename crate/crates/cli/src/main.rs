//! `qcmark`: embed, extract and verify quantum circuit watermarks, and run
//! the benchmark studies around them.
//!
//! Every command prints a JSON run report (or writes it to `--report`).
//! Exit codes: 0 ok, 1 unreadable or unparsable input, 2 bad arguments,
//! 3 watermark partially present, 4 watermark absent.

mod bench;
mod embed;
mod extract;
mod qaoa;
mod report;
mod transpile;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};

use qcmark_core::metrics::BackendConfig;
use qcmark_core::qasm::parse_str;
use qcmark_core::simulate::NoiseModel;
use qcmark_core::transpile::{BasisSet, CouplingMap};
use qcmark_core::GateKind;

use report::{pretty, write_file, CmdResult, Failure, RunReport, EXIT_OK};

#[derive(Debug, Parser)]
#[command(name = "qcmark", version, about = "Watermark quantum circuits and recover the marks")]
struct Cli {
    /// Seed for every random choice in the run.
    #[arg(long, global = true, env = "QCMARK_SEED", default_value_t = 0)]
    seed: u64,
    /// Add wall_time_ms to the report.
    #[arg(long, global = true)]
    time: bool,
    /// Write the run report to this file instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    report: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Embed a watermark into a QASM circuit.
    Embed(embed::EmbedArgs),
    /// Diff a suspect circuit against the original and list extra gates.
    Extract(extract::ExtractArgs),
    /// Check a finding against a watermark record.
    Verify(extract::VerifyArgs),
    /// Depth, 2-qubit count, PST and PPA for fixtures with and without a watermark.
    Bench(bench::BenchArgs),
    /// Ancilla TVD over a grid of rotation phases.
    SweepPhase(bench::SweepArgs),
    /// Optimize a MaxCut QAOA circuit and report its approximation ratio.
    Qaoa(qaoa::QaoaArgs),
    /// Lower, route and optimize a circuit.
    Transpile(transpile::TranspileArgs),
}

pub struct Ctx {
    pub seed: u64,
    pub time: bool,
}

fn run(cli: &Cli) -> CmdResult<(RunReport, u8)> {
    let ctx = Ctx {
        seed: cli.seed,
        time: cli.time,
    };
    let start = Instant::now();
    let (mut report, code) = match &cli.command {
        Command::Embed(a) => (embed::run(a, &ctx)?, EXIT_OK),
        Command::Extract(a) => (extract::run_extract(a, &ctx)?, EXIT_OK),
        Command::Verify(a) => extract::run_verify(a, &ctx)?,
        Command::Bench(a) => (bench::run_bench(a, &ctx)?, EXIT_OK),
        Command::SweepPhase(a) => (bench::run_sweep(a, &ctx)?, EXIT_OK),
        Command::Qaoa(a) => (qaoa::run(a, &ctx)?, EXIT_OK),
        Command::Transpile(a) => (transpile::run(a, &ctx)?, EXIT_OK),
    };
    if cli.time && report.wall_time_ms.is_none() {
        report.wall_time_ms = Some(start.elapsed().as_secs_f64() * 1e3);
    }
    Ok((report, code))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok((report, code)) => {
            let text = pretty(&report);
            match &cli.report {
                Some(path) => {
                    if let Err(e) = write_file(path, &text) {
                        eprintln!("qcmark: {e}");
                        return ExitCode::from(e.code);
                    }
                }
                None => print!("{text}"),
            }
            ExitCode::from(code)
        }
        Err(e) => {
            eprintln!("qcmark: {e}");
            ExitCode::from(e.code)
        }
    }
}

/// Angle expression as written in QASM: `pi`, `pi/2`, `-3*pi/4`, `0.5`.
pub fn parse_angle(s: &str) -> Result<f64, String> {
    let src = format!("OPENQASM 2.0;\nqreg q[1];\nrz({s}) q[0];\n");
    let c = parse_str(&src).map_err(|_| format!("`{s}` is not an angle"))?;
    match c.instructions() {
        [inst] => match inst.as_gate() {
            Some(g) if g.kind == GateKind::RZ => Ok(g.params[0]),
            _ => Err(format!("`{s}` is not an angle")),
        },
        _ => Err(format!("`{s}` is not an angle")),
    }
}

/// `a,b` qubit pair.
pub fn parse_pair(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("expected `a,b`, got `{s}`"))?;
    let q = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("`{t}`: {e}"));
    Ok((q(a)?, q(b)?))
}

pub fn coupling(name: &str) -> CmdResult<Option<CouplingMap>> {
    if name == "none" {
        return Ok(None);
    }
    CouplingMap::preset(name)
        .map(Some)
        .ok_or_else(|| Failure::args(format!("unknown coupling preset `{name}`")))
}

pub fn noise(name: &str) -> CmdResult<Option<NoiseModel>> {
    NoiseModel::preset(name)
        .map(|n| (!n.is_noiseless()).then_some(n))
        .ok_or_else(|| Failure::args(format!("unknown noise preset `{name}`")))
}

/// A preset name or a comma list of gate names.
pub fn basis(spec: &str) -> CmdResult<BasisSet> {
    if let Some(b) = BasisSet::preset(spec) {
        return Ok(b);
    }
    let kinds = spec
        .split(',')
        .map(|n| GateKind::from_name(n.trim()).ok_or_else(|| Failure::args(format!("unknown gate `{n}`"))))
        .collect::<CmdResult<Vec<_>>>()?;
    BasisSet::new(kinds).map_err(|e| Failure::args(e.to_string()))
}

/// `coupling[:noise]`, e.g. `line5:toy` or `ideal`.
pub fn backend(spec: &str) -> CmdResult<BackendConfig> {
    let (c, n) = spec.split_once(':').unwrap_or((spec, "none"));
    let map = if c == "ideal" { None } else { coupling(c)? };
    Ok(BackendConfig::new(spec, map, noise(n)?))
}
