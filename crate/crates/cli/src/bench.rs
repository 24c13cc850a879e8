use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::PathBuf;

use clap::Args;
use serde::Serialize;

use qcmark_core::fixtures::{by_name, Fixture, FIXTURES};
use qcmark_core::metrics::{phase_sweep, pst, PhaseSweep};
use qcmark_core::par::Exec;
use qcmark_core::simulate::{sample, to_logical, NoiseModel};
use qcmark_core::transpile::{transpile, BasisSet, CouplingMap, TranspileOptions};
use qcmark_core::watermark::{embed_combined, ppa, PpaConfig, RandomSpec};
use qcmark_core::{seed, Circuit};

use crate::report::{to_json, write_file, CmdResult, Failure, RunReport};
use crate::{backend, coupling, noise, parse_pair, Ctx};

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Bundled fixtures to run; all of them by default.
    #[arg(long = "fixture", value_delimiter = ',')]
    pub fixtures: Vec<String>,
    /// Coupling presets, or `none` for all-to-all.
    #[arg(long = "coupling", value_delimiter = ',', default_value = "line5")]
    pub couplings: Vec<String>,
    /// Noise preset: `toy` or `none`.
    #[arg(long, default_value = "toy")]
    pub noise: String,
    #[arg(long, default_value_t = 1000)]
    pub shots: u64,
    /// Independent watermarks and inputs per row; PST is averaged.
    #[arg(long, default_value_t = 1)]
    pub trials: u64,
    /// Random watermark gates.
    #[arg(long, default_value_t = 2)]
    pub k: usize,
    /// Also write the rows as CSV.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Serialize)]
struct Row {
    fixture: &'static str,
    coupling: String,
    depth_base: f64,
    depth_wm: f64,
    two_qubit_base: f64,
    two_qubit_wm: f64,
    pst_base: f64,
    pst_wm: f64,
    ppa: f64,
}

const CSV_HEADER: &str = "fixture,coupling,depth_base,depth_wm,two_qubit_base,two_qubit_wm,pst_base,pst_wm,ppa";

fn rows_to_csv(rows: &[Row]) -> String {
    let mut out = format!("{CSV_HEADER}\n");
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{:e}",
            r.fixture, r.coupling, r.depth_base, r.depth_wm, r.two_qubit_base, r.two_qubit_wm, r.pst_base, r.pst_wm, r.ppa
        )
        .expect("writing to a string");
    }
    out
}

struct Run {
    depth: usize,
    two_qubit: usize,
    pst: f64,
}

/// Transpiles with the ibm basis and measures PST on the functional qubits.
fn measure(c: &Circuit, f: &Fixture, map: Option<&CouplingMap>, noise: Option<&NoiseModel>, input: usize, shots: u64, s: u64) -> CmdResult<Run> {
    let fail = |e: qcmark_core::Error| Failure::args(format!("{}: {e}", f.name));
    let mut opts = TranspileOptions::new(BasisSet::ibm());
    opts.coupling = map.cloned();
    let routed = transpile(c, &opts).map_err(fail)?;
    let d = sample(&routed.circuit, input, shots, s, noise, Exec::default()).map_err(fail)?;
    let d = to_logical(&routed, &d).map_err(fail)?.marginalize(f.functional).map_err(fail)?;
    let want = (f.truth)(input);
    let reference: String = f.functional.iter().rev().map(|&q| if (want >> q) & 1 == 1 { '1' } else { '0' }).collect();
    Ok(Run {
        depth: routed.circuit.depth(),
        two_qubit: routed.circuit.two_qubit_gate_count(),
        pst: pst(&d, &reference).map_err(fail)?,
    })
}

pub fn run_bench(a: &BenchArgs, ctx: &Ctx) -> CmdResult<RunReport> {
    let mut report = RunReport::new("bench", ctx.seed);
    if a.trials == 0 || a.shots == 0 {
        return Err(Failure::args("--trials and --shots must be at least 1"));
    }
    let fixtures: Vec<&Fixture> = if a.fixtures.is_empty() {
        FIXTURES.iter().collect()
    } else {
        a.fixtures
            .iter()
            .map(|n| by_name(n).ok_or_else(|| Failure::args(format!("unknown fixture `{n}`"))))
            .collect::<CmdResult<_>>()?
    };
    let nm = noise(&a.noise)?;
    let mut rows = Vec::new();
    for (ci, cname) in a.couplings.iter().enumerate() {
        let map = coupling(cname)?;
        for (fi, f) in fixtures.iter().enumerate() {
            let base = f.circuit();
            let mut sums = [0.0f64; 6];
            let mut width = 0;
            for t in 0..a.trials {
                let ts = seed::derive(ctx.seed, "bench", t);
                let random = RandomSpec::drawn(a.k, seed::derive(ts, "bench-watermark", fi as u64));
                let (marked, _) = embed_combined(&base, &f.default_rotation(), &random).map_err(|e| Failure::args(e.to_string()))?;
                width = marked.num_qubits();
                let input = (seed::derive(ts, "bench-input", fi as u64) as usize) & ((1 << f.num_qubits) - 1);
                let s = seed::derive(ts, f.name, ci as u64);
                let b = measure(&base, f, map.as_ref(), nm.as_ref(), input, a.shots, s)?;
                let w = measure(&marked, f, map.as_ref(), nm.as_ref(), input, a.shots, s)?;
                let vals = [b.depth as f64, w.depth as f64, b.two_qubit as f64, w.two_qubit as f64, b.pst, w.pst];
                for (acc, v) in sums.iter_mut().zip(vals) {
                    *acc += v;
                }
            }
            let n = a.trials as f64;
            let p = ppa(&PpaConfig::for_host(width as u64, a.k as u64)).map_err(|e| Failure::args(e.to_string()))?;
            rows.push(Row {
                fixture: f.name,
                coupling: cname.clone(),
                depth_base: sums[0] / n,
                depth_wm: sums[1] / n,
                two_qubit_base: sums[2] / n,
                two_qubit_wm: sums[3] / n,
                pst_base: sums[4] / n,
                pst_wm: sums[5] / n,
                ppa: p,
            });
        }
    }
    let csv = rows_to_csv(&rows);
    eprint!("{csv}");
    if let Some(path) = &a.csv {
        write_file(path, &csv)?;
    }
    let drop = rows.iter().map(|r| r.pst_base - r.pst_wm).sum::<f64>() / rows.len().max(1) as f64;
    report.put("mean_pst_drop", drop);
    report.put("rows", to_json(&rows));
    Ok(report)
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Host circuit; or use --fixture.
    #[arg(required_unless_present = "fixture")]
    pub input: Option<PathBuf>,
    /// Bundled fixture, with its ancillas and CNOT as defaults.
    #[arg(long, conflicts_with = "input")]
    pub fixture: Option<String>,
    #[arg(long = "ancilla", value_delimiter = ',')]
    pub ancillas: Vec<usize>,
    #[arg(long)]
    pub target: Option<usize>,
    #[arg(long, value_parser = parse_pair)]
    pub cnot: Option<(usize, usize)>,
    /// Grid points over [0, 2 pi).
    #[arg(long, default_value_t = 24)]
    pub steps: usize,
    /// Computational-basis input state, as an index.
    #[arg(long, default_value_t = 0)]
    pub state: usize,
    /// Shots per noisy run; noiseless backends use exact probabilities.
    #[arg(long, default_value_t = 2000)]
    pub shots: u64,
    /// Backends as `coupling[:noise]`, e.g. `line5:toy` or `ideal`.
    #[arg(long = "backend", value_delimiter = ',', default_value = "ideal")]
    pub backends: Vec<String>,
    /// Also write `theta,config,tvd` rows here.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

pub fn run_sweep(a: &SweepArgs, ctx: &Ctx) -> CmdResult<RunReport> {
    let mut report = RunReport::new("sweep-phase", ctx.seed);
    let (host, defaults) = match (&a.input, &a.fixture) {
        (Some(path), _) => (report.read_circuit(path)?, None),
        (None, Some(name)) => {
            let f = by_name(name).ok_or_else(|| Failure::args(format!("unknown fixture `{name}`")))?;
            (f.circuit(), Some(f.default_rotation()))
        }
        (None, None) => return Err(Failure::args("give a circuit or --fixture")),
    };
    // explicit flags win over the fixture's rotation placement
    let (ancillas, target, cnot) = match defaults {
        Some(d) if a.ancillas.is_empty() => (d.ancillas, a.target.or(d.target), a.cnot.or(d.cnot)),
        Some(d) => (a.ancillas.clone(), a.target, a.cnot.or(d.cnot)),
        None => (a.ancillas.clone(), a.target, a.cnot),
    };
    let sweep = PhaseSweep {
        ancillas,
        target,
        cnot,
        grid_steps: a.steps,
        input: a.state,
        shots: a.shots,
        seed: ctx.seed,
    };
    let configs = a.backends.iter().map(|b| backend(b)).collect::<CmdResult<Vec<_>>>()?;
    let result = phase_sweep(&host, &sweep, &configs, Exec::default()).map_err(|e| Failure::args(e.to_string()))?;
    if let Some(path) = &a.csv {
        write_file(path, &result.to_csv())?;
    }
    let peak = result.argmax_theta;
    eprintln!("summed TVD peaks at theta = {peak:.6} ({:.4} pi)", peak / PI);
    report.put("argmax_theta", peak);
    report.put("sweep", to_json(&result));
    Ok(report)
}
