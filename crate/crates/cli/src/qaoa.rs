use std::f64::consts::PI;
use std::path::PathBuf;

use clap::Args;

use qcmark_core::par::Exec;
use qcmark_core::qaoa::{
    approximation_ratio, approximation_ratio_exact, brute_force_maxcut, build_qaoa_circuit, optimize_params, Graph,
};
use qcmark_core::qasm::emit;
use qcmark_core::seed;
use qcmark_core::watermark::{embed_rotation, RotationSpec};
use qcmark_core::Circuit;

use crate::report::{to_json, write_file, CmdResult, Failure, RunReport};
use crate::{noise, Ctx};

#[derive(Debug, Args)]
pub struct QaoaArgs {
    /// Preset graph: path3, triangle, cycle4, wheel5.
    #[arg(long, conflicts_with = "graph_file", required_unless_present = "graph_file")]
    pub graph: Option<String>,
    /// Graph JSON: `{"n": 3, "edges": [[0,1],[1,2,0.5]]}`.
    #[arg(long)]
    pub graph_file: Option<PathBuf>,
    /// QAOA layers.
    #[arg(long, default_value_t = 1)]
    pub p: usize,
    /// Objective evaluations for the optimizer.
    #[arg(long, default_value_t = 300)]
    pub budget: usize,
    /// Sample this many shots for the ratio; exact probabilities without it.
    #[arg(long)]
    pub shots: Option<u64>,
    /// Noise preset for sampled ratios.
    #[arg(long, default_value = "none", requires = "shots")]
    pub noise: String,
    /// Also build a copy with an ancilla rotation watermark and compare ratios.
    #[arg(long)]
    pub watermark: bool,
    /// Write the optimized circuit (watermarked with --watermark).
    #[arg(short, long)]
    pub out: Option<PathBuf>,
}

/// RY(pi) on a fresh ancilla, entangled with node 2 (or the last node).
fn watermark(g: &Graph, c: &Circuit) -> CmdResult<Circuit> {
    let n = g.num_nodes();
    let control = n.saturating_sub(1).min(2);
    let spec = RotationSpec::new(Vec::new(), None, PI, Some((control, n)));
    embed_rotation(c, &spec).map(|(c, _)| c).map_err(|e| Failure::args(e.to_string()))
}

pub fn run(a: &QaoaArgs, ctx: &Ctx) -> CmdResult<RunReport> {
    let mut report = RunReport::new("qaoa", ctx.seed);
    let g = match (&a.graph, &a.graph_file) {
        (Some(name), _) => Graph::preset(name).ok_or_else(|| Failure::args(format!("unknown graph preset `{name}`")))?,
        (None, Some(path)) => report.read_json(path)?,
        (None, None) => return Err(Failure::args("give --graph or --graph-file")),
    };
    let nm = noise(&a.noise)?;
    let fail = |e: qcmark_core::Error| Failure::args(e.to_string());
    let (max_cut, witness) = brute_force_maxcut(&g).map_err(fail)?;
    let params = optimize_params(&g, a.p, a.budget, seed::derive(ctx.seed, "qaoa", 0), Exec::default()).map_err(fail)?;
    let circuit = build_qaoa_circuit(&g, &params);
    let sample_seed = seed::derive(ctx.seed, "qaoa-sample", 0);
    let ratio = |c: &Circuit| match a.shots {
        Some(shots) => approximation_ratio(&g, c, shots, sample_seed, nm.as_ref(), None, Exec::default()),
        None => approximation_ratio_exact(&g, c, None),
    };
    let ar = ratio(&circuit).map_err(fail)?;
    eprintln!("max cut {max_cut} ({witness}), approximation ratio {ar:.4}");
    report.put("nodes", g.num_nodes());
    report.put("edges", g.edges().len());
    report.put("max_cut", max_cut);
    report.put("max_cut_witness", witness);
    report.put("params", to_json(&params));
    report.put("ar", ar);
    let mut out = circuit;
    if a.watermark {
        let marked = watermark(&g, &out)?;
        let ar_wm = ratio(&marked).map_err(fail)?;
        eprintln!("with watermark {ar_wm:.4}");
        report.put("ar_watermarked", ar_wm);
        report.put("ar_shift", ar_wm - ar);
        out = marked;
    }
    if let Some(path) = &a.out {
        write_file(path, &emit(&out).text)?;
    }
    Ok(report)
}
