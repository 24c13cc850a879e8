use std::path::PathBuf;

use clap::Args;

use qcmark_core::qasm::emit;
use qcmark_core::transpile::{transpile, TranspileOptions};

use crate::report::{to_json, write_file, CmdResult, Failure, RunReport};
use crate::{basis, coupling, Ctx};

#[derive(Debug, Args)]
pub struct TranspileArgs {
    pub input: PathBuf,
    /// `ibm`, `extended`, or a comma list of gate names.
    #[arg(long, default_value = "ibm")]
    pub basis: String,
    /// Coupling preset; all-to-all when omitted.
    #[arg(long)]
    pub coupling: Option<String>,
    /// Skip the peephole pass.
    #[arg(long)]
    pub no_optimize: bool,
    #[arg(short, long)]
    pub out: PathBuf,
}

pub fn run(a: &TranspileArgs, ctx: &Ctx) -> CmdResult<RunReport> {
    let mut report = RunReport::new("transpile", ctx.seed);
    let c = report.read_circuit(&a.input)?;
    let mut opts = TranspileOptions::new(basis(&a.basis)?);
    opts.coupling = match &a.coupling {
        Some(name) => coupling(name)?,
        None => None,
    };
    opts.optimize = !a.no_optimize;
    let routed = transpile(&c, &opts).map_err(|e| Failure::args(e.to_string()))?;
    write_file(&a.out, &emit(&routed.circuit).text)?;
    let out = &routed.circuit;
    eprintln!(
        "depth {} -> {}, 2-qubit gates {} -> {}, {} swaps",
        c.depth(),
        out.depth(),
        c.two_qubit_gate_count(),
        out.two_qubit_gate_count(),
        routed.swap_log.len()
    );
    report.put("depth_before", c.depth());
    report.put("depth_after", out.depth());
    report.put("two_qubit_before", c.two_qubit_gate_count());
    report.put("two_qubit_after", out.two_qubit_gate_count());
    report.put("instructions_after", out.len());
    report.put("swaps", routed.swap_log.len());
    report.put("initial_layout", to_json(&routed.initial_layout));
    report.put("final_layout", to_json(&routed.final_layout));
    Ok(report)
}
