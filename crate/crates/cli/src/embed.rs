use std::path::PathBuf;

use clap::{Args, ValueEnum};
use serde_json::Value;

use qcmark_core::qasm::emit;
use qcmark_core::seed;
use qcmark_core::watermark::{
    embed_combined, embed_random, embed_rotation, ppa, PpaConfig, RandomSpec, RotationAxis, RotationSpec,
    WatermarkRecord,
};
use qcmark_core::Circuit;

use crate::report::{pretty, write_file, CmdResult, Failure, RunReport};
use crate::{parse_angle, parse_pair, Ctx};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SchemeArg {
    Rotation,
    Random,
    Combined,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AxisArg {
    X,
    Y,
}

#[derive(Debug, Args)]
pub struct EmbedArgs {
    /// Host circuit (OpenQASM 2.0).
    pub input: PathBuf,
    #[arg(long, value_enum)]
    pub scheme: SchemeArg,
    /// Rotation phase, as a QASM expression.
    #[arg(long, default_value = "pi", value_parser = parse_angle, allow_hyphen_values = true)]
    pub theta: f64,
    #[arg(long, value_enum, default_value = "y")]
    pub axis: AxisArg,
    /// Ancilla qubits (repeat or comma-separate). None appends a fresh one.
    #[arg(long = "ancilla", value_delimiter = ',')]
    pub ancillas: Vec<usize>,
    /// Rotation target; defaults to the first ancilla.
    #[arg(long)]
    pub target: Option<usize>,
    /// CNOT as `control,target`.
    #[arg(long, value_parser = parse_pair)]
    pub cnot: Option<(usize, usize)>,
    /// Random gates drawn when the scheme has a random block.
    #[arg(long, default_value_t = 2)]
    pub k: usize,
    /// Instruction index for the random block; defaults to the middle.
    #[arg(long)]
    pub insert_at: Option<usize>,
    /// Skip the barrier in front of the random block.
    #[arg(long)]
    pub no_leading_barrier: bool,
    /// Watermarked circuit output.
    #[arg(short, long)]
    pub out: PathBuf,
    /// Record output. With --again, the new record is appended to this file.
    #[arg(long)]
    pub record: PathBuf,
    /// The input already carries watermarks listed in --record; stack another.
    #[arg(long)]
    pub again: bool,
    /// Free-form timestamp stored in the record.
    #[arg(long)]
    pub created: Option<String>,
}

/// A record file holds one record, or a list once watermarks are stacked.
pub fn parse_records(v: Value) -> Result<Vec<WatermarkRecord>, serde_json::Error> {
    if v.is_array() {
        serde_json::from_value(v)
    } else {
        serde_json::from_value(v).map(|r| vec![r])
    }
}

fn rotation(a: &EmbedArgs) -> RotationSpec {
    let mut spec = RotationSpec::new(a.ancillas.clone(), a.target, a.theta, a.cnot);
    spec.axis = match a.axis {
        AxisArg::X => RotationAxis::X,
        AxisArg::Y => RotationAxis::Y,
    };
    spec
}

fn random(a: &EmbedArgs, seed: u64) -> RandomSpec {
    let mut spec = RandomSpec::drawn(a.k, seed);
    spec.insertion_index = a.insert_at;
    spec.leading_barrier = !a.no_leading_barrier;
    spec
}

pub fn run(a: &EmbedArgs, ctx: &Ctx) -> CmdResult<RunReport> {
    let mut report = RunReport::new("embed", ctx.seed);
    let host = report.read_circuit(&a.input)?;
    let mut records = if a.again {
        let v: Value = report.read_json(&a.record)?;
        parse_records(v).map_err(|e| Failure::io(format!("{}: {e}", a.record.display())))?
    } else {
        Vec::new()
    };
    let layer = records.len() as u64;
    let block_seed = seed::derive(ctx.seed, "embed-random", layer);
    let embedded = match a.scheme {
        SchemeArg::Rotation => embed_rotation(&host, &rotation(a)),
        SchemeArg::Random => embed_random(&host, &random(a, block_seed)),
        SchemeArg::Combined => embed_combined(&host, &rotation(a), &random(a, block_seed)),
    };
    let (marked, mut record) = embedded.map_err(|e| Failure::args(e.to_string()))?;
    record.created = a.created.clone();

    write_file(&a.out, &emit(&marked).text)?;
    records.push(record.clone());
    let record_text = if records.len() == 1 { pretty(&record) } else { pretty(&records) };
    write_file(&a.record, &record_text)?;

    let stats = |c: &Circuit| (c.depth(), c.two_qubit_gate_count(), c.len());
    let (d0, q0, n0) = stats(&host);
    let (d1, q1, n1) = stats(&marked);
    eprintln!("depth {d0} -> {d1}, 2-qubit gates {q0} -> {q1}");
    report.put("depth_before", d0);
    report.put("depth_after", d1);
    report.put("two_qubit_before", q0);
    report.put("two_qubit_after", q1);
    report.put("instructions_added", n1 - n0);
    report.put("watermark_gates", record.entries.len());
    report.put("stacked_records", records.len());
    if a.scheme == SchemeArg::Combined {
        let cfg = PpaConfig::for_host(marked.num_qubits() as u64, a.k as u64);
        let p = ppa(&cfg).map_err(|e| Failure::args(e.to_string()))?;
        report.put("ppa", p);
    }
    Ok(report)
}
