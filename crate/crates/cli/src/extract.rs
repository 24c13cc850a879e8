use std::path::PathBuf;
use std::time::Instant;

use clap::Args;
use serde_json::Value;

use qcmark_core::extract::{retrieve_with, verify, Normalization, Verdict, WatermarkFinding};

use crate::embed::parse_records;
use crate::report::{pretty, to_json, write_file, CmdResult, Failure, RunReport, EXIT_ABSENT, EXIT_OK, EXIT_PARTIAL};
use crate::Ctx;

#[derive(Debug, Args)]
pub struct ExtractArgs {
    /// The owner's original, unmarked circuit.
    pub base: PathBuf,
    /// The circuit under suspicion.
    pub suspect: PathBuf,
    /// Finding output; without it the finding goes into the report.
    #[arg(short, long)]
    pub out: Option<PathBuf>,
    /// Only undo routing SWAPs; skip the common-basis lowering.
    #[arg(long)]
    pub swaps_only: bool,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Finding written by `extract`.
    pub finding: PathBuf,
    /// Record written by `embed`: one record, or a list of stacked ones.
    pub record: PathBuf,
}

pub fn run_extract(a: &ExtractArgs, ctx: &Ctx) -> CmdResult<RunReport> {
    let mut report = RunReport::new("extract", ctx.seed);
    let base = report.read_circuit(&a.base)?;
    let suspect = report.read_circuit(&a.suspect)?;
    let norm = if a.swaps_only {
        Normalization::swaps_only()
    } else {
        Normalization::default()
    };
    let start = Instant::now();
    let finding = retrieve_with(&base, &suspect, &norm).map_err(|e| Failure::args(e.to_string()))?;
    // only the retrieval itself is timed
    if ctx.time {
        report.wall_time_ms = Some(start.elapsed().as_secs_f64() * 1e3);
    }

    if finding.gates.is_empty() {
        eprintln!("no watermark evidence");
    } else {
        let seqs: Vec<String> = finding.gates.iter().map(|g| g.seq.to_string()).collect();
        eprintln!("{} extra gates at sequence numbers {}", finding.gates.len(), seqs.join(", "));
    }
    report.put("suspect_instructions", suspect.len());
    report.put("found_gates", finding.gates.len());
    report.put("base_surplus", finding.base_surplus.len());
    report.put("evidence", !finding.gates.is_empty());
    match &a.out {
        Some(path) => write_file(path, &pretty(&finding))?,
        None => report.put("finding", to_json(&finding)),
    }
    Ok(report)
}

fn status_code(v: &Verdict) -> u8 {
    match v {
        Verdict::Confirmed => EXIT_OK,
        Verdict::Partial { .. } => EXIT_PARTIAL,
        Verdict::Absent => EXIT_ABSENT,
    }
}

pub fn run_verify(a: &VerifyArgs, ctx: &Ctx) -> CmdResult<(RunReport, u8)> {
    let mut report = RunReport::new("verify", ctx.seed);
    let finding: WatermarkFinding = report.read_json(&a.finding)?;
    let v: Value = report.read_json(&a.record)?;
    let records = parse_records(v).map_err(|e| Failure::io(format!("{}: {e}", a.record.display())))?;
    if records.is_empty() {
        return Err(Failure::io(format!("{}: no records", a.record.display())));
    }
    let mut verdicts = Vec::new();
    for r in &records {
        verdicts.push(verify(&finding, r).map_err(|e| Failure::io(format!("{}: {e}", a.record.display())))?);
    }
    // the weakest verdict decides
    let code = verdicts.iter().map(status_code).max().unwrap_or(EXIT_OK);
    for (i, v) in verdicts.iter().enumerate() {
        match v {
            Verdict::Confirmed => eprintln!("record {i}: confirmed"),
            Verdict::Partial { missing } => eprintln!("record {i}: partial, {} entries missing", missing.len()),
            Verdict::Absent => eprintln!("record {i}: absent"),
        }
    }
    let status = match code {
        EXIT_OK => "confirmed",
        EXIT_PARTIAL => "partial",
        _ => "absent",
    };
    report.put("status", status);
    report.put("verdicts", to_json(&verdicts));
    Ok((report, code))
}
