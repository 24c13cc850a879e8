//! Recovering watermark gates from a transpiled circuit.
//!
//! Both the original and the suspect are normalized the same way: routing
//! SWAPs are removed with the wires relabeled, gates are lowered to a common
//! basis, and the peephole pass runs. Whatever the suspect has beyond the
//! original's gate multiset is the finding.

mod swaps;

use std::collections::BTreeMap;
use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

pub use swaps::{detect_swaps, is_swap_up_to_phase, remove_swaps, SwapKind, SwapMatch, MAX_WINDOW};

use crate::circuit::{Circuit, Gate, Instruction};
use crate::error::{Error, Result};
use crate::gate::GateKind;
use crate::transpile::{decompose_to_basis, lower_into, optimize, BasisSet, Layout};
use crate::watermark::{RecordEntry, WatermarkRecord};

/// Angle quantum for signatures, in radians.
pub const SIGNATURE_RESOLUTION: f64 = 1e-6;

const FULL_TURN_STEPS: i64 = 6_283_185;

/// Identity of a gate for multiset comparison: kind, angles rounded to
/// micro-radians modulo a full turn, and ordered qubits.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct GateSignature {
    pub name: String,
    pub params_micro: Vec<i64>,
    pub qubits: Vec<usize>,
}

fn quantize(angle: f64) -> i64 {
    let steps = (angle.rem_euclid(TAU) / SIGNATURE_RESOLUTION).round() as i64;
    if steps >= FULL_TURN_STEPS {
        0
    } else {
        steps
    }
}

impl GateSignature {
    pub fn of(gate: &Gate) -> Self {
        Self::from_parts(gate.kind.name(), &gate.params, &gate.qubits)
    }

    pub fn from_parts(name: &str, params: &[f64], qubits: &[usize]) -> Self {
        Self {
            name: name.to_string(),
            params_micro: params.iter().map(|&p| quantize(p)).collect(),
            qubits: qubits.to_vec(),
        }
    }
}

/// Gate multiset. Barriers and measurements are not counted.
pub fn count_gates(circuit: &Circuit) -> BTreeMap<GateSignature, usize> {
    let mut counts = BTreeMap::new();
    for g in circuit.gates() {
        *counts.entry(GateSignature::of(g)).or_insert(0) += 1;
    }
    counts
}

/// How circuits are brought to a comparable form before diffing.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Normalization {
    /// Common basis to lower into; `None` keeps gates as written.
    pub basis: Option<Vec<GateKind>>,
    pub peephole: bool,
}

impl Default for Normalization {
    /// Lower to `{cx, u1, u2, u3, id}` and run the peephole pass, so copies
    /// transpiled against different native sets still line up.
    fn default() -> Self {
        Self {
            basis: Some(BasisSet::ibm().kinds().collect()),
            peephole: true,
        }
    }
}

impl Normalization {
    /// SWAP removal only.
    pub fn swaps_only() -> Self {
        Self {
            basis: None,
            peephole: false,
        }
    }

    fn basis_set(&self) -> Result<Option<BasisSet>> {
        self.basis.as_ref().map(|k| BasisSet::new(k.iter().copied())).transpose()
    }

    /// SWAP-free, lowered, optimized copy plus the final wire layout.
    pub fn apply(&self, circuit: &Circuit) -> Result<(Circuit, Layout)> {
        let (mut c, layout) = remove_swaps(circuit);
        if let Some(basis) = self.basis_set()? {
            c = decompose_to_basis(&c, &basis)?;
        }
        if self.peephole {
            c = optimize(&c);
        }
        Ok((c, layout))
    }

    /// Signatures a single logical gate contributes after normalization.
    pub fn signatures_of(&self, gate: &Gate) -> Result<Vec<GateSignature>> {
        let Some(basis) = self.basis_set()? else {
            return Ok(vec![GateSignature::of(gate)]);
        };
        let mut lowered = Vec::new();
        lower_into(gate, &basis, &mut lowered);
        Ok(lowered.iter().filter_map(Instruction::as_gate).map(GateSignature::of).collect())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoundGate {
    /// 1-based instruction position in the normalized suspect.
    pub seq: usize,
    pub name: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub params: Vec<f64>,
    pub qubits: Vec<usize>,
}

impl FoundGate {
    pub fn signature(&self) -> GateSignature {
        GateSignature::from_parts(&self.name, &self.params, &self.qubits)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WatermarkFinding {
    pub gates: Vec<FoundGate>,
    /// Original gates with no counterpart in the suspect.
    pub base_surplus: Vec<GateSignature>,
    #[serde(default)]
    pub normalization: Normalization,
}

/// Suspect gates left over after removing one match per original gate.
/// Sequence numbers follow a left-to-right pass in which the earliest
/// occurrence of a signature is the one matched against the original.
pub fn retrieve(base: &Circuit, suspect: &Circuit) -> Result<WatermarkFinding> {
    retrieve_with(base, suspect, &Normalization::default())
}

pub fn retrieve_with(base: &Circuit, suspect: &Circuit, norm: &Normalization) -> Result<WatermarkFinding> {
    let (base_n, _) = norm.apply(base)?;
    let (suspect_n, _) = norm.apply(suspect)?;
    let mut remaining = count_gates(&base_n);
    let mut gates = Vec::new();
    for (i, inst) in suspect_n.instructions().iter().enumerate() {
        let Some(g) = inst.as_gate() else { continue };
        let sig = GateSignature::of(g);
        match remaining.get_mut(&sig) {
            Some(n) if *n > 0 => *n -= 1,
            _ => gates.push(FoundGate {
                seq: i + 1,
                name: g.kind.name().to_string(),
                params: g.params.clone(),
                qubits: g.qubits.clone(),
            }),
        }
    }
    let base_surplus = remaining
        .into_iter()
        .flat_map(|(sig, n)| std::iter::repeat_n(sig, n))
        .collect();
    Ok(WatermarkFinding {
        gates,
        base_surplus,
        normalization: norm.clone(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Verdict {
    Confirmed,
    Partial { missing: Vec<RecordEntry> },
    Absent,
}

/// Checks each record entry, in the finding's normalization, against the
/// finding's gate multiset. An entry is present only if every gate it lowers
/// to is still available; matched gates are consumed.
pub fn verify(finding: &WatermarkFinding, record: &WatermarkRecord) -> Result<Verdict> {
    if record.entries.is_empty() {
        return Err(Error::Watermark("record has no entries".into()));
    }
    let mut pool: BTreeMap<GateSignature, usize> = BTreeMap::new();
    for g in &finding.gates {
        *pool.entry(g.signature()).or_insert(0) += 1;
    }
    let mut missing = Vec::new();
    for entry in &record.entries {
        let gate = entry.to_instruction();
        let gate = gate.as_gate().expect("record entries are gates");
        let mut need: BTreeMap<GateSignature, usize> = BTreeMap::new();
        for sig in finding.normalization.signatures_of(gate)? {
            *need.entry(sig).or_insert(0) += 1;
        }
        let present = need.iter().all(|(s, n)| pool.get(s).is_some_and(|have| have >= n));
        if present {
            for (s, n) in need {
                *pool.get_mut(&s).expect("checked above") -= n;
            }
        } else {
            missing.push(entry.clone());
        }
    }
    Ok(if missing.is_empty() {
        Verdict::Confirmed
    } else if missing.len() == record.entries.len() {
        Verdict::Absent
    } else {
        Verdict::Partial { missing }
    })
}

#[cfg(test)]
mod tests {
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

    use super::*;
    use crate::circuit::Instruction as I;
    use crate::transpile::{transpile, CouplingMap, TranspileOptions};
    use crate::watermark::{embed_random, embed_rotation, RandomSpec, RotationSpec};

    fn three_qubit_base() -> Circuit {
        Circuit::from_instructions(
            3,
            0,
            vec![I::rz(FRAC_PI_2, 0), I::rz(FRAC_PI_4, 1), I::rz(FRAC_PI_4, 2), I::cx(1, 0)],
        )
        .unwrap()
    }

    #[test]
    fn signature_wraps_full_turn() {
        let a = GateSignature::from_parts("rz", &[-1e-9], &[0]);
        let b = GateSignature::from_parts("rz", &[TAU + 2e-9], &[0]);
        let c = GateSignature::from_parts("rz", &[0.0], &[0]);
        assert_eq!(a, c);
        assert_eq!(b, c);
        assert_ne!(GateSignature::from_parts("rz", &[1e-5], &[0]), c);
        assert_eq!(GateSignature::from_parts("rz", &[-FRAC_PI_2], &[0]), GateSignature::from_parts("rz", &[3.0 * FRAC_PI_2], &[0]));
    }

    #[test]
    fn multiset_counts() {
        let m = count_gates(&three_qubit_base());
        assert_eq!(m.len(), 4);
        assert!(m.values().all(|&n| n == 1));
        let c = Circuit::from_instructions(2, 0, vec![I::cx(0, 1), I::barrier([0, 1]), I::cx(0, 1), I::cx(1, 0)]).unwrap();
        let m = count_gates(&c);
        assert_eq!(m[&GateSignature::from_parts("cx", &[], &[0, 1])], 2);
        assert_eq!(m.values().sum::<usize>(), 3);
    }

    #[test]
    fn finding_is_exactly_the_added_gates() {
        let base = three_qubit_base();
        let mut marked = base.clone();
        marked.push(I::cx(1, 0)).unwrap();
        marked.push(I::rz(FRAC_PI_4, 0)).unwrap();
        marked.push(I::gate(GateKind::SX, [], [2])).unwrap();
        let f = retrieve_with(&base, &marked, &Normalization::swaps_only()).unwrap();
        let names: Vec<(usize, &str)> = f.gates.iter().map(|g| (g.seq, g.name.as_str())).collect();
        // the first cx in the suspect matches the original's, so the extra one
        // is the later occurrence
        assert_eq!(names, vec![(5, "cx"), (6, "rz"), (7, "sx")]);
        assert!(f.base_surplus.is_empty());
    }

    #[test]
    fn identical_circuits_give_empty_finding() {
        let base = three_qubit_base();
        let f = retrieve(&base, &base).unwrap();
        assert!(f.gates.is_empty());
        assert!(f.base_surplus.is_empty());
    }

    #[test]
    fn surplus_reports_missing_base_gates() {
        let base = three_qubit_base();
        let mut shorter = base.clone().into_instructions();
        shorter.pop();
        let shorter = Circuit::from_instructions(3, 0, shorter).unwrap();
        let f = retrieve_with(&base, &shorter, &Normalization::swaps_only()).unwrap();
        assert!(f.gates.is_empty());
        assert_eq!(f.base_surplus, vec![GateSignature::from_parts("cx", &[], &[1, 0])]);
    }

    fn toffoli_host() -> Circuit {
        use GateKind::{Tdg, H, T};
        let g = |k, q: &[usize]| I::gate(k, [], q.to_vec());
        Circuit::from_instructions(
            4,
            0,
            vec![
                g(H, &[2]),
                I::cx(1, 2),
                g(Tdg, &[2]),
                I::cx(0, 2),
                g(T, &[2]),
                I::cx(1, 2),
                g(Tdg, &[2]),
                I::cx(0, 2),
                g(T, &[1]),
                g(T, &[2]),
                g(H, &[2]),
                I::cx(0, 1),
                g(T, &[0]),
                g(Tdg, &[1]),
                I::cx(0, 1),
            ],
        )
        .unwrap()
    }

    #[test]
    fn rotation_watermark_survives_routing_and_basis() {
        let base = toffoli_host();
        let spec = RotationSpec::new(vec![], None, PI, Some((0, 4)));
        let (marked, record) = embed_rotation(&base, &spec).unwrap();
        let map = CouplingMap::line(5);
        let opts = TranspileOptions::new(BasisSet::ibm()).with_coupling(map);
        let base_t = transpile(&base, &opts).unwrap().circuit;
        let marked_t = transpile(&marked, &opts).unwrap().circuit;
        let f = retrieve(&base_t, &marked_t).unwrap();
        assert_eq!(verify(&f, &record).unwrap(), Verdict::Confirmed);
        assert!(f.base_surplus.is_empty(), "{:?}", f.base_surplus);
        // untouched copy carries nothing
        let f = retrieve(&base_t, &base_t).unwrap();
        assert_eq!(verify(&f, &record).unwrap(), Verdict::Absent);
    }

    #[test]
    fn random_watermark_across_mixed_bases() {
        let base = toffoli_host();
        let (marked, record) = embed_random(&base, &RandomSpec::drawn(3, 11)).unwrap();
        let base_t = transpile(&base, &TranspileOptions::new(BasisSet::ibm())).unwrap().circuit;
        let opts = TranspileOptions::new(BasisSet::extended()).with_coupling(CouplingMap::ring(4));
        let marked_t = transpile(&marked, &opts).unwrap().circuit;
        let f = retrieve(&base_t, &marked_t).unwrap();
        assert_eq!(verify(&f, &record).unwrap(), Verdict::Confirmed, "{f:?}");
    }

    #[test]
    fn removing_gates_gives_partial() {
        let base = toffoli_host();
        let spec = RotationSpec::new(vec![], None, PI, Some((0, 4)));
        let (marked, record) = embed_rotation(&base, &spec).unwrap();
        let mut insts = marked.into_instructions();
        let cut = insts.iter().rposition(|i| i.is_two_qubit_gate()).unwrap();
        insts.remove(cut);
        let tampered = Circuit::from_instructions(5, 0, insts).unwrap();
        let f = retrieve(&base, &tampered).unwrap();
        match verify(&f, &record).unwrap() {
            Verdict::Partial { missing } => {
                assert_eq!(missing.len(), 1);
                assert_eq!(missing[0].gate, GateKind::CX);
            }
            v => panic!("{v:?}"),
        }
    }

    #[test]
    fn finding_json_shape() {
        let f = WatermarkFinding {
            gates: vec![
                FoundGate { seq: 5, name: "cx".into(), params: vec![], qubits: vec![1, 0] },
                FoundGate { seq: 6, name: "rz".into(), params: vec![FRAC_PI_4], qubits: vec![0] },
            ],
            base_surplus: vec![],
            normalization: Normalization::swaps_only(),
        };
        let v = serde_json::to_value(&f).unwrap();
        assert_eq!(v["gates"][0], serde_json::json!({"seq": 5, "name": "cx", "qubits": [1, 0]}));
        assert_eq!(v["gates"][1]["params"][0], FRAC_PI_4);
        let back: WatermarkFinding = serde_json::from_value(v).unwrap();
        assert_eq!(back, f);
        let v = serde_json::to_value(Verdict::Partial { missing: vec![] }).unwrap();
        assert_eq!(v["status"], "partial");
    }
}
