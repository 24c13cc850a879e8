//! Watermark embedding: a rotation on an ancilla entangled by a CNOT, a
//! random gate block followed by its inverse behind barriers, or both.

mod ppa;

pub use ppa::{binomial, ppa, watermark_count, PpaConfig};

use std::f64::consts::PI;

use rand::seq::IndexedRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::circuit::{inverse_sequence, Circuit, Gate, Instruction};
use crate::error::{Error, Result};
use crate::gate::{GateKind, SINGLE_QUBIT_POOL, TWO_QUBIT_POOL};
use crate::seed;
use crate::simulate::measured_qubits;
use crate::transpile::{decompose_to_basis, optimize, BasisSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    Rotation,
    Random,
    Combined,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecordEntry {
    pub gate: GateKind,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub params: Vec<f64>,
    pub qubits: Vec<usize>,
}

impl RecordEntry {
    fn from_gate(g: &Gate) -> Self {
        Self {
            gate: g.kind,
            params: g.params.clone(),
            qubits: g.qubits.clone(),
        }
    }

    pub fn to_instruction(&self) -> Instruction {
        Instruction::gate(self.gate, self.params.clone(), self.qubits.clone())
    }
}

/// The owner's private description of an embedded watermark.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WatermarkRecord {
    pub scheme: Scheme,
    pub entries: Vec<RecordEntry>,
    pub insertion_index: usize,
    pub ancilla_added: Option<usize>,
    pub barriers: Vec<usize>,
    pub seed: Option<u64>,
    /// Length of the random block; the last `2 * block_len` entries are the
    /// block followed by its inverse.
    #[serde(default, skip_serializing_if = "is_zero")]
    pub block_len: usize,
    /// Set when a watermark gate flips a functional qubit; XOR measured
    /// outcomes with this mask (in measured-qubit order) to decode.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unflip_mask: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub created: Option<String>,
}

fn is_zero(v: &usize) -> bool {
    *v == 0
}

impl WatermarkRecord {
    /// Random block `B` and its inverse, when present.
    pub fn random_block(&self) -> Option<(&[RecordEntry], &[RecordEntry])> {
        if self.block_len == 0 {
            return None;
        }
        let start = self.entries.len() - 2 * self.block_len;
        let (b, inv) = self.entries[start..].split_at(self.block_len);
        Some((b, inv))
    }

    pub fn touches_functional_qubit(&self) -> bool {
        self.unflip_mask.is_some()
    }
}

/// Which one-qubit rotation carries the phase.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RotationAxis {
    X,
    #[default]
    Y,
}

impl RotationAxis {
    fn kind(self) -> GateKind {
        match self {
            RotationAxis::X => GateKind::RX,
            RotationAxis::Y => GateKind::RY,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RotationSpec {
    /// Qubits whose output is not part of the circuit's function. When
    /// empty, a fresh ancilla is appended and becomes the target.
    pub ancillas: Vec<usize>,
    pub target: Option<usize>,
    pub theta: f64,
    pub axis: RotationAxis,
    /// `(control, target)` of the entangling CNOT.
    pub cnot: Option<(usize, usize)>,
}

impl RotationSpec {
    pub fn new(ancillas: Vec<usize>, target: Option<usize>, theta: f64, cnot: Option<(usize, usize)>) -> Self {
        Self {
            ancillas,
            target,
            theta,
            axis: RotationAxis::Y,
            cnot,
        }
    }
}

/// Inserts the rotation (and CNOT) just before the terminal measurements.
pub fn embed_rotation(circuit: &Circuit, spec: &RotationSpec) -> Result<(Circuit, WatermarkRecord)> {
    let mut out = circuit.clone();
    let mut ancillas = spec.ancillas.clone();
    for &a in &ancillas {
        if a >= circuit.num_qubits() {
            return Err(Error::Watermark(format!("ancilla {a} is not in the circuit")));
        }
    }
    let mut ancilla_added = None;
    if ancillas.is_empty() {
        let a = out.add_qubit();
        ancillas.push(a);
        ancilla_added = Some(a);
    }
    let target = spec.target.unwrap_or(ancillas[0]);
    if !ancillas.contains(&target) {
        return Err(Error::Watermark(format!(
            "refusing to rotate qubit {target}: it is not an ancilla and would corrupt the output"
        )));
    }
    let mut gates = vec![Instruction::gate(spec.axis.kind(), [spec.theta], [target])];
    if let Some((c, t)) = spec.cnot {
        if c == t {
            return Err(Error::Watermark("cnot control and target coincide".into()));
        }
        if !ancillas.contains(&t) {
            return Err(Error::Watermark(format!("cnot target {t} is not an ancilla")));
        }
        let control_ok = if ancilla_added.is_some() {
            c < out.num_qubits()
        } else {
            ancillas.contains(&c)
        };
        if !control_ok {
            return Err(Error::Watermark(format!("cnot control {c} is not allowed")));
        }
        gates.push(Instruction::cx(c, t));
    }
    let at = out.output_end();
    for (k, g) in gates.iter().enumerate() {
        out.insert(at + k, g.clone())?;
    }
    if let Some(a) = ancilla_added {
        if circuit.has_measurements() {
            let c = out.add_clbit();
            out.push(Instruction::measure(a, c))?;
        }
    }
    let record = WatermarkRecord {
        scheme: Scheme::Rotation,
        entries: gates.iter().filter_map(Instruction::as_gate).map(RecordEntry::from_gate).collect(),
        insertion_index: at,
        ancilla_added,
        barriers: Vec::new(),
        seed: None,
        block_len: 0,
        unflip_mask: None,
        created: None,
    };
    Ok((out, record))
}

/// Rotation on a functional qubit. `RX(pi)` flips that qubit's measured bit,
/// so the record carries the mask that undoes it.
pub fn embed_functional_flip(circuit: &Circuit, qubit: usize) -> Result<(Circuit, WatermarkRecord)> {
    if qubit >= circuit.num_qubits() {
        return Err(Error::Watermark(format!("qubit {qubit} is not in the circuit")));
    }
    let mut out = circuit.clone();
    let at = out.output_end();
    let g = Instruction::gate(GateKind::RX, [PI], [qubit]);
    out.insert(at, g.clone())?;
    let measured = measured_qubits(&out);
    let Some(pos) = measured.iter().position(|&q| q == qubit) else {
        return Err(Error::Watermark(format!("qubit {qubit} is never measured")));
    };
    let width = measured.len();
    let mask: String = (0..width).map(|i| if width - 1 - i == pos { '1' } else { '0' }).collect();
    let record = WatermarkRecord {
        scheme: Scheme::Rotation,
        entries: vec![RecordEntry::from_gate(g.as_gate().expect("gate"))],
        insertion_index: at,
        ancilla_added: None,
        barriers: Vec::new(),
        seed: None,
        block_len: 0,
        unflip_mask: Some(mask),
        created: None,
    };
    Ok((out, record))
}

#[derive(Debug, Clone, PartialEq)]
pub struct RandomSpec {
    /// Explicit block; drawn from the seed when `None`.
    pub block: Option<Vec<Instruction>>,
    pub k: usize,
    /// Defaults to the middle of the circuit.
    pub insertion_index: Option<usize>,
    pub seed: Option<u64>,
    /// Also fence the block off from the gates before it.
    pub leading_barrier: bool,
}

impl RandomSpec {
    pub fn drawn(k: usize, seed: u64) -> Self {
        Self {
            block: None,
            k,
            insertion_index: None,
            seed: Some(seed),
            leading_barrier: true,
        }
    }

    pub fn fixed(block: Vec<Instruction>) -> Self {
        Self {
            block: Some(block),
            k: 0,
            insertion_index: None,
            seed: None,
            leading_barrier: true,
        }
    }
}

/// Kinds a random block may use. SWAP would be normalized away during
/// extraction and iSWAP has no single-gate inverse.
pub fn random_pool(num_qubits: usize) -> Vec<GateKind> {
    let mut pool = SINGLE_QUBIT_POOL.to_vec();
    if num_qubits >= 2 {
        pool.extend(TWO_QUBIT_POOL.iter().filter(|k| !matches!(k, GateKind::Swap | GateKind::ISwap)));
    }
    pool
}

const MAX_DRAWS: usize = 1000;

/// Draws `k` gates with uniform kinds, placements, and angles on the pi/6
/// grid, rejecting blocks the peephole pass would shorten.
pub fn draw_block(num_qubits: usize, k: usize, seed: u64) -> Result<Vec<Instruction>> {
    if num_qubits == 0 || k == 0 {
        return Err(Error::Watermark("random block needs qubits and k >= 1".into()));
    }
    let pool = random_pool(num_qubits);
    let mut rng = seed::rng(seed, "random-block", 0);
    for _ in 0..MAX_DRAWS {
        let block: Vec<Instruction> = (0..k)
            .map(|_| {
                let kind = *pool.choose(&mut rng).expect("non-empty pool");
                let params: Vec<f64> = (0..kind.param_arity())
                    .map(|_| f64::from(rng.random_range(1..12u8)) * PI / 6.0)
                    .collect();
                let a = rng.random_range(0..num_qubits);
                let qubits = if kind.qubit_arity() == 2 {
                    let mut b = rng.random_range(0..num_qubits - 1);
                    if b >= a {
                        b += 1;
                    }
                    vec![a, b]
                } else {
                    vec![a]
                };
                Instruction::gate(kind, params, qubits)
            })
            .collect();
        if is_stable(num_qubits, &block)? {
            return Ok(block);
        }
    }
    Err(Error::Watermark(format!("no stable block of {k} gates found")))
}

/// True when neither the block, its inverse, nor their lowerings to the
/// `ibm` basis lose gates under the peephole pass.
pub fn is_stable(num_qubits: usize, block: &[Instruction]) -> Result<bool> {
    for seq in [block.to_vec(), inverse_sequence(block)?] {
        let c = Circuit::from_instructions(num_qubits, 0, seq)?;
        if optimize(&c).len() != c.len() {
            return Ok(false);
        }
        let lowered = decompose_to_basis(&c, &BasisSet::ibm())?;
        if optimize(&lowered).len() != lowered.len() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Inserts `[barrier,] B, barrier, B^-1, barrier` with each barrier spanning
/// the qubits `B` touches.
pub fn embed_random(circuit: &Circuit, spec: &RandomSpec) -> Result<(Circuit, WatermarkRecord)> {
    let block = match &spec.block {
        Some(b) => b.clone(),
        None => draw_block(circuit.num_qubits(), spec.k, spec.seed.unwrap_or(0))?,
    };
    if block.is_empty() {
        return Err(Error::Watermark("empty block".into()));
    }
    if block.iter().any(|i| !i.is_gate()) {
        return Err(Error::Watermark("block may contain gates only".into()));
    }
    for inst in &block {
        circuit.validate_instruction(inst)?;
    }
    if !is_stable(circuit.num_qubits(), &block)? {
        return Err(Error::Watermark("block would be shortened by peephole optimization".into()));
    }
    let inverse = inverse_sequence(&block)?;
    let mut span: Vec<usize> = block.iter().flat_map(|i| i.qubits().to_vec()).collect();
    span.sort_unstable();
    span.dedup();

    let end = circuit.output_end();
    let at = spec.insertion_index.unwrap_or(circuit.len() / 2).min(end);
    let mut insert = Vec::new();
    let mut barriers = Vec::new();
    if spec.leading_barrier {
        barriers.push(at + insert.len());
        insert.push(Instruction::barrier(span.clone()));
    }
    insert.extend(block.iter().cloned());
    barriers.push(at + insert.len());
    insert.push(Instruction::barrier(span.clone()));
    insert.extend(inverse.iter().cloned());
    barriers.push(at + insert.len());
    insert.push(Instruction::barrier(span));

    let mut out = Circuit::new(circuit.num_qubits(), circuit.num_clbits());
    out.label = circuit.label.clone();
    let (head, tail) = circuit.instructions().split_at(at);
    out.extend(head.iter().cloned().chain(insert).chain(tail.iter().cloned()))?;

    let entries = block
        .iter()
        .chain(&inverse)
        .filter_map(Instruction::as_gate)
        .map(RecordEntry::from_gate)
        .collect();
    let record = WatermarkRecord {
        scheme: Scheme::Random,
        entries,
        insertion_index: at,
        ancilla_added: None,
        barriers,
        seed: if spec.block.is_none() { spec.seed.or(Some(0)) } else { spec.seed },
        block_len: block.len(),
        unflip_mask: None,
        created: None,
    };
    Ok((out, record))
}

/// Rotation first, then the random block in the middle of the result.
pub fn embed_combined(circuit: &Circuit, rotation: &RotationSpec, random: &RandomSpec) -> Result<(Circuit, WatermarkRecord)> {
    let (rotated, rot) = embed_rotation(circuit, rotation)?;
    let (out, rnd) = embed_random(&rotated, random)?;
    let mut entries = rot.entries;
    entries.extend(rnd.entries);
    let record = WatermarkRecord {
        scheme: Scheme::Combined,
        entries,
        insertion_index: rnd.insertion_index,
        ancilla_added: rot.ancilla_added,
        barriers: rnd.barriers,
        seed: rnd.seed,
        block_len: rnd.block_len,
        unflip_mask: None,
        created: None,
    };
    Ok((out, record))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::Instruction as I;
    use crate::simulate::exact_distribution;
    use crate::unitary::{unitary_of, unitary_of_gates, UnitaryMatrix};

    fn host() -> Circuit {
        Circuit::from_instructions(3, 0, [I::h(0), I::cx(0, 2), I::x(1), I::cx(1, 2)]).unwrap()
    }

    #[test]
    fn pauli_and_cnot_block_layout() {
        let block = vec![I::x(0), I::cx(2, 1)];
        let (c, rec) = embed_random(&Circuit::new(3, 0), &RandomSpec::fixed(block)).unwrap();
        let b = I::barrier([0, 1, 2]);
        assert_eq!(
            c.instructions(),
            &[b.clone(), I::x(0), I::cx(2, 1), b.clone(), I::cx(2, 1), I::x(0), b]
        );
        assert_eq!(rec.barriers, vec![0, 3, 6]);
        assert_eq!(rec.block_len, 2);
        let no_lead = RandomSpec {
            leading_barrier: false,
            ..RandomSpec::fixed(vec![I::x(0), I::cx(2, 1)])
        };
        let (c, _) = embed_random(&Circuit::new(3, 0), &no_lead).unwrap();
        assert_eq!(c.len(), 6);
        assert!(matches!(c.instructions()[2], Instruction::Barrier { .. }));
    }

    #[test]
    fn identity_block_on_empty_host() {
        let (c, _) = embed_random(&Circuit::new(4, 0), &RandomSpec::drawn(3, 9)).unwrap();
        assert!(unitary_of(&c).unwrap().equiv_up_to_phase(&UnitaryMatrix::identity(16), 1e-9));
    }

    #[test]
    fn seeded_block_preserves_host_unitary() {
        let h = host();
        for s in 0..20 {
            let (c, rec) = embed_random(&h, &RandomSpec::drawn(3, s)).unwrap();
            assert!(unitary_of(&c).unwrap().equiv_up_to_phase(&unitary_of(&h).unwrap(), 1e-9), "seed {s}");
            let (b, inv) = rec.random_block().unwrap();
            let mut all: Vec<Instruction> = b.iter().map(RecordEntry::to_instruction).collect();
            all.extend(inv.iter().map(RecordEntry::to_instruction));
            assert!(unitary_of_gates(3, &all).equiv_up_to_phase(&UnitaryMatrix::identity(8), 1e-10));
        }
    }

    #[test]
    fn drawn_blocks_are_deterministic_and_stable() {
        assert_eq!(draw_block(4, 3, 5).unwrap(), draw_block(4, 3, 5).unwrap());
        for s in 0..50 {
            let b = draw_block(4, 4, s).unwrap();
            assert!(is_stable(4, &b).unwrap());
            assert!(b.iter().all(|i| !matches!(i.as_gate().unwrap().kind, GateKind::Swap | GateKind::ISwap)));
        }
    }

    #[test]
    fn unstable_block_rejected() {
        let err = embed_random(&host(), &RandomSpec::fixed(vec![I::x(0), I::x(0)])).unwrap_err();
        assert!(matches!(err, Error::Watermark(_)));
        let err = embed_random(&host(), &RandomSpec::fixed(vec![I::barrier([0])])).unwrap_err();
        assert!(matches!(err, Error::Watermark(_)));
        // stable forwards, but the inverse lowers to ... CX, CX on the same pair
        let crz = I::gate(GateKind::CRZ, [1.2], [1, 0]);
        let block = vec![I::cx(1, 0), crz];
        let fwd = Circuit::from_instructions(3, 0, block.clone()).unwrap();
        assert_eq!(optimize(&decompose_to_basis(&fwd, &BasisSet::ibm()).unwrap()).len(), 5);
        assert!(!is_stable(3, &block).unwrap());
    }

    #[test]
    fn rotation_on_ancilla_flips_it() {
        // q0, q1 ancillas; q2 functional
        let h = host();
        let spec = RotationSpec::new(vec![0, 1], Some(1), PI, Some((0, 1)));
        let (c, rec) = embed_rotation(&h, &spec).unwrap();
        assert_eq!(rec.entries.len(), 2);
        assert_eq!(rec.insertion_index, 4);
        for input in 0..8 {
            let a = exact_distribution(&h, input).unwrap().marginalize(&[2]).unwrap();
            let b = exact_distribution(&c, input).unwrap().marginalize(&[2]).unwrap();
            for k in ["0", "1"] {
                assert!((a.probability(k) - b.probability(k)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn functional_target_refused() {
        let spec = RotationSpec::new(vec![0, 1], Some(2), PI, None);
        assert!(matches!(embed_rotation(&host(), &spec), Err(Error::Watermark(_))));
        let spec = RotationSpec::new(vec![0, 1], Some(1), PI, Some((2, 1)));
        assert!(matches!(embed_rotation(&host(), &spec), Err(Error::Watermark(_))));
    }

    #[test]
    fn fresh_ancilla_gets_measured() {
        let mut h = Circuit::new(3, 3);
        h.extend(host().instructions().iter().cloned()).unwrap();
        for q in 0..3 {
            h.push(I::measure(q, q)).unwrap();
        }
        let spec = RotationSpec::new(vec![], None, PI, Some((2, 3)));
        let (c, rec) = embed_rotation(&h, &spec).unwrap();
        assert_eq!(rec.ancilla_added, Some(3));
        assert_eq!(c.num_qubits(), 4);
        assert_eq!(c.num_clbits(), 4);
        assert_eq!(c.instructions().last(), Some(&I::measure(3, 3)));
        assert_eq!(c.instructions()[4], I::ry(PI, 3));
        assert_eq!(c.instructions()[5], I::cx(2, 3));
        let bad = RotationSpec::new(vec![], Some(1), PI, None);
        assert!(embed_rotation(&h, &bad).is_err());
    }

    #[test]
    fn zero_theta_changes_nothing_but_cnot() {
        let h = host();
        let (c, _) = embed_rotation(&h, &RotationSpec::new(vec![], None, 0.0, None)).unwrap();
        let a = exact_distribution(&h, 0).unwrap();
        let b = exact_distribution(&c, 0).unwrap().marginalize(&[0, 1, 2]).unwrap();
        assert_eq!(a.probabilities().len(), b.probabilities().len());
        for (k, p) in a.probabilities() {
            assert!((b.probability(&k) - p).abs() < 1e-12);
        }
    }

    #[test]
    fn combined_has_both_parts() {
        let h = host();
        let (c, rec) = embed_combined(
            &h,
            &RotationSpec::new(vec![], None, PI, Some((2, 3))),
            &RandomSpec::drawn(2, 4),
        )
        .unwrap();
        assert_eq!(rec.scheme, Scheme::Combined);
        assert_eq!(rec.entries.len(), 2 + 4);
        assert_eq!(rec.ancilla_added, Some(3));
        assert!(c.num_qubits() == 4);
    }

    #[test]
    fn functional_flip_mask() {
        let mut h = Circuit::new(3, 3);
        h.extend([I::h(0), I::measure(0, 0), I::measure(1, 1), I::measure(2, 2)]).unwrap();
        let (c, rec) = embed_functional_flip(&h, 1).unwrap();
        assert_eq!(rec.unflip_mask.as_deref(), Some("010"));
        let d = exact_distribution(&c, 0).unwrap().flip_bits("010").unwrap();
        let base = exact_distribution(&h, 0).unwrap();
        for (k, p) in base.probabilities() {
            assert!((d.probability(&k) - p).abs() < 1e-12);
        }
    }

    #[test]
    fn record_json_shape() {
        let (_, rec) = embed_rotation(&host(), &RotationSpec::new(vec![0, 1], Some(1), PI, Some((0, 1)))).unwrap();
        let s = serde_json::to_string(&rec).unwrap();
        assert_eq!(
            s,
            r#"{"scheme":"rotation","entries":[{"gate":"ry","params":[3.141592653589793],"qubits":[1]},{"gate":"cx","qubits":[0,1]}],"insertion_index":4,"ancilla_added":null,"barriers":[],"seed":null}"#
        );
        let back: WatermarkRecord = serde_json::from_str(&s).unwrap();
        assert_eq!(back, rec);
    }
}
