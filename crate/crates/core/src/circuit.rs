//! Circuit intermediate representation and structural metrics.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gate::{inverse_kind_params, GateKind};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Gate {
    pub kind: GateKind,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub params: Vec<f64>,
    /// For controlled kinds: `[control, target]`.
    pub qubits: Vec<usize>,
    /// Free-form name given by whoever built the gate, if any.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

impl Gate {
    pub fn new(kind: GateKind, params: impl Into<Vec<f64>>, qubits: impl Into<Vec<usize>>) -> Self {
        Self {
            kind,
            params: params.into(),
            qubits: qubits.into(),
            label: None,
        }
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.kind.check_params(&self.params)?;
        if self.qubits.len() != self.kind.qubit_arity() {
            return Err(Error::QubitArity {
                kind: self.kind,
                expected: self.kind.qubit_arity(),
                got: self.qubits.len(),
            });
        }
        if self.qubits.len() == 2 && self.qubits[0] == self.qubits[1] {
            return Err(Error::DuplicateQubit(self.qubits[0]));
        }
        Ok(())
    }

    /// Structural equality with parameters compared modulo 2pi within `tol`.
    pub fn approx_eq(&self, other: &Gate, tol: f64) -> bool {
        self.kind == other.kind
            && self.qubits == other.qubits
            && self.params.len() == other.params.len()
            && self
                .params
                .iter()
                .zip(&other.params)
                .all(|(a, b)| angle_distance(*a, *b) <= tol)
    }
}

/// Distance between two angles on the circle.
pub fn angle_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}

/// Maps an angle into `(-pi, pi]`.
pub fn normalize_angle(a: f64) -> f64 {
    let r = a.rem_euclid(TAU);
    if r > std::f64::consts::PI {
        r - TAU
    } else {
        r
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "lowercase")]
pub enum Instruction {
    Gate(Gate),
    Barrier { qubits: Vec<usize> },
    Measure { qubit: usize, clbit: usize },
}

impl Instruction {
    pub fn gate(kind: GateKind, params: impl Into<Vec<f64>>, qubits: impl Into<Vec<usize>>) -> Self {
        Instruction::Gate(Gate::new(kind, params, qubits))
    }

    pub fn barrier(qubits: impl Into<Vec<usize>>) -> Self {
        Instruction::Barrier {
            qubits: qubits.into(),
        }
    }

    pub fn measure(qubit: usize, clbit: usize) -> Self {
        Instruction::Measure { qubit, clbit }
    }

    pub fn x(q: usize) -> Self {
        Self::gate(GateKind::X, [], [q])
    }

    pub fn h(q: usize) -> Self {
        Self::gate(GateKind::H, [], [q])
    }

    pub fn ry(theta: f64, q: usize) -> Self {
        Self::gate(GateKind::RY, [theta], [q])
    }

    pub fn rz(theta: f64, q: usize) -> Self {
        Self::gate(GateKind::RZ, [theta], [q])
    }

    pub fn cx(control: usize, target: usize) -> Self {
        Self::gate(GateKind::CX, [], [control, target])
    }

    pub fn swap(a: usize, b: usize) -> Self {
        Self::gate(GateKind::Swap, [], [a, b])
    }

    pub fn qubits(&self) -> &[usize] {
        match self {
            Instruction::Gate(g) => &g.qubits,
            Instruction::Barrier { qubits } => qubits,
            Instruction::Measure { qubit, .. } => std::slice::from_ref(qubit),
        }
    }

    pub fn qubits_mut(&mut self) -> &mut [usize] {
        match self {
            Instruction::Gate(g) => &mut g.qubits,
            Instruction::Barrier { qubits } => qubits,
            Instruction::Measure { qubit, .. } => std::slice::from_mut(qubit),
        }
    }

    pub fn as_gate(&self) -> Option<&Gate> {
        match self {
            Instruction::Gate(g) => Some(g),
            _ => None,
        }
    }

    pub fn is_gate(&self) -> bool {
        matches!(self, Instruction::Gate(_))
    }

    pub fn is_two_qubit_gate(&self) -> bool {
        matches!(self, Instruction::Gate(g) if g.kind.qubit_arity() == 2)
    }

    /// Same instruction with every qubit index passed through `map`.
    pub fn remapped(&self, map: impl Fn(usize) -> usize) -> Self {
        let mut out = self.clone();
        for q in out.qubits_mut() {
            *q = map(*q);
        }
        out
    }

    pub fn approx_eq(&self, other: &Instruction, tol: f64) -> bool {
        match (self, other) {
            (Instruction::Gate(a), Instruction::Gate(b)) => a.approx_eq(b, tol),
            _ => self == other,
        }
    }
}

/// Inverse of a single gate instruction. Self-inverse kinds return themselves;
/// rotations negate their angle; S, T and SX map to their daggered kinds.
pub fn inverse_of(inst: &Instruction) -> Result<Instruction> {
    let Instruction::Gate(g) = inst else {
        let what = match inst {
            Instruction::Barrier { .. } => "barrier",
            _ => "measure",
        };
        return Err(Error::NotInvertible(what.into()));
    };
    g.validate()?;
    let (kind, params) = inverse_kind_params(g.kind, &g.params)
        .ok_or_else(|| Error::NotInvertible(format!("{} (no single-gate inverse)", g.kind)))?;
    Ok(Instruction::Gate(Gate {
        kind,
        params,
        qubits: g.qubits.clone(),
        label: None,
    }))
}

/// Reversed list of inverses; the unitary of `seq ++ inverse_sequence(seq)` is identity.
pub fn inverse_sequence(seq: &[Instruction]) -> Result<Vec<Instruction>> {
    seq.iter().rev().map(inverse_of).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Circuit {
    num_qubits: usize,
    num_clbits: usize,
    instructions: Vec<Instruction>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

impl Circuit {
    pub fn new(num_qubits: usize, num_clbits: usize) -> Self {
        Self {
            num_qubits,
            num_clbits,
            instructions: Vec::new(),
            label: None,
        }
    }

    pub fn from_instructions(
        num_qubits: usize,
        num_clbits: usize,
        instructions: impl IntoIterator<Item = Instruction>,
    ) -> Result<Self> {
        let mut c = Self::new(num_qubits, num_clbits);
        for inst in instructions {
            c.push(inst)?;
        }
        Ok(c)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn num_clbits(&self) -> usize {
        self.num_clbits
    }

    pub fn instructions(&self) -> &[Instruction] {
        &self.instructions
    }

    pub fn len(&self) -> usize {
        self.instructions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instructions.is_empty()
    }

    pub fn into_instructions(self) -> Vec<Instruction> {
        self.instructions
    }

    pub fn validate_instruction(&self, inst: &Instruction) -> Result<()> {
        match inst {
            Instruction::Gate(g) => g.validate()?,
            Instruction::Barrier { qubits } => {
                if qubits.is_empty() {
                    return Err(Error::EmptyBarrier);
                }
                for (i, q) in qubits.iter().enumerate() {
                    if qubits[..i].contains(q) {
                        return Err(Error::DuplicateQubit(*q));
                    }
                }
            }
            Instruction::Measure { clbit, .. } => {
                if *clbit >= self.num_clbits {
                    return Err(Error::ClbitOutOfRange {
                        clbit: *clbit,
                        num_clbits: self.num_clbits,
                    });
                }
            }
        }
        for &q in inst.qubits() {
            if q >= self.num_qubits {
                return Err(Error::QubitOutOfRange {
                    qubit: q,
                    num_qubits: self.num_qubits,
                });
            }
        }
        Ok(())
    }

    pub fn push(&mut self, inst: Instruction) -> Result<()> {
        self.validate_instruction(&inst)?;
        self.instructions.push(inst);
        Ok(())
    }

    pub fn insert(&mut self, index: usize, inst: Instruction) -> Result<()> {
        self.validate_instruction(&inst)?;
        self.instructions.insert(index.min(self.instructions.len()), inst);
        Ok(())
    }

    pub fn extend(&mut self, insts: impl IntoIterator<Item = Instruction>) -> Result<()> {
        for inst in insts {
            self.push(inst)?;
        }
        Ok(())
    }

    /// Adds a fresh qubit and returns its index.
    pub fn add_qubit(&mut self) -> usize {
        self.num_qubits += 1;
        self.num_qubits - 1
    }

    pub fn add_clbit(&mut self) -> usize {
        self.num_clbits += 1;
        self.num_clbits - 1
    }

    /// Grows the register to at least `n` qubits.
    pub fn widen(&mut self, n: usize) {
        self.num_qubits = self.num_qubits.max(n);
    }

    /// Index where the trailing block of measurements (and barriers between
    /// them) starts; `len()` when the circuit does not end in measurements.
    pub fn output_end(&self) -> usize {
        let mut end = self.instructions.len();
        let mut saw_measure = false;
        while end > 0 {
            match &self.instructions[end - 1] {
                Instruction::Measure { .. } => saw_measure = true,
                Instruction::Barrier { .. } if saw_measure => {}
                _ => break,
            }
            end -= 1;
        }
        if saw_measure {
            end
        } else {
            self.instructions.len()
        }
    }

    pub fn has_measurements(&self) -> bool {
        self.instructions.iter().any(|i| matches!(i, Instruction::Measure { .. }))
    }

    /// Gate instructions only.
    pub fn gates(&self) -> impl Iterator<Item = &Gate> {
        self.instructions.iter().filter_map(Instruction::as_gate)
    }

    /// Longest chain of gates over shared qubits. Barriers and measurements
    /// do not count and do not synchronize qubits.
    pub fn depth(&self) -> usize {
        let mut level = vec![0usize; self.num_qubits];
        let mut depth = 0;
        for g in self.gates() {
            let next = g.qubits.iter().map(|&q| level[q]).max().unwrap_or(0) + 1;
            for &q in &g.qubits {
                level[q] = next;
            }
            depth = depth.max(next);
        }
        depth
    }

    pub fn two_qubit_gate_count(&self) -> usize {
        self.gates().filter(|g| g.kind.qubit_arity() == 2).count()
    }

    pub fn approx_eq(&self, other: &Circuit, tol: f64) -> bool {
        self.num_qubits == other.num_qubits
            && self.num_clbits == other.num_clbits
            && self.instructions.len() == other.instructions.len()
            && self
                .instructions
                .iter()
                .zip(&other.instructions)
                .all(|(a, b)| a.approx_eq(b, tol))
    }
}
