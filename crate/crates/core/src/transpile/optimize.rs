use crate::circuit::{angle_distance, normalize_angle, Circuit, Gate, Instruction};
use crate::gate::{inverse_kind_params, GateKind};

/// Sweeps before giving up on reaching a fixpoint.
pub const MAX_SWEEPS: usize = 100;

const ANGLE_TOL: f64 = 1e-12;

/// Peephole pass run to fixpoint: cancels adjacent inverse pairs on the same
/// qubit tuple and merges adjacent same-axis rotations. Barriers and
/// measurements break adjacency, so nothing crosses them.
pub fn optimize(circuit: &Circuit) -> Circuit {
    let mut insts = circuit.instructions().to_vec();
    for _ in 0..MAX_SWEEPS {
        let (next, changed) = sweep(circuit.num_qubits(), insts);
        insts = next;
        if !changed {
            break;
        }
    }
    let mut out = Circuit::new(circuit.num_qubits(), circuit.num_clbits());
    out.label = circuit.label.clone();
    out.extend(insts).expect("optimize keeps instructions valid");
    out
}

struct Slot {
    inst: Option<Instruction>,
    /// Previous slot on each of the instruction's qubits.
    prev: Vec<Option<usize>>,
}

fn sweep(num_qubits: usize, insts: Vec<Instruction>) -> (Vec<Instruction>, bool) {
    let mut slots: Vec<Slot> = Vec::with_capacity(insts.len());
    let mut last: Vec<Option<usize>> = vec![None; num_qubits];
    let mut changed = false;
    for inst in insts {
        if let Instruction::Gate(g) = &inst {
            if let Some(idx) = partner(&slots, &last, g) {
                let Some(Instruction::Gate(prev)) = &slots[idx].inst else { unreachable!() };
                match combine(prev, g) {
                    Combine::Cancel => {
                        for (k, &q) in g.qubits.iter().enumerate() {
                            last[q] = slots[idx].prev[k];
                        }
                        slots[idx].inst = None;
                        changed = true;
                        continue;
                    }
                    Combine::Merge(angle) => {
                        let Some(Instruction::Gate(prev)) = &mut slots[idx].inst else { unreachable!() };
                        prev.params[0] = angle;
                        changed = true;
                        continue;
                    }
                    Combine::Keep => {}
                }
            }
        }
        let prev = inst.qubits().iter().map(|&q| last[q]).collect();
        for &q in inst.qubits() {
            last[q] = Some(slots.len());
        }
        slots.push(Slot { inst: Some(inst), prev });
    }
    (slots.into_iter().filter_map(|s| s.inst).collect(), changed)
}

/// Slot holding the gate immediately before `g` on all of its qubits, when
/// that gate acts on exactly the same qubit tuple.
fn partner(slots: &[Slot], last: &[Option<usize>], g: &Gate) -> Option<usize> {
    let idx = last[g.qubits[0]]?;
    if g.qubits.iter().any(|&q| last[q] != Some(idx)) {
        return None;
    }
    match &slots[idx].inst {
        Some(Instruction::Gate(p)) if p.qubits == g.qubits => Some(idx),
        _ => None,
    }
}

enum Combine {
    Cancel,
    Merge(f64),
    Keep,
}

fn combine(prev: &Gate, g: &Gate) -> Combine {
    if is_inverse_pair(prev, g) {
        return Combine::Cancel;
    }
    let same_axis = prev.kind == g.kind && (g.kind.rotation_axis().is_some() || g.kind == GateKind::U1);
    if same_axis {
        let sum = normalize_angle(prev.params[0] + g.params[0]);
        if angle_distance(sum, 0.0) <= ANGLE_TOL {
            return Combine::Cancel;
        }
        return Combine::Merge(sum);
    }
    Combine::Keep
}

fn is_inverse_pair(prev: &Gate, g: &Gate) -> bool {
    let Some((kind, params)) = inverse_kind_params(prev.kind, &prev.params) else {
        return false;
    };
    kind == g.kind
        && params
            .iter()
            .zip(&g.params)
            .all(|(a, b)| angle_distance(*a, *b) <= ANGLE_TOL)
}
