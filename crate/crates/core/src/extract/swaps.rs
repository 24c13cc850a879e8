use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::circuit::{angle_distance, Circuit, Gate, Instruction};
use crate::gate::GateKind;
use crate::transpile::Layout;
use crate::unitary::{unitary_of_gates, UnitaryMatrix};

/// Longest window examined per start instruction.
pub const MAX_WINDOW: usize = 4;

const UNITARY_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SwapKind {
    /// A SWAP gate.
    Direct,
    /// A gate labelled with a name containing "swap".
    Named,
    /// A window whose product is SWAP up to global phase.
    UnitaryEquivalent,
    /// `CX(a,b) CX(b,a) CX(a,b)`.
    ThreeCnot,
    /// iSWAP followed by S gates on the pair. Not SWAP-equivalent.
    IswapS,
    /// RXX, RYY and RZZ at pi/2 in any order.
    RxxRyyRzz,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SwapMatch {
    pub kind: SwapKind,
    /// Matched instruction indices, ascending. Anything between them acts on
    /// other qubits.
    pub indices: Vec<usize>,
    pub qubit_pair: (usize, usize),
    /// Whether the span really implements SWAP.
    pub exact: bool,
}

impl SwapMatch {
    /// Half-open index range covering the match.
    pub fn span(&self) -> std::ops::Range<usize> {
        self.indices[0]..self.indices[self.indices.len() - 1] + 1
    }
}

/// For each instruction and each of its qubits, the next instruction on
/// that qubit.
fn next_on_qubit(circuit: &Circuit) -> Vec<Vec<Option<usize>>> {
    let insts = circuit.instructions();
    let mut next = vec![Vec::new(); insts.len()];
    let mut seen: Vec<Option<usize>> = vec![None; circuit.num_qubits()];
    for i in (0..insts.len()).rev() {
        next[i] = insts[i].qubits().iter().map(|&q| seen[q]).collect();
        for &q in insts[i].qubits() {
            seen[q] = Some(i);
        }
    }
    next
}

/// Scans left to right; at each unclaimed two-qubit gate, grows a window of
/// up to [`MAX_WINDOW`] gates confined to that pair and claims its longest
/// SWAP-like prefix.
pub fn detect_swaps(circuit: &Circuit) -> Vec<SwapMatch> {
    let insts = circuit.instructions();
    let next = next_on_qubit(circuit);
    let mut claimed = vec![false; insts.len()];
    let mut found = Vec::new();
    for start in 0..insts.len() {
        if claimed[start] || !insts[start].is_two_qubit_gate() {
            continue;
        }
        let (a, b) = (insts[start].qubits()[0], insts[start].qubits()[1]);
        let window = grow_window(insts, &next, &claimed, start, a, b);
        for len in (1..=window.len()).rev() {
            let idx = &window[..len];
            let gates: Vec<&Gate> = idx.iter().map(|&i| insts[i].as_gate().expect("window holds gates")).collect();
            if let Some((kind, exact)) = classify(&gates, a, b) {
                for &i in idx {
                    claimed[i] = true;
                }
                found.push(SwapMatch {
                    kind,
                    indices: idx.to_vec(),
                    qubit_pair: (a, b),
                    exact,
                });
                break;
            }
        }
    }
    found
}

fn grow_window(
    insts: &[Instruction],
    next: &[Vec<Option<usize>>],
    claimed: &[bool],
    start: usize,
    a: usize,
    b: usize,
) -> Vec<usize> {
    let mut window = vec![start];
    // latest window member on each of a, b
    let mut last = [start, start];
    while window.len() < MAX_WINDOW {
        let after = |k: usize, q: usize| {
            let i = last[k];
            let pos = insts[i].qubits().iter().position(|&x| x == q)?;
            next[i][pos]
        };
        let cand = match (after(0, a), after(1, b)) {
            (Some(x), Some(y)) => x.min(y),
            (Some(x), None) | (None, Some(x)) => x,
            (None, None) => break,
        };
        let inst = &insts[cand];
        if claimed[cand] || !inst.is_gate() || inst.qubits().iter().any(|&q| q != a && q != b) {
            break;
        }
        for &q in inst.qubits() {
            last[usize::from(q == b)] = cand;
        }
        window.push(cand);
    }
    window
}

fn swap_matrix() -> UnitaryMatrix {
    GateKind::Swap.matrix(&[]).expect("swap takes no parameters")
}

fn classify(gates: &[&Gate], a: usize, b: usize) -> Option<(SwapKind, bool)> {
    if let [g] = gates {
        if g.kind == GateKind::Swap {
            return Some((SwapKind::Direct, true));
        }
        if g.label.as_deref().is_some_and(|l| l.to_ascii_lowercase().contains("swap")) {
            let exact = is_swap_up_to_phase(gates, a, b);
            return Some((SwapKind::Named, exact));
        }
        return None;
    }
    if gates.len() == 3 && is_three_cnot(gates) {
        return Some((SwapKind::ThreeCnot, true));
    }
    if gates.len() == 3 && is_rxx_ryy_rzz(gates) {
        return Some((SwapKind::RxxRyyRzz, true));
    }
    if gates[0].kind == GateKind::ISwap && gates[1..].iter().all(|g| g.kind == GateKind::S) {
        let exact = is_swap_up_to_phase(gates, a, b);
        return Some((SwapKind::IswapS, exact));
    }
    if is_swap_up_to_phase(gates, a, b) {
        return Some((SwapKind::UnitaryEquivalent, true));
    }
    None
}

fn is_three_cnot(gates: &[&Gate]) -> bool {
    let q = |g: &Gate| (g.qubits[0], g.qubits[1]);
    gates.iter().all(|g| g.kind == GateKind::CX)
        && q(gates[0]) == q(gates[2])
        && q(gates[1]) == (q(gates[0]).1, q(gates[0]).0)
}

fn is_rxx_ryy_rzz(gates: &[&Gate]) -> bool {
    let mut seen = [false; 3];
    for g in gates {
        let slot = match g.kind {
            GateKind::RXX => 0,
            GateKind::RYY => 1,
            GateKind::RZZ => 2,
            _ => return false,
        };
        if seen[slot] || angle_distance(g.params[0], FRAC_PI_2) > 1e-9 {
            return false;
        }
        seen[slot] = true;
    }
    true
}

/// Composes the gates on the local pair (`a` as local qubit 0) and compares
/// with SWAP up to global phase.
pub fn is_swap_up_to_phase(gates: &[&Gate], a: usize, b: usize) -> bool {
    let local: Vec<Instruction> = gates
        .iter()
        .map(|g| {
            let mut g = (*g).clone();
            for q in &mut g.qubits {
                debug_assert!(*q == a || *q == b);
                *q = usize::from(*q == b);
            }
            Instruction::Gate(g)
        })
        .collect();
    unitary_of_gates(2, &local).equiv_up_to_phase(&swap_matrix(), UNITARY_TOL)
}

/// Deletes every detected SWAP and relabels later instructions so no gate is
/// added. Returns the circuit and where each logical qubit ends up.
pub fn remove_swaps(circuit: &Circuit) -> (Circuit, Layout) {
    let matches = detect_swaps(circuit);
    remove_matches(circuit, &matches)
}

pub(crate) fn remove_matches(circuit: &Circuit, matches: &[SwapMatch]) -> (Circuit, Layout) {
    let insts = circuit.instructions();
    let mut role = vec![None; insts.len()];
    for (m, sm) in matches.iter().enumerate() {
        for (k, &i) in sm.indices.iter().enumerate() {
            role[i] = Some((m, k == 0));
        }
    }
    // wire -> logical label at the current point
    let mut label: Vec<usize> = (0..circuit.num_qubits()).collect();
    let mut out = Circuit::new(circuit.num_qubits(), circuit.num_clbits());
    out.label = circuit.label.clone();
    for (i, inst) in insts.iter().enumerate() {
        match role[i] {
            Some((m, true)) => {
                let (a, b) = matches[m].qubit_pair;
                label.swap(a, b);
            }
            Some((_, false)) => {}
            None => out
                .push(inst.remapped(|w| label[w]))
                .expect("relabeling is a permutation"),
        }
    }
    let mut l2p = vec![0; label.len()];
    for (w, &l) in label.iter().enumerate() {
        l2p[l] = w;
    }
    (out, Layout::from_vec(l2p).expect("labels stay a permutation"))
}
