use serde::{Deserialize, Serialize};

use super::coupling::CouplingMap;
use crate::circuit::{Circuit, Instruction};
use crate::error::{Error, Result};

/// Logical-to-physical qubit assignment; a permutation of `0..n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Layout {
    l2p: Vec<usize>,
    p2l: Vec<usize>,
}

impl TryFrom<Vec<usize>> for Layout {
    type Error = Error;

    fn try_from(v: Vec<usize>) -> Result<Self> {
        Layout::from_vec(v)
    }
}

impl From<Layout> for Vec<usize> {
    fn from(l: Layout) -> Self {
        l.l2p
    }
}

impl Layout {
    pub fn identity(n: usize) -> Self {
        Self {
            l2p: (0..n).collect(),
            p2l: (0..n).collect(),
        }
    }

    pub fn from_vec(l2p: Vec<usize>) -> Result<Self> {
        let n = l2p.len();
        let mut p2l = vec![usize::MAX; n];
        for (l, &p) in l2p.iter().enumerate() {
            if p >= n || p2l[p] != usize::MAX {
                return Err(Error::Layout(format!("{l2p:?} is not a permutation")));
            }
            p2l[p] = l;
        }
        Ok(Self { l2p, p2l })
    }

    pub fn len(&self) -> usize {
        self.l2p.len()
    }

    pub fn is_empty(&self) -> bool {
        self.l2p.is_empty()
    }

    pub fn physical(&self, logical: usize) -> usize {
        self.l2p[logical]
    }

    pub fn logical(&self, physical: usize) -> usize {
        self.p2l[physical]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.l2p
    }

    pub fn is_identity(&self) -> bool {
        self.l2p.iter().enumerate().all(|(i, &p)| i == p)
    }

    /// Exchanges whatever logical qubits sit on physical `a` and `b`.
    pub fn swap_physical(&mut self, a: usize, b: usize) {
        let (la, lb) = (self.p2l[a], self.p2l[b]);
        self.p2l.swap(a, b);
        self.l2p[la] = b;
        self.l2p[lb] = a;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SwapRecord {
    /// Position of the inserted SWAP (or its first CX) in the routed output.
    pub instruction_index: usize,
    pub physical: (usize, usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RoutedCircuit {
    /// Circuit over physical qubit indices.
    pub circuit: Circuit,
    pub initial_layout: Layout,
    pub final_layout: Layout,
    pub swap_log: Vec<SwapRecord>,
}

impl RoutedCircuit {
    /// Trivial routing: the circuit as-is with identity layouts.
    pub fn unrouted(circuit: Circuit) -> Self {
        let n = circuit.num_qubits();
        Self {
            circuit,
            initial_layout: Layout::identity(n),
            final_layout: Layout::identity(n),
            swap_log: Vec::new(),
        }
    }
}

/// Greedy SWAP insertion. For a two-qubit gate whose operands are not
/// coupled, the operand with the lower logical index walks the smallest
/// shortest path toward the other until they are adjacent.
pub fn route(circuit: &Circuit, map: &CouplingMap, layout: Option<&Layout>, expand_swaps: bool) -> Result<RoutedCircuit> {
    let n = map.num_physical_qubits();
    if circuit.num_qubits() > n {
        return Err(Error::CouplingMap(format!(
            "circuit needs {} qubits, device has {n}",
            circuit.num_qubits()
        )));
    }
    let initial = match layout {
        Some(l) if l.len() != n => {
            return Err(Error::Layout(format!("layout covers {} qubits, device has {n}", l.len())));
        }
        Some(l) => l.clone(),
        None => Layout::identity(n),
    };
    let mut cur = initial.clone();
    let mut out = Circuit::new(n, circuit.num_clbits());
    out.label = circuit.label.clone();
    let mut swap_log = Vec::new();
    for inst in circuit.instructions() {
        if inst.is_two_qubit_gate() {
            let (a, b) = (inst.qubits()[0], inst.qubits()[1]);
            let (mover, fixed) = (a.min(b), a.max(b));
            let (pm, pf) = (cur.physical(mover), cur.physical(fixed));
            if !map.has_edge(pm, pf) {
                let path = map.shortest_path(pm, pf);
                for w in path[..path.len() - 1].windows(2) {
                    let (p, q) = (w[0], w[1]);
                    swap_log.push(SwapRecord {
                        instruction_index: out.len(),
                        physical: (p, q),
                    });
                    if expand_swaps {
                        out.extend([Instruction::cx(p, q), Instruction::cx(q, p), Instruction::cx(p, q)])?;
                    } else {
                        out.push(Instruction::swap(p, q))?;
                    }
                    cur.swap_physical(p, q);
                }
            }
        }
        out.push(inst.remapped(|l| cur.physical(l)))?;
    }
    Ok(RoutedCircuit {
        circuit: out,
        initial_layout: initial,
        final_layout: cur,
        swap_log,
    })
}
