//! Statevector simulation, shot sampling and Pauli-trajectory noise.

mod distribution;

pub use distribution::{format_bits, Distribution, Outcomes};

use num_complex::Complex64 as C64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, Instruction};
use crate::error::{Error, Result};
use crate::kernel;
use crate::par::{map_indexed, Exec};
use crate::seed;
use crate::transpile::RoutedCircuit;

pub const MAX_SIM_QUBITS: usize = 24;

#[derive(Debug, Clone, PartialEq)]
pub struct Statevector {
    num_qubits: usize,
    amps: Vec<C64>,
}

impl Statevector {
    /// Computational basis state `|index>`.
    pub fn basis(num_qubits: usize, index: usize) -> Result<Self> {
        if num_qubits > MAX_SIM_QUBITS {
            return Err(Error::TooManyQubits {
                num_qubits,
                cap: MAX_SIM_QUBITS,
            });
        }
        let dim = 1usize << num_qubits;
        if index >= dim {
            return Err(Error::Invalid(format!("basis index {index} needs more than {num_qubits} qubits")));
        }
        let mut amps = vec![C64::new(0.0, 0.0); dim];
        amps[index] = C64::new(1.0, 0.0);
        Ok(Self { num_qubits, amps })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Applies a gate; barriers and measurements are no-ops here.
    pub fn apply(&mut self, inst: &Instruction) {
        let Instruction::Gate(g) = inst else {
            return;
        };
        match g.qubits.as_slice() {
            [q] => kernel::apply_1q(&mut self.amps, *q, &g.kind.matrix_1q(&g.params)),
            [a, b] => kernel::apply_2q(&mut self.amps, *a, *b, &g.kind.matrix_2q(&g.params)),
            _ => unreachable!("validated arity"),
        }
    }

    fn apply_pauli(&mut self, q: usize, p: u8) {
        kernel::apply_pauli(&mut self.amps, q, p);
    }
}

/// Parses a most-significant-first bitstring into a basis index.
pub fn basis_index(bits: &str) -> Result<usize> {
    if bits.is_empty() {
        return Ok(0);
    }
    usize::from_str_radix(bits, 2).map_err(|_| Error::Invalid(format!("`{bits}` is not a bitstring")))
}

/// Fails when any qubit is touched by a gate after being measured.
pub fn check_terminal_measures(circuit: &Circuit) -> Result<()> {
    let mut measured = vec![None; circuit.num_qubits()];
    for (i, inst) in circuit.instructions().iter().enumerate() {
        match inst {
            Instruction::Measure { qubit, .. } => measured[*qubit] = Some(i),
            Instruction::Gate(g) => {
                for &q in &g.qubits {
                    if let Some(index) = measured[q] {
                        return Err(Error::MidCircuitMeasure { qubit: q, index });
                    }
                }
            }
            Instruction::Barrier { .. } => {}
        }
    }
    Ok(())
}

/// Final state for input `|input>`; measurements must be terminal.
pub fn run_exact(circuit: &Circuit, input: usize) -> Result<Statevector> {
    check_terminal_measures(circuit)?;
    let mut sv = Statevector::basis(circuit.num_qubits(), input)?;
    for inst in circuit.instructions() {
        sv.apply(inst);
    }
    Ok(sv)
}

/// Which qubit lands in each written classical bit, in clbit order.
/// Without measurements every qubit is read, qubit `i` into bit `i`.
pub fn measured_qubits(circuit: &Circuit) -> Vec<usize> {
    if !circuit.has_measurements() {
        return (0..circuit.num_qubits()).collect();
    }
    let mut by_clbit = vec![None; circuit.num_clbits()];
    for inst in circuit.instructions() {
        if let Instruction::Measure { qubit, clbit } = inst {
            by_clbit[*clbit] = Some(*qubit);
        }
    }
    by_clbit.into_iter().flatten().collect()
}

fn outcome_table(probs: &[f64], measured: &[usize]) -> Vec<f64> {
    let mut table = vec![0.0; 1 << measured.len()];
    for (i, p) in probs.iter().enumerate() {
        if *p == 0.0 {
            continue;
        }
        table[outcome_of(i, measured)] += p;
    }
    table
}

fn outcome_of(index: usize, measured: &[usize]) -> usize {
    measured
        .iter()
        .enumerate()
        .fold(0, |acc, (k, &q)| acc | (((index >> q) & 1) << k))
}

/// Exact outcome probabilities of the measured qubits.
pub fn exact_distribution(circuit: &Circuit, input: usize) -> Result<Distribution> {
    let sv = run_exact(circuit, input)?;
    let measured = measured_qubits(circuit);
    let table = outcome_table(&sv.probabilities(), &measured);
    Ok(Distribution::from_dense(measured, &table))
}

/// Depolarizing probabilities per gate plus independent readout flips.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    pub p1: f64,
    pub p2: f64,
    pub p_readout: f64,
}

impl NoiseModel {
    pub fn new(p1: f64, p2: f64, p_readout: f64) -> Result<Self> {
        for (name, p) in [("p1", p1), ("p2", p2), ("p_readout", p_readout)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::Invalid(format!("{name} = {p} is not a probability")));
            }
        }
        Ok(Self { p1, p2, p_readout })
    }

    /// `p1 = 0.001`, `p2 = 0.01`, `p_readout = 0.02`.
    pub fn toy() -> Self {
        Self {
            p1: 0.001,
            p2: 0.01,
            p_readout: 0.02,
        }
    }

    pub fn preset(name: &str) -> Option<Self> {
        match name {
            "toy" => Some(Self::toy()),
            "none" | "ideal" => Some(Self::new(0.0, 0.0, 0.0).expect("zero is valid")),
            _ => None,
        }
    }

    pub fn is_noiseless(&self) -> bool {
        self.p1 == 0.0 && self.p2 == 0.0 && self.p_readout == 0.0
    }
}

/// One Pauli error drawn for a shot: after gate `gate`, apply `paulis`
/// (one code per gate qubit, 0 = identity).
struct Fault {
    gate: usize,
    paulis: [u8; 2],
}

/// Draws `shots` outcomes. Each shot uses its own sub-seed, so the result
/// is the same whatever `exec` says.
pub fn sample(
    circuit: &Circuit,
    input: usize,
    shots: u64,
    seed: u64,
    noise: Option<&NoiseModel>,
    exec: Exec,
) -> Result<Distribution> {
    if shots == 0 {
        return Err(Error::Invalid("shots must be at least 1".into()));
    }
    let ideal = run_exact(circuit, input)?;
    let measured = measured_qubits(circuit);
    let table = outcome_table(&ideal.probabilities(), &measured);
    let cdf = cumulative(&table);
    let noise = noise.filter(|n| !n.is_noiseless());
    let gates: Vec<&Instruction> = circuit.instructions().iter().filter(|i| i.is_gate()).collect();

    let draws: Vec<usize> = map_indexed(exec, shots as usize, |shot| {
        let mut rng = seed::rng(seed, "shot", shot as u64);
        let Some(nm) = noise else {
            return pick(&cdf, rng.random::<f64>());
        };
        let mut faults = Vec::new();
        for (gi, g) in gates.iter().enumerate() {
            let arity = g.qubits().len();
            let p = if arity == 1 { nm.p1 } else { nm.p2 };
            if p > 0.0 && rng.random::<f64>() < p {
                let code = if arity == 1 {
                    rng.random_range(1..4u8)
                } else {
                    rng.random_range(1..16u8)
                };
                faults.push(Fault {
                    gate: gi,
                    paulis: [code & 3, code >> 2],
                });
            }
        }
        let mut outcome = if faults.is_empty() {
            pick(&cdf, rng.random::<f64>())
        } else {
            let sv = noisy_run(circuit, input, &faults).expect("checked above");
            let t = outcome_table(&sv.probabilities(), &measured);
            pick(&cumulative(&t), rng.random::<f64>())
        };
        if nm.p_readout > 0.0 {
            for k in 0..measured.len() {
                if rng.random::<f64>() < nm.p_readout {
                    outcome ^= 1 << k;
                }
            }
        }
        outcome
    });
    let mut counts = vec![0u64; table.len()];
    for d in draws {
        counts[d] += 1;
    }
    Ok(Distribution::from_dense_counts(measured, &counts))
}

fn noisy_run(circuit: &Circuit, input: usize, faults: &[Fault]) -> Result<Statevector> {
    let mut sv = Statevector::basis(circuit.num_qubits(), input)?;
    let mut gi = 0;
    let mut next = faults.iter().peekable();
    for inst in circuit.instructions() {
        sv.apply(inst);
        if !inst.is_gate() {
            continue;
        }
        while let Some(f) = next.peek() {
            if f.gate != gi {
                break;
            }
            for (k, &q) in inst.qubits().iter().enumerate() {
                if f.paulis[k] != 0 {
                    sv.apply_pauli(q, f.paulis[k]);
                }
            }
            next.next();
        }
        gi += 1;
    }
    Ok(sv)
}

fn cumulative(table: &[f64]) -> Vec<f64> {
    let mut acc = 0.0;
    table
        .iter()
        .map(|p| {
            acc += p;
            acc
        })
        .collect()
}

fn pick(cdf: &[f64], u: f64) -> usize {
    let total = *cdf.last().expect("non-empty table");
    let i = cdf.partition_point(|&c| c <= u * total);
    if i < cdf.len() {
        return i;
    }
    // rounding ran past the end: take the last non-empty bin
    (0..cdf.len()).rev().find(|&j| j == 0 || cdf[j] > cdf[j - 1]).unwrap_or(0)
}

/// Renames the physical qubit labels of a routed run back to logical ones.
pub fn to_logical(routed: &RoutedCircuit, dist: &Distribution) -> Result<Distribution> {
    dist.relabel(|p| routed.final_layout.logical(p))
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::circuit::Instruction as I;

    fn circ(n: usize, c: usize, insts: Vec<Instruction>) -> Circuit {
        Circuit::from_instructions(n, c, insts).unwrap()
    }

    #[test]
    fn empty_circuit_keeps_input() {
        let sv = run_exact(&Circuit::new(2, 0), 0).unwrap();
        assert_eq!(sv.amplitudes()[0], C64::new(1.0, 0.0));
    }

    #[test]
    fn ry_pi_flips() {
        let sv = run_exact(&circ(1, 0, vec![I::ry(PI, 0)]), 0).unwrap();
        assert!((sv.probabilities()[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn hadamard_is_balanced() {
        let p = run_exact(&circ(1, 0, vec![I::h(0)]), 0).unwrap().probabilities();
        assert!((p[0] - 0.5).abs() < 1e-12 && (p[1] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn mid_circuit_measure_rejected() {
        let c = circ(1, 1, vec![I::measure(0, 0), I::x(0)]);
        assert_eq!(run_exact(&c, 0).unwrap_err(), Error::MidCircuitMeasure { qubit: 0, index: 0 });
        let ok = circ(2, 1, vec![I::measure(0, 0), I::barrier([0, 1]), I::x(1)]);
        assert!(run_exact(&ok, 0).is_ok());
    }

    #[test]
    fn noiseless_x_gives_all_ones() {
        let c = circ(1, 1, vec![I::x(0), I::measure(0, 0)]);
        let d = sample(&c, 0, 1000, 5, None, Exec::default()).unwrap();
        assert_eq!(d.count("1"), Some(1000));
        assert_eq!(d.shots(), Some(1000));
    }

    #[test]
    fn seeded_sampling_is_repeatable() {
        let c = circ(2, 0, vec![I::h(0), I::h(1)]);
        let a = sample(&c, 0, 500, 11, Some(&NoiseModel::toy()), Exec::Parallel).unwrap();
        let b = sample(&c, 0, 500, 11, Some(&NoiseModel::toy()), Exec::Sequential).unwrap();
        assert_eq!(a, b);
        let c2 = sample(&c, 0, 500, 12, Some(&NoiseModel::toy()), Exec::Parallel).unwrap();
        assert_ne!(a, c2);
    }

    #[test]
    fn readout_flip_rate() {
        let c = circ(1, 1, vec![I::x(0), I::measure(0, 0)]);
        let nm = NoiseModel::new(0.0, 0.0, 0.1).unwrap();
        let d = sample(&c, 0, 100_000, 3, Some(&nm), Exec::default()).unwrap();
        assert!((d.probability("0") - 0.1).abs() < 0.01, "{}", d.probability("0"));
    }

    #[test]
    fn measured_labels_follow_clbits() {
        let c = circ(3, 2, vec![I::x(2), I::measure(2, 0), I::measure(0, 1)]);
        let d = exact_distribution(&c, 0).unwrap();
        assert_eq!(d.qubits(), &[2, 0]);
        assert_eq!(d.probability("01"), 1.0);
    }

    #[test]
    fn unmeasured_circuit_reads_everything() {
        let d = exact_distribution(&circ(2, 0, vec![I::x(1)]), 0).unwrap();
        assert_eq!(d.qubits(), &[0, 1]);
        assert_eq!(d.probability("10"), 1.0);
    }

    #[test]
    fn input_bitstring() {
        assert_eq!(basis_index("10").unwrap(), 2);
        let d = exact_distribution(&Circuit::new(2, 0), basis_index("10").unwrap()).unwrap();
        assert_eq!(d.probability("10"), 1.0);
        assert!(basis_index("12").is_err());
    }

    #[test]
    fn pick_skips_empty_bins() {
        let cdf = cumulative(&[0.0, 1.0, 0.0]);
        assert_eq!(pick(&cdf, 0.0), 1);
        assert_eq!(pick(&cdf, 0.999_999), 1);
        assert_eq!(pick(&cdf, 1.0 - f64::EPSILON / 2.0), 1);
    }
}
