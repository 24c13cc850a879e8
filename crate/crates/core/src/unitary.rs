//! Dense unitaries and global-phase-insensitive comparison.

use num_complex::Complex64 as C64;

use crate::circuit::{Circuit, Instruction};
use crate::error::{Error, Result};
use crate::kernel;

/// Largest register `unitary_of` will expand by default.
pub const DEFAULT_UNITARY_CAP: usize = 10;

/// Square complex matrix stored column-major, so each column is a state vector.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl UnitaryMatrix {
    pub fn identity(dim: usize) -> Self {
        let mut data = vec![C64::new(0.0, 0.0); dim * dim];
        for k in 0..dim {
            data[k * dim + k] = C64::new(1.0, 0.0);
        }
        Self { dim, data }
    }

    /// Builds from row-major entries.
    pub fn from_rows(dim: usize, rows: &[C64]) -> Self {
        assert_eq!(rows.len(), dim * dim, "expected {dim}x{dim} entries");
        let mut data = vec![C64::new(0.0, 0.0); dim * dim];
        for r in 0..dim {
            for c in 0..dim {
                data[c * dim + r] = rows[r * dim + c];
            }
        }
        Self { dim, data }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.data[col * self.dim + row]
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.dim, rhs.dim);
        let n = self.dim;
        let mut data = vec![C64::new(0.0, 0.0); n * n];
        for c in 0..n {
            for k in 0..n {
                let b = rhs.data[c * n + k];
                if b == C64::new(0.0, 0.0) {
                    continue;
                }
                for r in 0..n {
                    data[c * n + r] += self.data[k * n + r] * b;
                }
            }
        }
        Self { dim: n, data }
    }

    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut data = vec![C64::new(0.0, 0.0); n * n];
        for r in 0..n {
            for c in 0..n {
                data[r * n + c] = self.data[c * n + r].conj();
            }
        }
        Self { dim: n, data }
    }

    /// Kronecker product with `self` as the more significant factor.
    pub fn kron(&self, rhs: &Self) -> Self {
        let n = self.dim * rhs.dim;
        let mut rows = vec![C64::new(0.0, 0.0); n * n];
        for r1 in 0..self.dim {
            for c1 in 0..self.dim {
                let a = self.get(r1, c1);
                for r2 in 0..rhs.dim {
                    for c2 in 0..rhs.dim {
                        rows[(r1 * rhs.dim + r2) * n + c1 * rhs.dim + c2] = a * rhs.get(r2, c2);
                    }
                }
            }
        }
        Self::from_rows(n, &rows)
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|v| v * s).collect(),
        }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        assert_eq!(self.dim, rhs.dim);
        Self {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn max_abs_diff(&self, rhs: &Self) -> f64 {
        assert_eq!(self.dim, rhs.dim);
        self.data
            .iter()
            .zip(&rhs.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `U U^dagger = I` elementwise within `tol`.
    pub fn is_unitary(&self, tol: f64) -> bool {
        self.mul(&self.adjoint()).max_abs_diff(&Self::identity(self.dim)) <= tol
    }

    /// Returns `lambda` with `|lambda| = 1` when `self^dagger * other = lambda * I`
    /// within `tol` elementwise.
    pub fn phase_relative_to(&self, other: &Self, tol: f64) -> Option<C64> {
        if self.dim != other.dim {
            return None;
        }
        let product = self.adjoint().mul(other);
        let n = self.dim;
        let mut trace = C64::new(0.0, 0.0);
        for k in 0..n {
            trace += product.get(k, k);
        }
        let lambda = trace / n as f64;
        if (lambda.norm() - 1.0).abs() > tol {
            return None;
        }
        let target = Self::identity(n).scale(lambda);
        (product.max_abs_diff(&target) <= tol).then_some(lambda)
    }

    pub fn equiv_up_to_phase(&self, other: &Self, tol: f64) -> bool {
        self.phase_relative_to(other, tol).is_some()
    }

    /// Left-multiplies by a gate embedded on `qubits` of an n-qubit register.
    pub(crate) fn apply_instruction(&mut self, inst: &Instruction) {
        let Instruction::Gate(g) = inst else {
            return;
        };
        let n = self.dim;
        match g.qubits.as_slice() {
            [q] => {
                let m = g.kind.matrix_1q(&g.params);
                for col in self.data.chunks_mut(n) {
                    kernel::apply_1q(col, *q, &m);
                }
            }
            [a, b] => {
                let m = g.kind.matrix_2q(&g.params);
                for col in self.data.chunks_mut(n) {
                    kernel::apply_2q(col, *a, *b, &m);
                }
            }
            _ => unreachable!("validated arity"),
        }
    }
}

/// Product of all gate matrices in instruction order. Barriers are identity.
pub fn unitary_of(circuit: &Circuit) -> Result<UnitaryMatrix> {
    unitary_of_with_cap(circuit, DEFAULT_UNITARY_CAP)
}

pub fn unitary_of_with_cap(circuit: &Circuit, cap: usize) -> Result<UnitaryMatrix> {
    if circuit.num_qubits() > cap {
        return Err(Error::TooManyQubits {
            num_qubits: circuit.num_qubits(),
            cap,
        });
    }
    if circuit.instructions().iter().any(|i| matches!(i, Instruction::Measure { .. })) {
        return Err(Error::ContainsMeasure);
    }
    let mut u = UnitaryMatrix::identity(1 << circuit.num_qubits());
    for inst in circuit.instructions() {
        u.apply_instruction(inst);
    }
    Ok(u)
}

/// Unitary of a gate list over `num_qubits`, skipping validation.
pub fn unitary_of_gates(num_qubits: usize, insts: &[Instruction]) -> UnitaryMatrix {
    let mut u = UnitaryMatrix::identity(1 << num_qubits);
    for inst in insts {
        u.apply_instruction(inst);
    }
    u
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::Instruction as I;
    use crate::gate::GateKind;

    fn circuit(n: usize, insts: Vec<Instruction>) -> Circuit {
        Circuit::from_instructions(n, 0, insts).unwrap()
    }

    #[test]
    fn empty_circuit_is_identity() {
        let u = unitary_of(&circuit(2, vec![])).unwrap();
        assert_eq!(u, UnitaryMatrix::identity(4));
    }

    #[test]
    fn double_x_is_identity() {
        let u = unitary_of(&circuit(1, vec![I::x(0), I::x(0)])).unwrap();
        assert!(u.max_abs_diff(&UnitaryMatrix::identity(2)) < 1e-15);
    }

    #[test]
    fn three_cx_equal_swap() {
        let u = unitary_of(&circuit(2, vec![I::cx(0, 1), I::cx(1, 0), I::cx(0, 1)])).unwrap();
        let swap = GateKind::Swap.matrix(&[]).unwrap();
        assert!(u.max_abs_diff(&swap) < 1e-15);
    }

    #[test]
    fn embedding_uses_lsb_for_qubit_zero() {
        // X on qubit 0 maps |00> (index 0) to index 1.
        let u = unitary_of(&circuit(2, vec![I::x(0)])).unwrap();
        assert_eq!(u.get(1, 0), C64::new(1.0, 0.0));
        // CX with control 1, target 0 maps index 2 (q1=1) to index 3.
        let u = unitary_of(&circuit(2, vec![I::cx(1, 0)])).unwrap();
        assert_eq!(u.get(3, 2), C64::new(1.0, 0.0));
    }

    #[test]
    fn measure_rejected_and_cap_enforced() {
        let mut c = Circuit::new(1, 1);
        c.push(I::measure(0, 0)).unwrap();
        assert_eq!(unitary_of(&c), Err(Error::ContainsMeasure));
        let big = Circuit::new(11, 0);
        assert!(matches!(unitary_of(&big), Err(Error::TooManyQubits { cap: 10, .. })));
    }

    #[test]
    fn phase_comparison() {
        let z = GateKind::Z.matrix(&[]).unwrap();
        let minus_z = z.scale(C64::new(-1.0, 0.0));
        let lambda = z.phase_relative_to(&minus_z, 1e-12).unwrap();
        assert!((lambda - C64::new(-1.0, 0.0)).norm() < 1e-12);
        let x = GateKind::X.matrix(&[]).unwrap();
        assert!(!z.equiv_up_to_phase(&x, 1e-9));
    }
}
