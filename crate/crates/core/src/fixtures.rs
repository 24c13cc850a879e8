//! Bundled reversible benchmark circuits with known truth tables.

use crate::circuit::Circuit;
use crate::qasm::{parse, QasmSource};
use crate::watermark::RotationSpec;

use std::f64::consts::PI;

#[derive(Debug, Clone, Copy)]
pub struct Fixture {
    pub name: &'static str,
    pub qasm: &'static str,
    pub num_qubits: usize,
    /// Qubits carrying the answer.
    pub functional: &'static [usize],
    /// Scratch qubits whose output can be disturbed.
    pub ancillas: &'static [usize],
    /// Rotation target and CNOT for the rotation watermark. With no
    /// ancillas, the target is a fresh qubit at index `num_qubits`.
    pub rotation_target: usize,
    pub rotation_cnot: (usize, usize),
    /// Basis-state map the circuit implements.
    pub truth: fn(usize) -> usize,
}

fn bit(x: usize, i: usize) -> usize {
    (x >> i) & 1
}

fn miller(x: usize) -> usize {
    [1, 0, 7, 2, 3, 4, 5, 6][x]
}

fn ex1(x: usize) -> usize {
    let (a, b, c) = (bit(x, 0), bit(x, 1), bit(x, 2));
    a | (b ^ a) << 1 | (c ^ (a & b)) << 2
}

fn rd32(x: usize) -> usize {
    let (a, b, c, t) = (bit(x, 0), bit(x, 1), bit(x, 2), bit(x, 3));
    let maj = (a & b) | (a & c) | (b & c);
    a | (a ^ b) << 1 | (a ^ b ^ c) << 2 | (t ^ maj) << 3
}

fn gt(x: usize, bound: usize) -> usize {
    let v = x & 0xF;
    v | (bit(x, 4) ^ usize::from(v > bound)) << 4
}

fn gt11(x: usize) -> usize {
    gt(x, 11)
}

fn gt5(x: usize) -> usize {
    gt(x, 5)
}

pub const FIXTURES: [Fixture; 5] = [
    Fixture {
        name: "miller3",
        qasm: include_str!("../fixtures/miller3.qasm"),
        num_qubits: 3,
        functional: &[0, 1, 2],
        ancillas: &[],
        rotation_target: 3,
        rotation_cnot: (2, 3),
        truth: miller,
    },
    Fixture {
        name: "ex1",
        qasm: include_str!("../fixtures/ex1.qasm"),
        num_qubits: 3,
        functional: &[0, 1, 2],
        ancillas: &[],
        rotation_target: 3,
        rotation_cnot: (2, 3),
        truth: ex1,
    },
    Fixture {
        name: "rd32",
        qasm: include_str!("../fixtures/rd32.qasm"),
        num_qubits: 4,
        functional: &[2, 3],
        ancillas: &[0, 1],
        rotation_target: 1,
        rotation_cnot: (0, 1),
        truth: rd32,
    },
    Fixture {
        name: "4gt11",
        qasm: include_str!("../fixtures/4gt11.qasm"),
        num_qubits: 5,
        functional: &[4],
        ancillas: &[0, 1, 2, 3],
        rotation_target: 1,
        rotation_cnot: (2, 1),
        truth: gt11,
    },
    Fixture {
        name: "4gt5",
        qasm: include_str!("../fixtures/4gt5.qasm"),
        num_qubits: 5,
        functional: &[4],
        ancillas: &[0, 1, 2, 3],
        rotation_target: 1,
        rotation_cnot: (2, 1),
        truth: gt5,
    },
];

impl Fixture {
    pub fn circuit(&self) -> Circuit {
        let mut c = parse(&QasmSource::new(self.qasm, self.name)).expect("bundled fixtures parse");
        c.label = Some(self.name.to_string());
        c
    }

    /// `RY(theta)` on the rotation target plus the CNOT.
    pub fn rotation_spec(&self, theta: f64) -> RotationSpec {
        let target = (!self.ancillas.is_empty()).then_some(self.rotation_target);
        RotationSpec::new(self.ancillas.to_vec(), target, theta, Some(self.rotation_cnot))
    }

    pub fn default_rotation(&self) -> RotationSpec {
        self.rotation_spec(PI)
    }
}

pub fn by_name(name: &str) -> Option<&'static Fixture> {
    FIXTURES.iter().find(|f| f.name == name)
}
