use std::collections::BTreeSet;
use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64 as C64;

use crate::circuit::{normalize_angle, Circuit, Gate, Instruction};
use crate::error::{Error, Result};
use crate::gate::GateKind;

const EPS: f64 = 1e-10;

/// Native gate set of a target device.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BasisSet {
    kinds: BTreeSet<GateKind>,
}

impl BasisSet {
    pub fn new(kinds: impl IntoIterator<Item = GateKind>) -> Result<Self> {
        let kinds: BTreeSet<GateKind> = kinds.into_iter().collect();
        if kinds.is_empty() {
            return Err(Error::NonUniversalBasis("empty basis".into()));
        }
        if !kinds.iter().any(|k| k.qubit_arity() == 2) {
            return Err(Error::NonUniversalBasis("no two-qubit gate".into()));
        }
        Ok(Self { kinds })
    }

    /// `{cx, u1, u2, u3, id}`.
    pub fn ibm() -> Self {
        use GateKind::*;
        Self {
            kinds: [CX, U1, U2, U3, I].into_iter().collect(),
        }
    }

    /// Every catalogue kind, so nothing is lowered.
    pub fn extended() -> Self {
        Self {
            kinds: GateKind::ALL.into_iter().collect(),
        }
    }

    pub fn preset(name: &str) -> Option<Self> {
        match name {
            "ibm" => Some(Self::ibm()),
            "extended" => Some(Self::extended()),
            _ => None,
        }
    }

    pub fn contains(&self, kind: GateKind) -> bool {
        self.kinds.contains(&kind)
    }

    pub fn kinds(&self) -> impl Iterator<Item = GateKind> + '_ {
        self.kinds.iter().copied()
    }

    pub fn is_universal(&self) -> bool {
        self.contains(GateKind::U3) && (self.contains(GateKind::CX) || self.contains(GateKind::CZ))
    }
}

/// Rewrites every gate outside `basis` into basis gates. Barriers and
/// measurements pass through in place.
pub fn decompose_to_basis(circuit: &Circuit, basis: &BasisSet) -> Result<Circuit> {
    if !basis.is_universal() {
        return Err(Error::NonUniversalBasis("needs u3 and one of cx, cz".into()));
    }
    let mut out = Circuit::new(circuit.num_qubits(), circuit.num_clbits());
    out.label = circuit.label.clone();
    let mut buf = Vec::new();
    for inst in circuit.instructions() {
        match inst {
            Instruction::Gate(g) => {
                buf.clear();
                lower_into(g, basis, &mut buf);
                out.extend(buf.drain(..))?;
            }
            other => out.push(other.clone())?,
        }
    }
    Ok(out)
}

/// Lowers one gate into `basis` (already checked universal), appending to `out`.
pub(crate) fn lower_into(g: &Gate, basis: &BasisSet, out: &mut Vec<Instruction>) {
    if basis.contains(g.kind) {
        out.push(Instruction::Gate(g.clone()));
        return;
    }
    if g.kind.qubit_arity() == 1 {
        let m = g.kind.matrix_1q(&g.params);
        out.extend(one_qubit_u(&m, g.qubits[0], basis));
        return;
    }
    for step in lower_two_qubit(g, basis) {
        let Instruction::Gate(sub) = &step else { unreachable!() };
        lower_into(sub, basis, out);
    }
}

/// Euler angles `(theta, phi, lambda)` with `m = e^{i alpha} U3(theta, phi, lambda)`.
pub fn zyz_angles(m: &[C64; 4]) -> (f64, f64, f64) {
    let (a, b, c, d) = (m[0], m[1], m[2], m[3]);
    let theta = 2.0 * c.norm().atan2(a.norm());
    if c.norm() < EPS {
        return (0.0, 0.0, normalize_angle(d.arg() - a.arg()));
    }
    if a.norm() < EPS {
        return (PI, normalize_angle(c.arg()), normalize_angle((-b).arg()));
    }
    let alpha = a.arg();
    (theta, normalize_angle(c.arg() - alpha), normalize_angle((-b).arg() - alpha))
}

/// Shortest U-family form of a single-qubit matrix: nothing for identity,
/// U1 for diagonals, U2 at theta = pi/2, otherwise U3.
fn one_qubit_u(m: &[C64; 4], q: usize, basis: &BasisSet) -> Vec<Instruction> {
    let (theta, phi, lambda) = zyz_angles(m);
    if theta.abs() < EPS {
        let l = normalize_angle(phi + lambda);
        if l.abs() < EPS {
            return Vec::new();
        }
        if basis.contains(GateKind::U1) {
            return vec![Instruction::gate(GateKind::U1, [l], [q])];
        }
        return vec![Instruction::gate(GateKind::U3, [0.0, 0.0, l], [q])];
    }
    if (theta - FRAC_PI_2).abs() < EPS && basis.contains(GateKind::U2) {
        return vec![Instruction::gate(GateKind::U2, [phi, lambda], [q])];
    }
    vec![Instruction::gate(GateKind::U3, [theta, phi, lambda], [q])]
}

/// One rewriting step for a two-qubit kind, in terms of CX (or CZ when the
/// basis lacks CX) and single-qubit gates.
fn lower_two_qubit(g: &Gate, basis: &BasisSet) -> Vec<Instruction> {
    use GateKind::*;
    let (a, b) = (g.qubits[0], g.qubits[1]);
    let one = |k: GateKind, p: &[f64], q: usize| Instruction::gate(k, p.to_vec(), [q]);
    let cx = |c: usize, t: usize| {
        if basis.contains(CX) {
            vec![Instruction::cx(c, t)]
        } else {
            vec![one(H, &[], t), Instruction::gate(CZ, [], [c, t]), one(H, &[], t)]
        }
    };
    let theta = g.params.first().copied().unwrap_or(0.0);
    let controlled_rot = |k: GateKind| {
        let mut v = vec![one(k, &[theta / 2.0], b)];
        v.extend(cx(a, b));
        v.push(one(k, &[-theta / 2.0], b));
        v.extend(cx(a, b));
        v
    };
    let rzz = |t: f64| {
        let mut v = cx(a, b);
        v.push(one(RZ, &[t], b));
        v.extend(cx(a, b));
        v
    };
    match g.kind {
        CX => vec![one(H, &[], b), Instruction::gate(CZ, [], [a, b]), one(H, &[], b)],
        CZ => {
            let mut v = vec![one(H, &[], b)];
            v.extend(cx(a, b));
            v.push(one(H, &[], b));
            v
        }
        CY => {
            let mut v = vec![one(Sdg, &[], b)];
            v.extend(cx(a, b));
            v.push(one(S, &[], b));
            v
        }
        CH => {
            let mut v = vec![one(S, &[], b), one(H, &[], b), one(T, &[], b)];
            v.extend(cx(a, b));
            v.extend([one(Tdg, &[], b), one(H, &[], b), one(Sdg, &[], b)]);
            v
        }
        CRZ => controlled_rot(RZ),
        CRY => controlled_rot(RY),
        CRX => {
            let mut v = vec![one(H, &[], b)];
            v.extend(controlled_rot(RZ));
            v.push(one(H, &[], b));
            v
        }
        RZZ => rzz(theta),
        RXX => {
            let mut v = vec![one(H, &[], a), one(H, &[], b)];
            v.extend(rzz(theta));
            v.extend([one(H, &[], a), one(H, &[], b)]);
            v
        }
        RYY => {
            let mut v = vec![one(RX, &[FRAC_PI_2], a), one(RX, &[FRAC_PI_2], b)];
            v.extend(rzz(theta));
            v.extend([one(RX, &[-FRAC_PI_2], a), one(RX, &[-FRAC_PI_2], b)]);
            v
        }
        Swap => {
            let mut v = cx(a, b);
            v.extend(cx(b, a));
            v.extend(cx(a, b));
            v
        }
        ISwap => {
            let mut v = vec![one(S, &[], a), one(S, &[], b), one(H, &[], a)];
            v.extend(cx(a, b));
            v.extend(cx(b, a));
            v.push(one(H, &[], b));
            v
        }
        k => unreachable!("{k} is not a two-qubit gate"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::unitary::{unitary_of, unitary_of_gates};

    fn lowered_matches(g: Gate, basis: &BasisSet) {
        let n = g.qubits.iter().max().unwrap() + 1;
        let mut out = Vec::new();
        lower_into(&g, basis, &mut out);
        assert!(out.iter().all(|i| basis.contains(i.as_gate().unwrap().kind)));
        let want = unitary_of_gates(n, &[Instruction::Gate(g.clone())]);
        let got = unitary_of_gates(n, &out);
        assert!(want.equiv_up_to_phase(&got, 1e-9), "{} -> {:?}", g.kind, out);
    }

    #[test]
    fn every_kind_lowers_exactly() {
        let cz_basis = BasisSet::new([GateKind::CZ, GateKind::U3]).unwrap();
        for basis in [BasisSet::ibm(), cz_basis] {
            for kind in GateKind::ALL {
                let params: Vec<f64> = (0..kind.param_arity()).map(|i| 0.37 + 1.1 * i as f64).collect();
                let qubits: Vec<usize> = if kind.qubit_arity() == 2 { vec![2, 0] } else { vec![1] };
                lowered_matches(Gate::new(kind, params.clone(), qubits), &basis);
                if kind.qubit_arity() == 2 {
                    lowered_matches(Gate::new(kind, params, [0, 1]), &basis);
                }
            }
        }
    }

    #[test]
    fn hadamard_is_u2_zero_pi() {
        let c = Circuit::from_instructions(1, 0, [Instruction::h(0)]).unwrap();
        let d = decompose_to_basis(&c, &BasisSet::ibm()).unwrap();
        let g = d.instructions()[0].as_gate().unwrap();
        assert_eq!(g.kind, GateKind::U2);
        assert!(g.params[0].abs() < 1e-12 && (g.params[1] - PI).abs() < 1e-12);
        // matrix oracle: H equals U3(pi/2, 0, pi) up to phase
        let u3 = GateKind::U3.matrix(&[FRAC_PI_2, 0.0, PI]).unwrap();
        assert!(GateKind::H.matrix(&[]).unwrap().equiv_up_to_phase(&u3, 1e-12));
    }

    #[test]
    fn pauli_angles() {
        let (t, p, l) = zyz_angles(&GateKind::X.matrix_1q(&[]));
        assert!((t - PI).abs() < 1e-12 && p.abs() < 1e-12 && (l - PI).abs() < 1e-12);
        let (t, p, l) = zyz_angles(&GateKind::Y.matrix_1q(&[]));
        assert!((t - PI).abs() < 1e-12 && (p - FRAC_PI_2).abs() < 1e-12 && (l - FRAC_PI_2).abs() < 1e-12);
    }

    #[test]
    fn swap_becomes_three_cx() {
        let c = Circuit::from_instructions(2, 0, [Instruction::swap(0, 1)]).unwrap();
        let d = decompose_to_basis(&c, &BasisSet::ibm()).unwrap();
        assert_eq!(d.instructions(), &[Instruction::cx(0, 1), Instruction::cx(1, 0), Instruction::cx(0, 1)]);
    }

    #[test]
    fn basis_circuit_is_fixpoint() {
        let c = Circuit::from_instructions(
            2,
            1,
            [
                Instruction::gate(GateKind::U3, [0.1, 0.2, 0.3], [0]),
                Instruction::barrier([0, 1]),
                Instruction::cx(0, 1),
                Instruction::gate(GateKind::U1, [0.5], [1]),
                Instruction::measure(1, 0),
            ],
        )
        .unwrap();
        assert_eq!(decompose_to_basis(&c, &BasisSet::ibm()).unwrap(), c);
        assert_eq!(decompose_to_basis(&c, &BasisSet::extended()).unwrap(), c);
    }

    #[test]
    fn barriers_stay_in_place_and_unitary_is_kept() {
        let c = Circuit::from_instructions(
            3,
            0,
            [
                Instruction::h(0),
                Instruction::gate(GateKind::CH, [], [0, 2]),
                Instruction::barrier([0, 1, 2]),
                Instruction::gate(GateKind::RYY, [0.7], [1, 2]),
                Instruction::gate(GateKind::T, [], [1]),
            ],
        )
        .unwrap();
        let d = decompose_to_basis(&c, &BasisSet::ibm()).unwrap();
        assert!(unitary_of(&c).unwrap().equiv_up_to_phase(&unitary_of(&d).unwrap(), 1e-9));
        let bpos = d.instructions().iter().position(|i| matches!(i, Instruction::Barrier { .. })).unwrap();
        let before = d.instructions()[..bpos].iter().filter(|i| i.is_gate()).count();
        let mut head = Vec::new();
        lower_into(&Gate::new(GateKind::H, [], [0]), &BasisSet::ibm(), &mut head);
        lower_into(&Gate::new(GateKind::CH, [], [0, 2]), &BasisSet::ibm(), &mut head);
        assert_eq!(before, head.len());
    }

    #[test]
    fn non_universal_rejected() {
        let b = BasisSet::new([GateKind::CX, GateKind::RZ]).unwrap();
        let c = Circuit::new(1, 0);
        assert!(matches!(decompose_to_basis(&c, &b), Err(Error::NonUniversalBasis(_))));
        assert!(BasisSet::new([GateKind::H]).is_err());
    }
}
