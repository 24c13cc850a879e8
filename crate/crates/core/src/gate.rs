//! Gate catalogue and gate semantics.
//!
//! Two-qubit matrices are written with the first listed qubit as the most
//! significant bit of the local 4x4 index, so `CX [control, target]` is the
//! textbook `diag(I, X)` block matrix.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4, PI};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::unitary::UnitaryMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GateKind {
    I,
    X,
    Y,
    Z,
    H,
    S,
    Sdg,
    T,
    Tdg,
    SX,
    SXdg,
    RX,
    RY,
    RZ,
    U1,
    U2,
    U3,
    CX,
    CY,
    CZ,
    CH,
    CRX,
    CRY,
    CRZ,
    Swap,
    ISwap,
    RXX,
    RYY,
    RZZ,
}

/// Single-qubit kinds counted by the authorship-probability model.
pub const SINGLE_QUBIT_POOL: [GateKind; 10] = [
    GateKind::X,
    GateKind::Y,
    GateKind::Z,
    GateKind::H,
    GateKind::S,
    GateKind::T,
    GateKind::SX,
    GateKind::RX,
    GateKind::RY,
    GateKind::RZ,
];

/// Two-qubit kinds counted by the authorship-probability model.
pub const TWO_QUBIT_POOL: [GateKind; 12] = [
    GateKind::CX,
    GateKind::CY,
    GateKind::CZ,
    GateKind::CH,
    GateKind::CRX,
    GateKind::CRY,
    GateKind::CRZ,
    GateKind::Swap,
    GateKind::ISwap,
    GateKind::RXX,
    GateKind::RYY,
    GateKind::RZZ,
];

pub const SINGLE_QUBIT_KIND_COUNT: usize = SINGLE_QUBIT_POOL.len();
pub const TWO_QUBIT_KIND_COUNT: usize = TWO_QUBIT_POOL.len();

impl GateKind {
    pub const ALL: [GateKind; 29] = [
        GateKind::I,
        GateKind::X,
        GateKind::Y,
        GateKind::Z,
        GateKind::H,
        GateKind::S,
        GateKind::Sdg,
        GateKind::T,
        GateKind::Tdg,
        GateKind::SX,
        GateKind::SXdg,
        GateKind::RX,
        GateKind::RY,
        GateKind::RZ,
        GateKind::U1,
        GateKind::U2,
        GateKind::U3,
        GateKind::CX,
        GateKind::CY,
        GateKind::CZ,
        GateKind::CH,
        GateKind::CRX,
        GateKind::CRY,
        GateKind::CRZ,
        GateKind::Swap,
        GateKind::ISwap,
        GateKind::RXX,
        GateKind::RYY,
        GateKind::RZZ,
    ];

    /// Lower-case OpenQASM (qelib1) name.
    pub fn name(self) -> &'static str {
        use GateKind::*;
        match self {
            I => "id",
            X => "x",
            Y => "y",
            Z => "z",
            H => "h",
            S => "s",
            Sdg => "sdg",
            T => "t",
            Tdg => "tdg",
            SX => "sx",
            SXdg => "sxdg",
            RX => "rx",
            RY => "ry",
            RZ => "rz",
            U1 => "u1",
            U2 => "u2",
            U3 => "u3",
            CX => "cx",
            CY => "cy",
            CZ => "cz",
            CH => "ch",
            CRX => "crx",
            CRY => "cry",
            CRZ => "crz",
            Swap => "swap",
            ISwap => "iswap",
            RXX => "rxx",
            RYY => "ryy",
            RZZ => "rzz",
        }
    }

    pub fn from_name(name: &str) -> Option<GateKind> {
        let lower = name.to_ascii_lowercase();
        match lower.as_str() {
            "i" | "id" => Some(GateKind::I),
            "u" => Some(GateKind::U3),
            "p" => Some(GateKind::U1),
            other => GateKind::ALL.iter().copied().find(|k| k.name() == other),
        }
    }

    pub fn param_arity(self) -> usize {
        use GateKind::*;
        match self {
            RX | RY | RZ | U1 | CRX | CRY | CRZ | RXX | RYY | RZZ => 1,
            U2 => 2,
            U3 => 3,
            _ => 0,
        }
    }

    pub fn qubit_arity(self) -> usize {
        use GateKind::*;
        match self {
            CX | CY | CZ | CH | CRX | CRY | CRZ | Swap | ISwap | RXX | RYY | RZZ => 2,
            _ => 1,
        }
    }

    /// Kinds that equal their own inverse for every parameter value.
    pub fn is_self_inverse(self) -> bool {
        use GateKind::*;
        matches!(self, I | X | Y | Z | H | CX | CY | CZ | CH | Swap)
    }

    /// Rotation axis shared by kinds that compose additively in their angle.
    pub fn rotation_axis(self) -> Option<char> {
        match self {
            GateKind::RX => Some('x'),
            GateKind::RY => Some('y'),
            GateKind::RZ => Some('z'),
            _ => None,
        }
    }

    pub fn check_params(self, params: &[f64]) -> Result<()> {
        if params.len() != self.param_arity() {
            return Err(Error::ParamArity {
                kind: self,
                expected: self.param_arity(),
                got: params.len(),
            });
        }
        Ok(())
    }

    /// Dense matrix of the gate: 2x2 for one-qubit kinds, 4x4 for two-qubit kinds.
    pub fn matrix(self, params: &[f64]) -> Result<UnitaryMatrix> {
        self.check_params(params)?;
        Ok(match self.qubit_arity() {
            1 => UnitaryMatrix::from_rows(2, &self.matrix_1q(params)),
            _ => UnitaryMatrix::from_rows(4, &self.matrix_2q(params)),
        })
    }

    /// Row-major 2x2 matrix. Callers must have validated arity.
    pub(crate) fn matrix_1q(self, p: &[f64]) -> [C64; 4] {
        use GateKind::*;
        let zero = C64::new(0.0, 0.0);
        let one = C64::new(1.0, 0.0);
        let i = C64::new(0.0, 1.0);
        match self {
            I => [one, zero, zero, one],
            X => [zero, one, one, zero],
            Y => [zero, -i, i, zero],
            Z => [one, zero, zero, -one],
            H => {
                let h = C64::new(FRAC_1_SQRT_2, 0.0);
                [h, h, h, -h]
            }
            S => [one, zero, zero, i],
            Sdg => [one, zero, zero, -i],
            T => [one, zero, zero, C64::from_polar(1.0, FRAC_PI_4)],
            Tdg => [one, zero, zero, C64::from_polar(1.0, -FRAC_PI_4)],
            SX => {
                let a = C64::new(0.5, 0.5);
                let b = C64::new(0.5, -0.5);
                [a, b, b, a]
            }
            SXdg => {
                let a = C64::new(0.5, -0.5);
                let b = C64::new(0.5, 0.5);
                [a, b, b, a]
            }
            RX => {
                let (s, c) = (p[0] / 2.0).sin_cos();
                [C64::new(c, 0.0), C64::new(0.0, -s), C64::new(0.0, -s), C64::new(c, 0.0)]
            }
            RY => {
                let (s, c) = (p[0] / 2.0).sin_cos();
                [C64::new(c, 0.0), C64::new(-s, 0.0), C64::new(s, 0.0), C64::new(c, 0.0)]
            }
            RZ => [
                C64::from_polar(1.0, -p[0] / 2.0),
                zero,
                zero,
                C64::from_polar(1.0, p[0] / 2.0),
            ],
            U1 => [one, zero, zero, C64::from_polar(1.0, p[0])],
            U2 => u3(FRAC_PI_2, p[0], p[1]),
            U3 => u3(p[0], p[1], p[2]),
            _ => unreachable!("{self} is not a one-qubit gate"),
        }
    }

    /// Row-major 4x4 matrix. Callers must have validated arity.
    pub(crate) fn matrix_2q(self, p: &[f64]) -> [C64; 16] {
        use GateKind::*;
        let zero = C64::new(0.0, 0.0);
        let one = C64::new(1.0, 0.0);
        let i = C64::new(0.0, 1.0);
        let controlled = |u: [C64; 4]| {
            let mut m = [zero; 16];
            m[0] = one;
            m[5] = one;
            m[10] = u[0];
            m[11] = u[1];
            m[14] = u[2];
            m[15] = u[3];
            m
        };
        match self {
            CX => controlled(X.matrix_1q(&[])),
            CY => controlled(Y.matrix_1q(&[])),
            CZ => controlled(Z.matrix_1q(&[])),
            CH => controlled(H.matrix_1q(&[])),
            CRX => controlled(RX.matrix_1q(p)),
            CRY => controlled(RY.matrix_1q(p)),
            CRZ => controlled(RZ.matrix_1q(p)),
            Swap => {
                let mut m = [zero; 16];
                m[0] = one;
                m[6] = one;
                m[9] = one;
                m[15] = one;
                m
            }
            ISwap => {
                let mut m = [zero; 16];
                m[0] = one;
                m[6] = i;
                m[9] = i;
                m[15] = one;
                m
            }
            RXX | RYY => {
                let (s, c) = (p[0] / 2.0).sin_cos();
                let c = C64::new(c, 0.0);
                // -i sin(t/2) P(x)P; the anti-diagonal of YY carries signs (-1, 1, 1, -1).
                let (outer, inner) = if self == RXX { (1.0, 1.0) } else { (-1.0, 1.0) };
                let mut m = [zero; 16];
                m[0] = c;
                m[5] = c;
                m[10] = c;
                m[15] = c;
                m[3] = C64::new(0.0, -s * outer);
                m[12] = C64::new(0.0, -s * outer);
                m[6] = C64::new(0.0, -s * inner);
                m[9] = C64::new(0.0, -s * inner);
                m
            }
            RZZ => {
                let a = C64::from_polar(1.0, -p[0] / 2.0);
                let b = C64::from_polar(1.0, p[0] / 2.0);
                let mut m = [zero; 16];
                m[0] = a;
                m[5] = b;
                m[10] = b;
                m[15] = a;
                m
            }
            _ => unreachable!("{self} is not a two-qubit gate"),
        }
    }
}

fn u3(theta: f64, phi: f64, lambda: f64) -> [C64; 4] {
    let (s, c) = (theta / 2.0).sin_cos();
    [
        C64::new(c, 0.0),
        -C64::from_polar(s, lambda),
        C64::from_polar(s, phi),
        C64::from_polar(c, phi + lambda),
    ]
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GateKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        GateKind::from_name(s).ok_or_else(|| Error::Invalid(format!("unknown gate `{s}`")))
    }
}

/// Parameters of the inverse gate, or `None` when the inverse is a
/// different kind (S/Sdg, T/Tdg, SX/SXdg) or has no catalogue form.
pub(crate) fn inverse_kind_params(kind: GateKind, params: &[f64]) -> Option<(GateKind, Vec<f64>)> {
    use GateKind::*;
    let inv = match kind {
        k if k.is_self_inverse() => (k, Vec::new()),
        S => (Sdg, Vec::new()),
        Sdg => (S, Vec::new()),
        T => (Tdg, Vec::new()),
        Tdg => (T, Vec::new()),
        SX => (SXdg, Vec::new()),
        SXdg => (SX, Vec::new()),
        RX | RY | RZ | U1 | CRX | CRY | CRZ | RXX | RYY | RZZ => (kind, vec![-params[0]]),
        // U2(phi, lambda)^-1 = U3(-pi/2, -lambda, -phi) = U2(pi - lambda, pi - phi)
        U2 => (U2, vec![PI - params[1], PI - params[0]]),
        U3 => (U3, vec![-params[0], -params[2], -params[1]]),
        ISwap => return None,
        _ => unreachable!(),
    };
    Some(inv)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalogue_counts() {
        assert_eq!(SINGLE_QUBIT_KIND_COUNT, 10);
        assert_eq!(TWO_QUBIT_KIND_COUNT, 12);
        assert!(SINGLE_QUBIT_POOL.iter().all(|k| k.qubit_arity() == 1));
        assert!(TWO_QUBIT_POOL.iter().all(|k| k.qubit_arity() == 2));
    }

    #[test]
    fn names_round_trip() {
        for k in GateKind::ALL {
            assert_eq!(GateKind::from_name(k.name()), Some(k));
            assert_eq!(GateKind::from_name(&k.name().to_uppercase()), Some(k));
        }
        assert_eq!(GateKind::from_name("ccx"), None);
    }

    #[test]
    fn pauli_x_matrix() {
        let m = GateKind::X.matrix(&[]).unwrap();
        assert_eq!(m.get(0, 0), C64::new(0.0, 0.0));
        assert_eq!(m.get(0, 1), C64::new(1.0, 0.0));
        assert_eq!(m.get(1, 0), C64::new(1.0, 0.0));
        assert_eq!(m.get(1, 1), C64::new(0.0, 0.0));
    }

    #[test]
    fn ry_zero_is_identity() {
        let m = GateKind::RY.matrix(&[0.0]).unwrap();
        assert!(m.max_abs_diff(&UnitaryMatrix::identity(2)) < 1e-15);
    }

    #[test]
    fn ry_pi_flips_zero_to_one() {
        let m = GateKind::RY.matrix(&[PI]).unwrap();
        // column 0 is the image of |0>
        let p1 = m.get(1, 0).norm_sqr();
        assert!((p1 - 1.0).abs() < 1e-15);
        assert!(m.get(0, 0).norm_sqr() < 1e-30);
    }

    #[test]
    fn arity_error() {
        let err = GateKind::RY.matrix(&[]).unwrap_err();
        assert!(matches!(err, Error::ParamArity { expected: 1, got: 0, .. }));
    }

    #[test]
    fn every_kind_is_unitary() {
        for k in GateKind::ALL {
            let params: Vec<f64> = (0..k.param_arity()).map(|i| 0.37 + 1.1 * i as f64).collect();
            assert!(k.matrix(&params).unwrap().is_unitary(1e-12), "{k}");
        }
    }

    #[test]
    fn two_qubit_paulis_match_exponential() {
        // exp(-i t/2 P(x)P) = cos(t/2) I - i sin(t/2) P(x)P, with P(x)P built by kron.
        let t: f64 = 0.83;
        for (kind, p) in [(GateKind::RXX, GateKind::X), (GateKind::RYY, GateKind::Y), (GateKind::RZZ, GateKind::Z)] {
            let pm = p.matrix(&[]).unwrap();
            let pp = pm.kron(&pm);
            let (s, c) = (t / 2.0).sin_cos();
            let expected = UnitaryMatrix::identity(4)
                .scale(C64::new(c, 0.0))
                .add(&pp.scale(C64::new(0.0, -s)));
            let got = kind.matrix(&[t]).unwrap();
            assert!(got.max_abs_diff(&expected) < 1e-14, "{kind}");
        }
    }
}
