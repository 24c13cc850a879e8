//! Ownership watermarks for quantum circuits.
//!
//! Two embedding schemes are provided: a rotation on an ancilla qubit
//! entangled by a CNOT at the circuit output, and a random gate block followed
//! by its inverse behind a barrier. [`extract`] recovers the watermark gates
//! from a transpiled copy by normalizing away routing SWAPs and diffing gate
//! multisets against the transpiled original.
//!
//! Conventions: qubit 0 is the least significant bit of a basis-state index,
//! and bitstrings are printed most significant first, so the last character
//! of an outcome belongs to the first listed qubit.

pub mod circuit;
pub mod error;
pub mod extract;
pub mod fixtures;
pub mod gate;
mod kernel;
pub mod metrics;
pub mod par;
pub mod qaoa;
pub mod qasm;
pub mod seed;
pub mod simulate;
pub mod transpile;
pub mod unitary;
pub mod watermark;

pub use circuit::{inverse_of, inverse_sequence, Circuit, Gate, Instruction};
pub use error::{Error, Result};
pub use gate::GateKind;
pub use unitary::{unitary_of, UnitaryMatrix};
