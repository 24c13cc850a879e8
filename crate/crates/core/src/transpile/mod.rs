//! Lowering to native gates, SWAP routing, and barrier-respecting peephole
//! optimization.

mod basis;
mod coupling;
mod optimize;
mod route;

pub use basis::{decompose_to_basis, zyz_angles, BasisSet};
pub use coupling::{CouplingMap, PRESET_NAMES};
pub use optimize::{optimize, MAX_SWEEPS};
pub use route::{route, Layout, RoutedCircuit, SwapRecord};

pub(crate) use basis::lower_into;

use crate::circuit::Circuit;
use crate::error::Result;

#[derive(Debug, Clone)]
pub struct TranspileOptions {
    pub basis: BasisSet,
    pub coupling: Option<CouplingMap>,
    pub layout: Option<Layout>,
    pub optimize: bool,
}

impl TranspileOptions {
    pub fn new(basis: BasisSet) -> Self {
        Self {
            basis,
            coupling: None,
            layout: None,
            optimize: true,
        }
    }

    pub fn with_coupling(mut self, map: CouplingMap) -> Self {
        self.coupling = Some(map);
        self
    }
}

/// Decompose, route with SWAPs kept whole, optimize, then lower the SWAPs.
/// Lowering last keeps each routed SWAP a contiguous three-CX pattern.
pub fn transpile(circuit: &Circuit, opts: &TranspileOptions) -> Result<RoutedCircuit> {
    let lowered = decompose_to_basis(circuit, &opts.basis)?;
    let mut routed = match &opts.coupling {
        Some(map) => route(&lowered, map, opts.layout.as_ref(), false)?,
        None => RoutedCircuit::unrouted(lowered),
    };
    if opts.optimize {
        routed.circuit = optimize(&routed.circuit);
    }
    routed.circuit = decompose_to_basis(&routed.circuit, &opts.basis)?;
    Ok(routed)
}
