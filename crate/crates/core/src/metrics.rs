//! Distribution distances, success rates, and the rotation-phase sweep.

use std::collections::BTreeSet;
use std::f64::consts::TAU;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::par::{map_indexed, Exec};
use crate::seed;
use crate::simulate::{exact_distribution, measured_qubits, sample, to_logical, Distribution, NoiseModel};
use crate::transpile::{transpile, BasisSet, CouplingMap, TranspileOptions};
use crate::watermark::{embed_rotation, RotationSpec};

/// Total variation distance over the union of outcome keys.
pub fn tvd(a: &Distribution, b: &Distribution) -> Result<f64> {
    let (pa, pb) = (a.probabilities(), b.probabilities());
    if pa.is_empty() || pb.is_empty() {
        return Err(Error::Distribution("cannot compare an empty distribution".into()));
    }
    let keys: BTreeSet<&String> = pa.keys().chain(pb.keys()).collect();
    let half_sum = 0.5
        * keys
            .into_iter()
            .map(|k| (pa.get(k).copied().unwrap_or(0.0) - pb.get(k).copied().unwrap_or(0.0)).abs())
            .sum::<f64>();
    Ok(half_sum.clamp(0.0, 1.0))
}

/// Fraction of shots equal to `reference`.
pub fn pst(observed: &Distribution, reference: &str) -> Result<f64> {
    match observed.shots() {
        None => Err(Error::Distribution("success rate needs shot counts".into())),
        Some(0) => Err(Error::Distribution("no shots".into())),
        Some(n) => Ok(observed.count(reference).unwrap_or(0) as f64 / n as f64),
    }
}

/// Noiseless most likely outcome of `circuit` on `|input>`.
pub fn pst_reference(circuit: &Circuit, input: usize) -> Result<String> {
    exact_distribution(circuit, input)?
        .most_probable()
        .ok_or_else(|| Error::Distribution("empty outcome table".into()))
}

/// A backend stand-in: connectivity, native gates, and noise.
#[derive(Debug, Clone)]
pub struct BackendConfig {
    pub name: String,
    pub coupling: Option<CouplingMap>,
    pub basis: BasisSet,
    pub noise: Option<NoiseModel>,
}

impl BackendConfig {
    pub fn ideal(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            coupling: None,
            basis: BasisSet::ibm(),
            noise: None,
        }
    }

    pub fn new(name: impl Into<String>, coupling: Option<CouplingMap>, noise: Option<NoiseModel>) -> Self {
        Self {
            coupling,
            noise,
            ..Self::ideal(name)
        }
    }

    fn is_noiseless(&self) -> bool {
        self.noise.is_none_or(|n| n.is_noiseless())
    }
}

/// Transpiles for `config`, runs, and returns outcomes over the circuit's
/// own measured qubits. Noiseless configs give exact probabilities; noisy ones give counts.
pub fn run_on(circuit: &Circuit, config: &BackendConfig, input: usize, shots: u64, seed: u64, exec: Exec) -> Result<Distribution> {
    let mut opts = TranspileOptions::new(config.basis.clone());
    opts.coupling = config.coupling.clone();
    let routed = transpile(circuit, &opts)?;
    let physical_input = (0..circuit.num_qubits())
        .filter(|&q| (input >> q) & 1 == 1)
        .fold(0usize, |acc, q| acc | (1 << routed.initial_layout.physical(q)));
    let dist = if config.is_noiseless() {
        exact_distribution(&routed.circuit, physical_input)?
    } else {
        sample(&routed.circuit, physical_input, shots, seed, config.noise.as_ref(), exec)?
    };
    // key order follows the input circuit's readout, not the device wires
    to_logical(&routed, &dist)?.marginalize(&measured_qubits(circuit))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseSweepResult {
    pub thetas: Vec<f64>,
    pub configs: Vec<String>,
    /// `tvds[i][c]`: theta `i` under config `c`.
    pub tvds: Vec<Vec<f64>>,
    /// Per-theta sum over configs.
    pub sum_over_configs: Vec<f64>,
    /// Theta with the largest summed TVD; earliest wins ties.
    pub argmax_theta: f64,
}

impl PhaseSweepResult {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("theta,config,tvd\n");
        for (theta, row) in self.thetas.iter().zip(&self.tvds) {
            for (name, t) in self.configs.iter().zip(row) {
                writeln!(out, "{theta},{name},{t}").expect("writing to a string");
            }
        }
        out
    }
}

#[derive(Debug, Clone)]
pub struct PhaseSweep {
    /// Designated ancillas; empty adds a fresh one.
    pub ancillas: Vec<usize>,
    pub target: Option<usize>,
    pub cnot: Option<(usize, usize)>,
    pub grid_steps: usize,
    pub input: usize,
    pub shots: u64,
    pub seed: u64,
}

/// `theta_k = 2 pi k / steps` for `k < steps`.
pub fn phase_grid(steps: usize) -> Vec<f64> {
    (0..steps).map(|k| TAU * k as f64 / steps as f64).collect()
}

/// Embeds the rotation at every grid phase, runs it under every config, and
/// compares the rotated qubit's marginal with the unmarked host's, which is
/// run once under the first config.
pub fn phase_sweep(host: &Circuit, sweep: &PhaseSweep, configs: &[BackendConfig], exec: Exec) -> Result<PhaseSweepResult> {
    if sweep.grid_steps < 4 {
        return Err(Error::Invalid("phase grid needs at least 4 steps".into()));
    }
    let first = configs
        .first()
        .ok_or_else(|| Error::Invalid("phase sweep needs at least one backend config".into()))?;
    let thetas = phase_grid(sweep.grid_steps);
    let spec_at = |theta| RotationSpec::new(sweep.ancillas.clone(), sweep.target, theta, sweep.cnot);

    // the marked width and rotated qubit do not depend on theta
    let (probe, record) = embed_rotation(host, &spec_at(0.0))?;
    let rotated = record.entries[0].qubits[0];
    let mut baseline = host.clone();
    baseline.widen(probe.num_qubits());
    let base_seed = seed::derive(sweep.seed, "sweep-baseline", 0);
    let reference = run_on(&baseline, first, sweep.input, sweep.shots, base_seed, exec)?.marginalize(&[rotated])?;

    let n_cfg = configs.len();
    let flat = map_indexed(exec, thetas.len() * n_cfg, |job| -> Result<f64> {
        let (i, c) = (job / n_cfg, job % n_cfg);
        let (marked, _) = embed_rotation(host, &spec_at(thetas[i]))?;
        let s = seed::derive(sweep.seed, "sweep", job as u64);
        // shots inside one job stay sequential; jobs already fan out
        let d = run_on(&marked, &configs[c], sweep.input, sweep.shots, s, Exec::Sequential)?;
        tvd(&d.marginalize(&[rotated])?, &reference)
    });
    let flat: Vec<f64> = flat.into_iter().collect::<Result<_>>()?;
    let tvds: Vec<Vec<f64>> = flat.chunks(n_cfg).map(<[f64]>::to_vec).collect();
    let sum_over_configs: Vec<f64> = tvds.iter().map(|r| r.iter().sum()).collect();
    let mut best = 0;
    for (i, s) in sum_over_configs.iter().enumerate() {
        if *s > sum_over_configs[best] {
            best = i;
        }
    }
    Ok(PhaseSweepResult {
        argmax_theta: thetas[best],
        thetas,
        configs: configs.iter().map(|c| c.name.clone()).collect(),
        tvds,
        sum_over_configs,
    })
}
