use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gate::{SINGLE_QUBIT_KIND_COUNT, TWO_QUBIT_KIND_COUNT};

/// Counting model for the probability that an unrelated party produces the
/// same watermark by chance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PpaConfig {
    pub n_qubits_incl_ancilla: u64,
    pub k_random_gates: u64,
    pub gate_pool_size: u64,
    pub rotation_gate_choices: u64,
    pub phase_resolution_steps: u64,
    pub placement_counts: Vec<u64>,
}

impl PpaConfig {
    /// Pool of 22 kinds, 10 rotation choices, pi/6 phase grid. Random gates
    /// alternate one-qubit (n placements) and two-qubit (n(n-1) ordered
    /// placements), starting with a one-qubit gate.
    pub fn for_host(n_qubits_incl_ancilla: u64, k_random_gates: u64) -> Self {
        let n = n_qubits_incl_ancilla;
        let placement_counts = (0..k_random_gates)
            .map(|i| if i % 2 == 0 { n } else { n * n.saturating_sub(1) })
            .collect();
        Self {
            n_qubits_incl_ancilla: n,
            k_random_gates,
            gate_pool_size: (SINGLE_QUBIT_KIND_COUNT + TWO_QUBIT_KIND_COUNT) as u64,
            rotation_gate_choices: SINGLE_QUBIT_KIND_COUNT as u64,
            phase_resolution_steps: 6,
            placement_counts,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let named = [
            ("n_qubits_incl_ancilla", self.n_qubits_incl_ancilla),
            ("k_random_gates", self.k_random_gates),
            ("gate_pool_size", self.gate_pool_size),
            ("rotation_gate_choices", self.rotation_gate_choices),
            ("phase_resolution_steps", self.phase_resolution_steps),
        ];
        for (name, v) in named {
            if v == 0 {
                return Err(Error::Ppa(format!("{name} must be at least 1")));
            }
        }
        if self.k_random_gates > self.gate_pool_size {
            return Err(Error::Ppa(format!(
                "cannot choose {} gates from a pool of {}",
                self.k_random_gates, self.gate_pool_size
            )));
        }
        if self.placement_counts.contains(&0) {
            return Err(Error::Ppa("placement counts must be at least 1".into()));
        }
        Ok(())
    }
}

/// `C(n, k)` without overflow for the sizes used here.
pub fn binomial(n: u64, k: u64) -> u128 {
    let k = k.min(n - k.min(n));
    (0..k).fold(1u128, |acc, i| acc * u128::from(n - i) / u128::from(i + 1))
}

/// Number of distinct watermarks the configuration can produce.
pub fn watermark_count(config: &PpaConfig) -> Result<u128> {
    config.validate()?;
    let mut n = binomial(config.gate_pool_size, config.k_random_gates);
    for &p in &config.placement_counts {
        n = n
            .checked_mul(u128::from(p))
            .ok_or_else(|| Error::Ppa("count overflows".into()))?;
    }
    Ok(n * u128::from(config.rotation_gate_choices) * u128::from(config.phase_resolution_steps))
}

pub fn ppa(config: &PpaConfig) -> Result<f64> {
    Ok(1.0 / watermark_count(config)? as f64)
}

#[cfg(test)]
mod tests {
    use std::collections::HashSet;

    use super::*;
    use crate::gate::SINGLE_QUBIT_POOL;

    #[test]
    fn four_qubit_host() {
        let c = PpaConfig::for_host(4, 2);
        assert_eq!(c.placement_counts, vec![4, 12]);
        assert_eq!(watermark_count(&c).unwrap(), 231 * 4 * 12 * 10 * 6);
        assert_eq!(watermark_count(&c).unwrap(), 665_280);
        let p = ppa(&c).unwrap();
        assert_eq!(p, 1.0 / 665_280.0);
        assert_eq!(format!("{p:.1e}"), "1.5e-6");
        assert!(((p - 1.5032e-6) / 1.5032e-6).abs() < 1e-4, "{p}");
    }

    #[test]
    fn unit_counts() {
        let c = PpaConfig {
            n_qubits_incl_ancilla: 1,
            k_random_gates: 1,
            gate_pool_size: 1,
            rotation_gate_choices: 1,
            phase_resolution_steps: 1,
            placement_counts: vec![1],
        };
        assert_eq!(ppa(&c).unwrap(), 1.0);
    }

    #[test]
    fn brute_force_single_gate() {
        let c = PpaConfig {
            n_qubits_incl_ancilla: 3,
            k_random_gates: 1,
            gate_pool_size: 10,
            rotation_gate_choices: 10,
            phase_resolution_steps: 6,
            placement_counts: vec![3],
        };
        let mut seen = HashSet::new();
        for g in SINGLE_QUBIT_POOL {
            for q in 0..3 {
                for r in SINGLE_QUBIT_POOL {
                    for phase in 1..=6 {
                        seen.insert((g, q, r, phase));
                    }
                }
            }
        }
        assert_eq!(watermark_count(&c).unwrap(), seen.len() as u128);
    }

    #[test]
    fn zero_counts_rejected() {
        let mut c = PpaConfig::for_host(4, 2);
        c.phase_resolution_steps = 0;
        assert!(matches!(ppa(&c), Err(Error::Ppa(_))));
        let mut c = PpaConfig::for_host(4, 2);
        c.placement_counts[1] = 0;
        assert!(ppa(&c).is_err());
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(22, 2), 231);
        assert_eq!(binomial(22, 0), 1);
        assert_eq!(binomial(5, 5), 1);
        assert_eq!(binomial(10, 3), 120);
    }
}
