use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Outcome statistics over an ordered list of measured qubits.
///
/// Keys are bitstrings with one character per listed qubit, most significant
/// first: the last character is `qubits[0]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DistJson", into = "DistJson")]
pub struct Distribution {
    qubits: Vec<usize>,
    outcomes: Outcomes,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Outcomes {
    Counts(BTreeMap<String, u64>),
    Probabilities(BTreeMap<String, f64>),
}

#[derive(Serialize, Deserialize)]
struct DistJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    shots: Option<u64>,
    qubits: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    counts: Option<BTreeMap<String, u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    probabilities: Option<BTreeMap<String, f64>>,
}

impl TryFrom<DistJson> for Distribution {
    type Error = Error;

    fn try_from(j: DistJson) -> Result<Self> {
        match (j.counts, j.probabilities) {
            (Some(c), None) => {
                let d = Distribution::from_counts(j.qubits, c)?;
                if let Some(s) = j.shots {
                    if Some(s) != d.shots() {
                        return Err(Error::Distribution(format!("shots {s} disagrees with counts")));
                    }
                }
                Ok(d)
            }
            (None, Some(p)) => Distribution::from_probabilities(j.qubits, p),
            _ => Err(Error::Distribution("need exactly one of counts, probabilities".into())),
        }
    }
}

impl From<Distribution> for DistJson {
    fn from(d: Distribution) -> Self {
        let shots = d.shots();
        let (counts, probabilities) = match d.outcomes {
            Outcomes::Counts(c) => (Some(c), None),
            Outcomes::Probabilities(p) => (None, Some(p)),
        };
        DistJson {
            shots,
            qubits: d.qubits,
            counts,
            probabilities,
        }
    }
}

/// Bitstring for `value` over `width` bits, most significant first.
pub fn format_bits(value: u64, width: usize) -> String {
    (0..width)
        .rev()
        .map(|k| if (value >> k) & 1 == 1 { '1' } else { '0' })
        .collect()
}

fn check_keys<'a>(width: usize, keys: impl Iterator<Item = &'a String>) -> Result<()> {
    for k in keys {
        if k.len() != width || !k.bytes().all(|b| b == b'0' || b == b'1') {
            return Err(Error::Distribution(format!("outcome `{k}` is not a {width}-bit string")));
        }
    }
    Ok(())
}

fn check_qubits(qubits: &[usize]) -> Result<()> {
    for (i, q) in qubits.iter().enumerate() {
        if qubits[..i].contains(q) {
            return Err(Error::Distribution(format!("qubit {q} listed twice")));
        }
    }
    Ok(())
}

impl Distribution {
    pub fn from_counts(qubits: Vec<usize>, counts: BTreeMap<String, u64>) -> Result<Self> {
        check_qubits(&qubits)?;
        check_keys(qubits.len(), counts.keys())?;
        if counts.values().sum::<u64>() == 0 {
            return Err(Error::Distribution("no shots".into()));
        }
        let counts = counts.into_iter().filter(|(_, c)| *c > 0).collect();
        Ok(Self {
            qubits,
            outcomes: Outcomes::Counts(counts),
        })
    }

    /// Probabilities must sum to 1 within 1e-9.
    pub fn from_probabilities(qubits: Vec<usize>, probs: BTreeMap<String, f64>) -> Result<Self> {
        check_qubits(&qubits)?;
        check_keys(qubits.len(), probs.keys())?;
        if probs.values().any(|p| !(0.0..=1.0 + 1e-12).contains(p)) {
            return Err(Error::Distribution("probability outside [0, 1]".into()));
        }
        let total: f64 = probs.values().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::Distribution(format!("probabilities sum to {total}")));
        }
        Ok(Self {
            qubits,
            outcomes: Outcomes::Probabilities(probs),
        })
    }

    /// Builds from a dense table indexed by outcome value, dropping
    /// entries below 1e-14.
    pub(crate) fn from_dense(qubits: Vec<usize>, table: &[f64]) -> Self {
        let width = qubits.len();
        let probs = table
            .iter()
            .enumerate()
            .filter(|(_, p)| **p > 1e-14)
            .map(|(i, p)| (format_bits(i as u64, width), *p))
            .collect();
        Self {
            qubits,
            outcomes: Outcomes::Probabilities(probs),
        }
    }

    pub(crate) fn from_dense_counts(qubits: Vec<usize>, table: &[u64]) -> Self {
        let width = qubits.len();
        let counts = table
            .iter()
            .enumerate()
            .filter(|(_, c)| **c > 0)
            .map(|(i, c)| (format_bits(i as u64, width), *c))
            .collect();
        Self {
            qubits,
            outcomes: Outcomes::Counts(counts),
        }
    }

    pub fn qubits(&self) -> &[usize] {
        &self.qubits
    }

    pub fn outcomes(&self) -> &Outcomes {
        &self.outcomes
    }

    pub fn shots(&self) -> Option<u64> {
        match &self.outcomes {
            Outcomes::Counts(c) => Some(c.values().sum()),
            Outcomes::Probabilities(_) => None,
        }
    }

    pub fn count(&self, key: &str) -> Option<u64> {
        match &self.outcomes {
            Outcomes::Counts(c) => Some(c.get(key).copied().unwrap_or(0)),
            Outcomes::Probabilities(_) => None,
        }
    }

    /// Normalized probabilities; counts are divided by shots.
    pub fn probabilities(&self) -> BTreeMap<String, f64> {
        match &self.outcomes {
            Outcomes::Probabilities(p) => p.clone(),
            Outcomes::Counts(c) => {
                let total = c.values().sum::<u64>() as f64;
                c.iter().map(|(k, v)| (k.clone(), *v as f64 / total)).collect()
            }
        }
    }

    pub fn probability(&self, key: &str) -> f64 {
        match &self.outcomes {
            Outcomes::Probabilities(p) => p.get(key).copied().unwrap_or(0.0),
            Outcomes::Counts(c) => {
                let total = c.values().sum::<u64>() as f64;
                c.get(key).copied().unwrap_or(0) as f64 / total
            }
        }
    }

    /// Most likely outcome; ties go to the smallest key.
    pub fn most_probable(&self) -> Option<String> {
        let probs = self.probabilities();
        let mut best: Option<(&String, f64)> = None;
        for (k, &p) in &probs {
            if best.is_none_or(|(_, bp)| p > bp) {
                best = Some((k, p));
            }
        }
        best.map(|(k, _)| k.clone())
    }

    /// Sums out every measured qubit not in `keep`; the result lists `keep`
    /// in the given order.
    pub fn marginalize(&self, keep: &[usize]) -> Result<Distribution> {
        check_qubits(keep)?;
        let width = self.qubits.len();
        let pos: Vec<usize> = keep
            .iter()
            .map(|q| {
                self.qubits
                    .iter()
                    .position(|m| m == q)
                    .ok_or_else(|| Error::Distribution(format!("qubit {q} was not measured")))
            })
            .collect::<Result<_>>()?;
        let project = |key: &str| -> String {
            let bytes = key.as_bytes();
            (0..keep.len())
                .rev()
                .map(|k| bytes[width - 1 - pos[k]] as char)
                .collect()
        };
        let outcomes = match &self.outcomes {
            Outcomes::Counts(c) => {
                let mut m = BTreeMap::new();
                for (k, v) in c {
                    *m.entry(project(k)).or_insert(0) += v;
                }
                Outcomes::Counts(m)
            }
            Outcomes::Probabilities(p) => {
                let mut m = BTreeMap::new();
                for (k, v) in p {
                    *m.entry(project(k)).or_insert(0.0) += v;
                }
                Outcomes::Probabilities(m)
            }
        };
        Ok(Distribution {
            qubits: keep.to_vec(),
            outcomes,
        })
    }

    /// Renames the qubit labels; outcome keys are untouched.
    pub fn relabel(&self, map: impl Fn(usize) -> usize) -> Result<Distribution> {
        let qubits: Vec<usize> = self.qubits.iter().map(|&q| map(q)).collect();
        check_qubits(&qubits)?;
        Ok(Distribution {
            qubits,
            outcomes: self.outcomes.clone(),
        })
    }

    /// XORs every outcome with `mask`, a bitstring of the same width.
    pub fn flip_bits(&self, mask: &str) -> Result<Distribution> {
        check_keys(self.qubits.len(), std::iter::once(&mask.to_string()))?;
        let flip = |k: &str| -> String {
            k.bytes()
                .zip(mask.bytes())
                .map(|(a, m)| if (a == b'1') ^ (m == b'1') { '1' } else { '0' })
                .collect()
        };
        let outcomes = match &self.outcomes {
            Outcomes::Counts(c) => Outcomes::Counts(c.iter().map(|(k, v)| (flip(k), *v)).collect()),
            Outcomes::Probabilities(p) => Outcomes::Probabilities(p.iter().map(|(k, v)| (flip(k), *v)).collect()),
        };
        Ok(Distribution {
            qubits: self.qubits.clone(),
            outcomes,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn probs(qubits: Vec<usize>, items: &[(&str, f64)]) -> Distribution {
        Distribution::from_probabilities(qubits, items.iter().map(|(k, v)| (k.to_string(), *v)).collect()).unwrap()
    }

    #[test]
    fn marginal_over_everything_is_identity() {
        let d = probs(vec![0, 1], &[("00", 0.5), ("11", 0.5)]);
        assert_eq!(d.marginalize(&[0, 1]).unwrap(), d);
    }

    #[test]
    fn bell_marginal() {
        let d = probs(vec![0, 1], &[("00", 0.5), ("11", 0.5)]);
        let m = d.marginalize(&[0]).unwrap();
        assert_eq!(m.probability("0"), 0.5);
        assert_eq!(m.probability("1"), 0.5);
    }

    #[test]
    fn marginal_matches_brute_force() {
        // key "abc" lists qubits [0,1,2] so c is qubit 0 and a is qubit 2
        let table = [0.05, 0.1, 0.15, 0.2, 0.12, 0.08, 0.18, 0.12];
        let d = Distribution::from_dense(vec![0, 1, 2], &table);
        let m = d.marginalize(&[2]).unwrap();
        let p1: f64 = (0..8).filter(|i| i & 4 != 0).map(|i| table[i]).sum();
        assert!((m.probability("1") - p1).abs() < 1e-15);
        // reorder: keep [2, 0] means key "q0 q2"
        let m = d.marginalize(&[2, 0]).unwrap();
        let p: f64 = (0..8).filter(|i| i & 1 == 1 && i & 4 == 0).map(|i| table[i]).sum();
        assert!((m.probability("10") - p).abs() < 1e-15);
    }

    #[test]
    fn unmeasured_qubit_rejected() {
        let d = probs(vec![3], &[("1", 1.0)]);
        assert!(matches!(d.marginalize(&[0]), Err(Error::Distribution(_))));
    }

    #[test]
    fn json_round_trip() {
        let counts: BTreeMap<String, u64> = [("0".to_string(), 125), ("1".to_string(), 875)].into();
        let d = Distribution::from_counts(vec![4], counts).unwrap();
        let s = serde_json::to_string(&d).unwrap();
        assert_eq!(s, r#"{"shots":1000,"qubits":[4],"counts":{"0":125,"1":875}}"#);
        assert_eq!(serde_json::from_str::<Distribution>(&s).unwrap(), d);
        assert!(serde_json::from_str::<Distribution>(r#"{"qubits":[0],"probabilities":{"0":0.4}}"#).is_err());
    }

    #[test]
    fn flip_mask() {
        let d = probs(vec![0, 1], &[("01", 0.25), ("10", 0.75)]);
        let f = d.flip_bits("01").unwrap();
        assert_eq!(f.probability("00"), 0.25);
        assert_eq!(f.probability("11"), 0.75);
    }
}
