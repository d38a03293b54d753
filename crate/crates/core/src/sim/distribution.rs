use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::SimError;

/// Probabilities must sum to one within this tolerance.
pub const DISTRIBUTION_TOLERANCE: f64 = 1e-9;

/// Probability of each classical outcome `c = Σ 2^j c_j` over `bits` output bits.
///
/// Outcomes absent from the map have probability zero.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OutcomeDistribution {
    bits: usize,
    probabilities: BTreeMap<u64, f64>,
}

impl OutcomeDistribution {
    pub fn new(bits: usize, probabilities: BTreeMap<u64, f64>) -> Result<Self, SimError> {
        let mut total = 0.0;
        for (&c, &p) in &probabilities {
            if bits < 64 && c >> bits != 0 {
                return Err(SimError::InvalidState(format!(
                    "outcome {c} does not fit in {bits} bits"
                )));
            }
            if !(-1e-12..=1.0 + 1e-12).contains(&p) {
                return Err(SimError::InvalidState(format!("probability {p} for {c}")));
            }
            total += p;
        }
        if (total - 1.0).abs() > DISTRIBUTION_TOLERANCE {
            return Err(SimError::InvalidState(format!(
                "probabilities sum to {total}"
            )));
        }
        Ok(Self {
            bits,
            probabilities,
        })
    }

    /// Dense probabilities indexed by outcome.
    pub fn from_dense(bits: usize, dense: &[f64]) -> Result<Self, SimError> {
        let map = dense
            .iter()
            .enumerate()
            .filter(|(_, &p)| p != 0.0)
            .map(|(c, &p)| (c as u64, p))
            .collect();
        Self::new(bits, map)
    }

    pub fn uniform(bits: usize) -> Self {
        let p = 1.0 / (1u64 << bits) as f64;
        Self {
            bits,
            probabilities: (0..1u64 << bits).map(|c| (c, p)).collect(),
        }
    }

    pub fn bits(&self) -> usize {
        self.bits
    }

    pub fn probability(&self, outcome: u64) -> f64 {
        self.probabilities.get(&outcome).copied().unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, f64)> + '_ {
        self.probabilities.iter().map(|(&c, &p)| (c, p))
    }

    pub fn as_map(&self) -> &BTreeMap<u64, f64> {
        &self.probabilities
    }

    /// Outcomes with probability above `threshold`.
    pub fn support(&self, threshold: f64) -> Vec<u64> {
        self.iter()
            .filter(|&(_, p)| p > threshold)
            .map(|(c, _)| c)
            .collect()
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let mut dense = vec![0.0; 1 << self.bits];
        for (c, p) in self.iter() {
            dense[c as usize] = p;
        }
        dense
    }

    /// Half the L1 distance. Both distributions must share an outcome space.
    pub fn total_variation(&self, other: &OutcomeDistribution) -> Result<f64, SimError> {
        if self.bits != other.bits {
            return Err(SimError::WidthMismatch {
                expected: self.bits,
                found: other.bits,
            });
        }
        let mut keys: Vec<u64> = self.probabilities.keys().copied().collect();
        keys.extend(other.probabilities.keys().copied());
        keys.sort_unstable();
        keys.dedup();
        Ok(0.5
            * keys
                .into_iter()
                .map(|c| (self.probability(c) - other.probability(c)).abs())
                .sum::<f64>())
    }
}

/// Shot counts from sampled runs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counts {
    pub bits: usize,
    pub shots: u64,
    pub counts: BTreeMap<u64, u64>,
}

impl Counts {
    pub fn from_outcomes(bits: usize, outcomes: &[u64]) -> Self {
        let mut counts = BTreeMap::new();
        for &c in outcomes {
            *counts.entry(c).or_insert(0) += 1;
        }
        Self {
            bits,
            shots: outcomes.len() as u64,
            counts,
        }
    }

    /// Empirical frequencies.
    pub fn to_distribution(&self) -> OutcomeDistribution {
        let shots = self.shots as f64;
        OutcomeDistribution {
            bits: self.bits,
            probabilities: self
                .counts
                .iter()
                .map(|(&c, &k)| (c, k as f64 / shots))
                .collect(),
        }
    }
}
