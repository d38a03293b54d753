//! JSON result documents.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::analysis::{CompareInput, ComparisonReport, Estimate};
use crate::qft::CountLedger;
use crate::shor::{ShorConfig, ShorOutcome};
use crate::sim::OutcomeDistribution;

pub const TOOL_NAME: &str = "semiqft";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum TransformMode {
    Standard,
    Semiclassical,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum RegisterChoice {
    /// Recycled when the input factors across blocks, full otherwise.
    #[default]
    Auto,
    Full,
    Recycled,
}

/// Input state: a bitstring written most significant bit first, or a seeded
/// random state.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InputSpec {
    Basis(String),
    Random,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum RunRequest {
    Qft {
        n: usize,
        mode: TransformMode,
        t: Option<usize>,
        register: RegisterChoice,
        input: InputSpec,
        shots: Option<u64>,
        seed: u64,
        noise_p: Option<f64>,
        trajectories: usize,
        emit_qasm: Option<String>,
    },
    Shor {
        #[serde(rename = "N")]
        modulus: u64,
        x: u64,
        t: usize,
        shots: u64,
        seed: u64,
        attempts: usize,
        exact: bool,
        compiled: bool,
    },
    Decompose {
        k: i64,
        emit_qasm: Option<String>,
    },
    Compare {
        noise_p: f64,
        trajectories: usize,
        seed: u64,
        input: CompareInput,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShorSection {
    pub config: ShorConfig,
    pub succeeded: bool,
    pub outcome: ShorOutcome,
    pub attempts: Vec<ShorOutcome>,
    /// Shot counts keyed by `c`.
    pub counts: BTreeMap<u64, u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecompositionSection {
    pub k: i64,
    pub alpha: String,
    pub a: String,
    pub b: String,
    pub c: String,
    pub identity_residual: f64,
    pub reconstruction_residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultDocument {
    pub tool: String,
    pub version: String,
    pub request: RunRequest,
    pub seed: Option<u64>,
    /// Probability of each outcome `c = Σ 2^j c_j`.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub distribution: Option<BTreeMap<u64, f64>>,
    /// The same outcomes written `c_0 c_1 … c_{n-1}`, first measured bit first.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub bitstrings: Option<BTreeMap<u64, String>>,
    /// Counts of the executed circuit after lowering.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub gate_counts: Option<CountLedger>,
    /// Closed-form resources of a recycled run.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub resources: Option<CountLedger>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub gamma: Option<Estimate>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub comparison: Option<ComparisonReport>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub shor: Option<ShorSection>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub decomposition: Option<DecompositionSection>,
}

impl ResultDocument {
    pub fn new(request: RunRequest, seed: Option<u64>) -> Self {
        Self {
            tool: TOOL_NAME.into(),
            version: TOOL_VERSION.into(),
            request,
            seed,
            distribution: None,
            bitstrings: None,
            gate_counts: None,
            resources: None,
            gamma: None,
            comparison: None,
            shor: None,
            decomposition: None,
        }
    }

    pub fn set_distribution(&mut self, d: &OutcomeDistribution) {
        let bits = d.bits();
        self.bitstrings = Some(
            d.iter()
                .map(|(c, _)| {
                    (
                        c,
                        (0..bits)
                            .map(|b| if c >> b & 1 == 1 { '1' } else { '0' })
                            .collect(),
                    )
                })
                .collect(),
        );
        self.distribution = Some(d.as_map().clone());
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("document is always serializable")
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips_losslessly() {
        let mut doc = ResultDocument::new(
            RunRequest::Decompose {
                k: 4,
                emit_qasm: None,
            },
            None,
        );
        let d =
            OutcomeDistribution::new(3, [(0u64, 1.0 / 3.0), (5, 2.0 / 3.0)].into_iter().collect())
                .unwrap();
        doc.set_distribution(&d);
        let text = doc.to_json();
        assert!(text.contains("\"5\": 0.6666666666666666"));
        assert!(text.contains("\"5\": \"101\""));
        assert_eq!(ResultDocument::from_json(&text).unwrap(), doc);
    }
}
