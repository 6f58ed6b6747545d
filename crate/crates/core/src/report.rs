//! Self-contained JSON reports for solver runs.
//!
//! Reports echo the inputs (paths plus content hashes, parameters, seeds) so
//! a run can be reproduced from its report alone. Field order is fixed by the
//! struct definitions; apart from the `runtime` section a report is a pure
//! function of its inputs.

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::adaptive::AdaptiveSolution;
use crate::fixed::FixedSolution;
use crate::game::{Delay, ThresholdSchedule, Timestep};

/// Hex-encoded SHA-256 of raw input bytes.
pub fn sha256_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct ReportInputs {
    /// Where the damage series came from (`file:...`, `builtin:case-study`).
    pub damage_source: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub damage_sha256: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    /// Where the curve came from (`file:...`, `fit-exp:...`, `sim:...`).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub curve_source: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub curve_sha256: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fp_cost: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub change_cost: Option<f64>,
    pub horizon: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dp_mode: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SolutionRecord {
    Fixed {
        #[serde(flatten)]
        solution: FixedSolution,
    },
    Adaptive {
        changes: usize,
        #[serde(flatten)]
        solution: AdaptiveSolution,
    },
    FixedBestResponse {
        delay: Delay,
        best_response: Timestep,
        attacker_payoff: f64,
    },
    AdaptiveBestResponse {
        schedule: ThresholdSchedule,
        best_response: Timestep,
        attacker_payoff: f64,
    },
    MinCost {
        cap: f64,
        feasible: bool,
        #[serde(skip_serializing_if = "Option::is_none")]
        total_cost: Option<f64>,
        #[serde(skip_serializing_if = "Option::is_none")]
        schedule: Option<ThresholdSchedule>,
    },
}

/// Attacker payoff at one candidate start time.
#[derive(Debug, Clone, Serialize)]
pub struct TracePoint {
    pub start: Timestep,
    pub payoff: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RuntimeStats {
    pub elapsed_ms: u64,
    pub threads: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct SolutionReport {
    pub command: String,
    pub inputs: ReportInputs,
    pub solution: SolutionRecord,
    /// Attacker payoff for every start time against the reported strategy.
    pub best_response_trace: Vec<TracePoint>,
    pub runtime: RuntimeStats,
}

impl SolutionReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail")
    }
}
