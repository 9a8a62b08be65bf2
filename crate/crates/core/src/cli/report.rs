//! The JSON run report shared by all subcommands.

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

pub const TOOL: &str = "conefix";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    SaddleFound,
    FixedPointFound,
    NoConvergence,
    HypothesesNotSatisfied,
    PreconditionViolation,
    Vacuous,
    /// A diagnostic subcommand finished; its results carry the verdicts.
    Completed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SubcommandName {
    Fixpoint,
    Game,
    Intersect,
    Mnc,
    Check,
}

/// Field order is the serialized order; `timing_ms` is last so golden
/// comparisons can drop it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunReport {
    pub tool: String,
    pub version: String,
    pub subcommand: SubcommandName,
    /// SHA-256 of the raw input bytes, lowercase hex.
    pub input_digest: String,
    pub seed: Option<u64>,
    pub outcome: Outcome,
    pub results: Value,
    pub hypotheses: Value,
    pub timing_ms: f64,
}

impl RunReport {
    pub fn new(subcommand: SubcommandName, input: &[u8], seed: Option<u64>) -> Self {
        RunReport {
            tool: TOOL.into(),
            version: env!("CARGO_PKG_VERSION").into(),
            subcommand,
            input_digest: digest_hex(input),
            seed,
            outcome: Outcome::Completed,
            results: Value::Null,
            hypotheses: Value::Null,
            timing_ms: 0.0,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports contain only serializable values");
        s.push('\n');
        s
    }
}

pub fn digest_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}
