use serde::{Deserialize, Serialize};

use crate::cli::config::ExperimentConfig;
use crate::optimize::{KklDiagnostic, ViolationReport};
use crate::strategies::TabularStrategy;

/// One evaluated figure with its provenance. `method` is one of
/// "exact-enum", "fwht", "closed-form", "monte-carlo", "brute-force",
/// "bound-formula"; Monte-Carlo figures carry their seed and trial count.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StrategyResult {
    pub strategy: String,
    pub method: String,
    pub value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stderr: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<u64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BoundEntry {
    pub name: String,
    pub value: f64,
    pub method: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BruteForceEntry {
    pub value: f64,
    pub exact: bool,
    pub enumerated_count: u64,
    pub method: String,
    pub witness: TabularStrategy,
}

/// Wall-clock and host details, excluded from reproducibility comparisons.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct Meta {
    pub timestamp_unix_ms: u128,
    pub host: String,
    pub wall_ms: Vec<StepTiming>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StepTiming {
    pub step: String,
    pub ms: f64,
}

/// The full machine-readable output of one subcommand run.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ReportDocument {
    pub schema_version: u32,
    pub tool_version: String,
    pub command: String,
    pub config: ExperimentConfig,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub results: Vec<StrategyResult>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub bounds: Vec<BoundEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub brute_force: Option<BruteForceEntry>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub violations: Vec<ViolationReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kkl: Option<KklDiagnostic>,
    pub meta: Meta,
}

impl ReportDocument {
    pub fn new(command: &str, config: ExperimentConfig) -> Self {
        ReportDocument {
            schema_version: crate::cli::config::SCHEMA_VERSION,
            tool_version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            config,
            results: Vec::new(),
            bounds: Vec::new(),
            brute_force: None,
            violations: Vec::new(),
            kkl: None,
            meta: Meta::default(),
        }
    }

    pub fn stamp(&mut self) {
        self.meta.timestamp_unix_ms = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_millis())
            .unwrap_or(0);
        self.meta.host = std::env::var("HOSTNAME").unwrap_or_else(|_| "unknown".into());
    }

    /// The numeric payload with `meta` removed: two runs with the same
    /// config and seed must produce byte-identical payloads.
    pub fn payload_json(&self) -> crate::Result<String> {
        let mut v = serde_json::to_value(self)?;
        if let Some(obj) = v.as_object_mut() {
            obj.remove("meta");
        }
        Ok(serde_json::to_string_pretty(&v)?)
    }

    pub fn to_json(&self) -> crate::Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}
