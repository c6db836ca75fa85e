//! Batch experiment runner: configure a game, strategies, evaluators and
//! bounds from a JSON document, and emit reproducible machine-readable
//! reports. Reports with the same config and seed are byte-identical apart
//! from the `meta` block (timestamps, host, wall-clock).

mod config;
mod report;
mod run;

pub use config::{
    methods_for, strategies_for, validate_config, EvaluatorSpec, ExperimentConfig, GameSpec,
    GridSpec, StrategySpec, GAMES, METHODS, SCHEMA_VERSION,
};
pub use report::{BoundEntry, BruteForceEntry, Meta, ReportDocument, StepTiming, StrategyResult};
pub use run::{run_bounds, run_brute, run_sweep, run_value, run_violate};

use crate::Result;

/// Loads a config from a JSON file.
pub fn load_config(path: &std::path::Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path)?;
    let cfg: ExperimentConfig =
        serde_json::from_str(&text).map_err(|e| crate::Error::Schema(e.to_string()))?;
    Ok(cfg)
}
