use serde::{Deserialize, Serialize};

use crate::games::MatchingFamily;
use crate::{Error, Result};

pub const SCHEMA_VERSION: u32 = 1;

/// One experiment: a game, a list of built-in strategies, an evaluator and a
/// seed. Grids are only read by the sweep subcommand.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    pub game: GameSpec,
    #[serde(default)]
    pub strategies: Vec<StrategySpec>,
    #[serde(default)]
    pub evaluator: EvaluatorSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridSpec>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GameSpec {
    /// "chsh", "hmnl", "kv" or "hm".
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
    /// Matching family for hmnl: "full" or "reduced" (default reduced).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<String>,
    /// Communication budget for hm.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<usize>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StrategySpec {
    pub name: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EvaluatorSpec {
    /// "exact", "monte-carlo", "fwht" or "closed-form".
    pub method: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<u64>,
}

impl Default for EvaluatorSpec {
    fn default() -> Self {
        EvaluatorSpec {
            method: "exact".into(),
            trials: None,
        }
    }
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct GridSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<Vec<usize>>,
}

pub const GAMES: &[&str] = &["chsh", "hmnl", "kv", "hm"];

pub fn strategies_for(game: &str) -> &'static [&'static str] {
    match game {
        "chsh" => &["chsh-optimal-classical", "chsh-quantum"],
        "hmnl" => &["hmnl-argmax", "hmnl-halfspace", "hmnl-quantum"],
        "kv" => &["kv-maxweight", "kv-quantum"],
        "hm" => &["hm-classical", "hm-quantum"],
        _ => &[],
    }
}

pub const METHODS: &[&str] = &["exact", "monte-carlo", "fwht", "closed-form"];

/// Which evaluators make sense for a (game, strategy) pair.
pub fn methods_for(strategy: &str) -> &'static [&'static str] {
    match strategy {
        "chsh-optimal-classical" => &["exact", "monte-carlo"],
        "chsh-quantum" => &["exact", "monte-carlo", "closed-form"],
        "hmnl-argmax" => &["exact", "monte-carlo"],
        "hmnl-halfspace" => &["monte-carlo", "closed-form"],
        "hmnl-quantum" => &["exact", "monte-carlo", "closed-form"],
        "kv-maxweight" => &["exact", "monte-carlo", "fwht"],
        "kv-quantum" => &["exact", "monte-carlo", "closed-form"],
        "hm-classical" => &["monte-carlo"],
        "hm-quantum" => &["monte-carlo", "closed-form"],
        _ => &[],
    }
}

impl GameSpec {
    pub fn family(&self) -> Result<MatchingFamily> {
        match self.family.as_deref() {
            None | Some("reduced") => Ok(MatchingFamily::Reduced),
            Some("full") => Ok(MatchingFamily::Full),
            Some(other) => Err(Error::Schema(format!(
                "unknown matching family '{other}' (expected full or reduced)"
            ))),
        }
    }

    pub fn n(&self) -> Result<usize> {
        self.n
            .ok_or_else(|| Error::Schema(format!("game '{}' requires n", self.name)))
    }

    pub fn eta(&self) -> Result<f64> {
        self.eta
            .ok_or_else(|| Error::Schema(format!("game '{}' requires eta", self.name)))
    }

    pub fn c(&self) -> Result<usize> {
        self.c
            .ok_or_else(|| Error::Schema(format!("game '{}' requires c", self.name)))
    }
}

/// Full static validation; returns every problem found.
pub fn validate_config(cfg: &ExperimentConfig) -> std::result::Result<(), Vec<String>> {
    let mut errors = Vec::new();
    if cfg.schema_version != SCHEMA_VERSION {
        errors.push(format!(
            "schema_version {} unsupported (expected {SCHEMA_VERSION})",
            cfg.schema_version
        ));
    }
    let game = cfg.game.name.as_str();
    if !GAMES.contains(&game) {
        errors.push(format!("unknown game '{game}'"));
    }
    let grid = cfg.grid.as_ref();
    if game != "chsh" {
        match cfg.game.n {
            None if grid.map_or(true, |g| g.n.is_none()) => {
                errors.push(format!("game '{game}' requires n"))
            }
            Some(n) if n < 2 || !n.is_power_of_two() => {
                errors.push(format!("n must be a power of two, got {n}"))
            }
            _ => {}
        }
    }
    if game == "kv" {
        match cfg.game.eta {
            None if grid.map_or(true, |g| g.eta.is_none()) => {
                errors.push("kv requires eta".into())
            }
            Some(eta) if !(0.0..=0.5).contains(&eta) => {
                errors.push(format!("eta must lie in [0, 1/2], got {eta}"))
            }
            _ => {}
        }
    }
    if game == "hm" && cfg.game.c.is_none() && cfg.grid.as_ref().map_or(true, |g| g.c.is_none()) {
        errors.push("hm requires a communication budget c".into());
    }
    if let Some(family) = cfg.game.family.as_deref() {
        if family != "full" && family != "reduced" {
            errors.push(format!("unknown matching family '{family}'"));
        }
    }
    if !METHODS.contains(&cfg.evaluator.method.as_str()) {
        errors.push(format!("unknown evaluator method '{}'", cfg.evaluator.method));
    }
    for s in &cfg.strategies {
        if !strategies_for(game).contains(&s.name.as_str()) {
            errors.push(format!("unknown strategy '{}' for game '{game}'", s.name));
        } else if METHODS.contains(&cfg.evaluator.method.as_str())
            && !methods_for(&s.name).contains(&cfg.evaluator.method.as_str())
        {
            errors.push(format!(
                "evaluator '{}' not available for strategy '{}'",
                cfg.evaluator.method, s.name
            ));
        }
    }
    if cfg.evaluator.method == "monte-carlo" {
        if cfg.seed.is_none() {
            errors.push("monte-carlo evaluation requires a seed".into());
        }
        match cfg.evaluator.trials {
            None | Some(0) => errors.push("monte-carlo evaluation requires trials >= 1".into()),
            _ => {}
        }
    }
    if errors.is_empty() {
        Ok(())
    } else {
        Err(errors)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> ExperimentConfig {
        ExperimentConfig {
            schema_version: 1,
            game: GameSpec {
                name: "chsh".into(),
                n: None,
                eta: None,
                family: None,
                c: None,
            },
            strategies: vec![StrategySpec {
                name: "chsh-optimal-classical".into(),
            }],
            evaluator: EvaluatorSpec {
                method: "exact".into(),
                trials: None,
            },
            seed: Some(1),
            grid: None,
        }
    }

    #[test]
    fn valid_config_passes() {
        assert!(validate_config(&base()).is_ok());
    }

    #[test]
    fn n_must_be_a_power_of_two() {
        let mut cfg = base();
        cfg.game.name = "kv".into();
        cfg.game.n = Some(3);
        cfg.game.eta = Some(0.25);
        cfg.strategies = vec![StrategySpec {
            name: "kv-quantum".into(),
        }];
        cfg.evaluator.method = "closed-form".into();
        let errs = validate_config(&cfg).unwrap_err();
        assert!(errs.iter().any(|e| e.contains("power of two")), "{errs:?}");
    }

    #[test]
    fn monte_carlo_needs_a_seed() {
        let mut cfg = base();
        cfg.evaluator.method = "monte-carlo".into();
        cfg.evaluator.trials = Some(1000);
        cfg.seed = None;
        let errs = validate_config(&cfg).unwrap_err();
        assert!(errs.iter().any(|e| e.contains("seed")));
    }

    #[test]
    fn unknown_strategy_is_reported() {
        let mut cfg = base();
        cfg.strategies.push(StrategySpec {
            name: "does-not-exist".into(),
        });
        let errs = validate_config(&cfg).unwrap_err();
        assert!(errs.iter().any(|e| e.contains("does-not-exist")));
    }

    #[test]
    fn incompatible_evaluator_is_reported() {
        let mut cfg = base();
        cfg.evaluator.method = "fwht".into();
        let errs = validate_config(&cfg).unwrap_err();
        assert!(errs.iter().any(|e| e.contains("not available")));
    }
}
