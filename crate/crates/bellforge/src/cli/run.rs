use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::bitcore::BitString;
use crate::cli::config::{validate_config, ExperimentConfig};
use crate::cli::report::{BoundEntry, BruteForceEntry, ReportDocument, StrategyResult};
use crate::games::{chsh_game, hm_nl_game, kv_game, IndexedGame};
use crate::optimize::{
    brute_force_classical_value, kkl_diagnostic, kv_classical_bound, violation_report,
    ClassicalSide, ViolationMode,
};
use crate::quantum::{
    chsh_quantum_strategy, chsh_quantum_value, eval_quantum_exact, eval_quantum_mc,
    hm_quantum_protocol, hmnl_quantum_strategy, kv_quantum_strategy, kv_quantum_value,
};
use crate::strategies::{
    eval_exact, eval_monte_carlo, eval_shared_monte_carlo, hm_comm_protocol,
    hm_protocol_value_mc, hmnl_argmax_strategy, hmnl_halfspace_closed_form,
    hmnl_halfspace_strategy, kv_eval_fwht, kv_maxweight_strategy, selector_strategy,
    ClosureStrategy, HiddenMatchingProblem,
};
use crate::{Error, Result};

fn schema_checked(cfg: &ExperimentConfig) -> Result<()> {
    validate_config(cfg).map_err(|errs| Error::Schema(errs.join("; ")))
}

fn need_seed(cfg: &ExperimentConfig) -> Result<u64> {
    cfg.seed
        .ok_or_else(|| Error::Schema("this evaluation requires a seed".into()))
}

fn need_trials(cfg: &ExperimentConfig) -> Result<u64> {
    match cfg.evaluator.trials {
        Some(t) if t >= 1 => Ok(t),
        _ => Err(Error::Schema("this evaluation requires trials >= 1".into())),
    }
}

fn mc_result(name: &str, mc: crate::strategies::McEstimate) -> StrategyResult {
    StrategyResult {
        strategy: name.into(),
        method: "monte-carlo".into(),
        value: mc.estimate,
        stderr: Some(mc.stderr),
        seed: Some(mc.seed),
        trials: Some(mc.trials),
    }
}

fn closed_result(name: &str, value: f64) -> StrategyResult {
    StrategyResult {
        strategy: name.into(),
        method: "closed-form".into(),
        value,
        stderr: None,
        seed: None,
        trials: None,
    }
}

fn exact_result(name: &str, value: f64) -> StrategyResult {
    StrategyResult {
        strategy: name.into(),
        method: "exact-enum".into(),
        value,
        stderr: None,
        seed: None,
        trials: None,
    }
}

fn eval_one(cfg: &ExperimentConfig, strategy: &str) -> Result<StrategyResult> {
    let method = cfg.evaluator.method.as_str();
    match (cfg.game.name.as_str(), strategy, method) {
        ("chsh", "chsh-optimal-classical", "exact") => {
            let ig = IndexedGame::new(chsh_game())?;
            let s = ClosureStrategy::new(|_x: &u8| 0u8, |_y: &u8| 0u8);
            Ok(exact_result(strategy, eval_exact(&ig, &s)?))
        }
        ("chsh", "chsh-optimal-classical", "monte-carlo") => {
            let s = ClosureStrategy::new(|_x: &u8| 0u8, |_y: &u8| 0u8);
            let mc = eval_monte_carlo(&chsh_game(), &s, need_trials(cfg)?, need_seed(cfg)?)?;
            Ok(mc_result(strategy, mc))
        }
        ("chsh", "chsh-quantum", "exact") => {
            let ig = IndexedGame::new(chsh_game())?;
            Ok(exact_result(
                strategy,
                eval_quantum_exact(&ig, &chsh_quantum_strategy()?)?,
            ))
        }
        ("chsh", "chsh-quantum", "closed-form") => {
            Ok(closed_result(strategy, chsh_quantum_value()))
        }
        ("chsh", "chsh-quantum", "monte-carlo") => {
            let mc = eval_quantum_mc(
                &chsh_game(),
                &chsh_quantum_strategy()?,
                need_trials(cfg)?,
                need_seed(cfg)?,
            )?;
            Ok(mc_result(strategy, mc))
        }
        ("hmnl", s, m) => eval_hmnl(cfg, s, m),
        ("kv", s, m) => eval_kv(cfg, s, m),
        ("hm", s, m) => eval_hm(cfg, s, m),
        (g, s, m) => Err(Error::Schema(format!(
            "no evaluator '{m}' for strategy '{s}' of game '{g}'"
        ))),
    }
}

fn eval_hmnl(cfg: &ExperimentConfig, strategy: &str, method: &str) -> Result<StrategyResult> {
    let n = cfg.game.n()?;
    let family = cfg.game.family()?;
    let game = hm_nl_game(n, family)?;
    match (strategy, method) {
        ("hmnl-argmax", "exact") => {
            let s = hmnl_argmax_strategy(&game);
            let ig = IndexedGame::new(game)?;
            Ok(exact_result(strategy, eval_exact(&ig, &s)?))
        }
        ("hmnl-argmax", "monte-carlo") => {
            let s = hmnl_argmax_strategy(&game);
            let mc = eval_monte_carlo(&game, &s, need_trials(cfg)?, need_seed(cfg)?)?;
            Ok(mc_result(strategy, mc))
        }
        ("hmnl-halfspace", "closed-form") => {
            Ok(closed_result(strategy, hmnl_halfspace_closed_form(n)))
        }
        ("hmnl-halfspace", "monte-carlo") => {
            let s = hmnl_halfspace_strategy(n)?;
            let mc = eval_shared_monte_carlo(&game, &s, need_trials(cfg)?, need_seed(cfg)?)?;
            Ok(mc_result(strategy, mc))
        }
        ("hmnl-quantum", "closed-form") => Ok(closed_result(strategy, 1.0)),
        ("hmnl-quantum", "exact") => {
            let qs = hmnl_quantum_strategy(&game)?;
            let ig = IndexedGame::new(game)?;
            Ok(exact_result(strategy, eval_quantum_exact(&ig, &qs)?))
        }
        ("hmnl-quantum", "monte-carlo") => {
            let qs = hmnl_quantum_strategy(&game)?;
            let mc = eval_quantum_mc(&game, &qs, need_trials(cfg)?, need_seed(cfg)?)?;
            Ok(mc_result(strategy, mc))
        }
        (s, m) => Err(Error::Schema(format!("no evaluator '{m}' for '{s}'"))),
    }
}

fn eval_kv(cfg: &ExperimentConfig, strategy: &str, method: &str) -> Result<StrategyResult> {
    let n = cfg.game.n()?;
    let eta = cfg.game.eta()?;
    match (strategy, method) {
        ("kv-maxweight", "fwht") => {
            let (a, b) = kv_maxweight_strategy(n)?;
            let value = kv_eval_fwht(&a, &b, eta)?;
            Ok(StrategyResult {
                strategy: strategy.into(),
                method: "fwht".into(),
                value,
                stderr: None,
                seed: None,
                trials: None,
            })
        }
        ("kv-maxweight", "exact") => {
            let game = kv_game(n, eta)?;
            let (a, b) = kv_maxweight_strategy(n)?;
            let s = selector_strategy(&game, &a, &b);
            let ig = IndexedGame::new(game)?;
            Ok(exact_result(strategy, eval_exact(&ig, &s)?))
        }
        ("kv-maxweight", "monte-carlo") => {
            let game = kv_game(n, eta)?;
            let (a, b) = kv_maxweight_strategy(n)?;
            let s = selector_strategy(&game, &a, &b);
            let mc = eval_monte_carlo(&game, &s, need_trials(cfg)?, need_seed(cfg)?)?;
            Ok(mc_result(strategy, mc))
        }
        ("kv-quantum", "closed-form") => Ok(closed_result(strategy, kv_quantum_value(n, eta)?)),
        ("kv-quantum", "exact") => {
            let game = kv_game(n, eta)?;
            let qs = kv_quantum_strategy(&game)?;
            let ig = IndexedGame::new(game)?;
            Ok(exact_result(strategy, eval_quantum_exact(&ig, &qs)?))
        }
        ("kv-quantum", "monte-carlo") => {
            let game = kv_game(n, eta)?;
            let qs = kv_quantum_strategy(&game)?;
            let mc = eval_quantum_mc(&game, &qs, need_trials(cfg)?, need_seed(cfg)?)?;
            Ok(mc_result(strategy, mc))
        }
        (s, m) => Err(Error::Schema(format!("no evaluator '{m}' for '{s}'"))),
    }
}

fn eval_hm(cfg: &ExperimentConfig, strategy: &str, method: &str) -> Result<StrategyResult> {
    let n = cfg.game.n()?;
    match (strategy, method) {
        ("hm-classical", "monte-carlo") => {
            let c = cfg.game.c()?;
            let proto = hm_comm_protocol(n, c, None)?;
            let problem = HiddenMatchingProblem::new(n)?;
            let mc = hm_protocol_value_mc(&problem, &proto, need_trials(cfg)?, need_seed(cfg)?)?;
            Ok(mc_result(strategy, mc))
        }
        ("hm-quantum", "closed-form") => Ok(closed_result(strategy, 1.0)),
        ("hm-quantum", "monte-carlo") => {
            let trials = need_trials(cfg)?;
            let seed = need_seed(cfg)?;
            let problem = HiddenMatchingProblem::new(n)?;
            let mut wins = 0u64;
            for t in 0..trials {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(t);
                let (x, m) = problem.sample(&mut rng);
                let out = hm_quantum_protocol(&x, &m, &mut rng)?;
                wins += u64::from(problem.wins(&x, &m, &out)?);
            }
            let p = wins as f64 / trials as f64;
            Ok(StrategyResult {
                strategy: strategy.into(),
                method: "monte-carlo".into(),
                value: p,
                stderr: Some((p * (1.0 - p) / trials as f64).sqrt()),
                seed: Some(seed),
                trials: Some(trials),
            })
        }
        (s, m) => Err(Error::Schema(format!("no evaluator '{m}' for '{s}'"))),
    }
}

/// `value`: evaluate every configured strategy with the configured evaluator.
pub fn run_value(cfg: &ExperimentConfig) -> Result<ReportDocument> {
    schema_checked(cfg)?;
    if cfg.strategies.is_empty() {
        return Err(Error::Schema("value requires at least one strategy".into()));
    }
    let mut report = ReportDocument::new("value", cfg.clone());
    for s in &cfg.strategies {
        let t0 = Instant::now();
        let result = eval_one(cfg, &s.name)?;
        report.meta.wall_ms.push(crate::cli::report::StepTiming {
            step: format!("value:{}", s.name),
            ms: t0.elapsed().as_secs_f64() * 1e3,
        });
        report.results.push(result);
    }
    report.stamp();
    Ok(report)
}

fn brute_entry(cfg: &ExperimentConfig) -> Result<BruteForceEntry> {
    match cfg.game.name.as_str() {
        "chsh" => {
            let ig = IndexedGame::new(chsh_game())?;
            let r = brute_force_classical_value(&ig)?;
            Ok(entry_of(r))
        }
        "hmnl" => {
            let ig = IndexedGame::new(hm_nl_game(cfg.game.n()?, cfg.game.family()?)?)?;
            let r = brute_force_classical_value(&ig)?;
            Ok(entry_of(r))
        }
        "kv" => {
            let ig = IndexedGame::new(kv_game(cfg.game.n()?, cfg.game.eta()?)?)?;
            let r = brute_force_classical_value(&ig)?;
            Ok(entry_of(r))
        }
        other => Err(Error::Schema(format!(
            "brute force is not defined for game '{other}'"
        ))),
    }
}

fn entry_of(r: crate::optimize::BruteForceResult) -> BruteForceEntry {
    BruteForceEntry {
        value: r.value,
        exact: r.exact,
        enumerated_count: r.enumerated_count,
        method: "brute-force".into(),
        witness: r.witness,
    }
}

/// `brute`: exact classical value of the configured game.
pub fn run_brute(cfg: &ExperimentConfig) -> Result<ReportDocument> {
    schema_checked(cfg)?;
    let mut report = ReportDocument::new("brute", cfg.clone());
    let t0 = Instant::now();
    report.brute_force = Some(brute_entry(cfg)?);
    report.meta.wall_ms.push(crate::cli::report::StepTiming {
        step: "brute-force".into(),
        ms: t0.elapsed().as_secs_f64() * 1e3,
    });
    report.stamp();
    Ok(report)
}

/// `bounds`: formula bounds plus Fourier diagnostics where they exist.
pub fn run_bounds(cfg: &ExperimentConfig) -> Result<ReportDocument> {
    schema_checked(cfg)?;
    let mut report = ReportDocument::new("bounds", cfg.clone());
    match cfg.game.name.as_str() {
        "kv" => {
            let n = cfg.game.n()?;
            let eta = cfg.game.eta()?;
            report.bounds.push(BoundEntry {
                name: format!("kv-classical-bound(n={n}, eta={eta})"),
                value: kv_classical_bound(n, eta)?,
                method: "bound-formula".into(),
            });
        }
        "hmnl" => {
            // No closed-form constant exists for the classical bound, so we
            // report the degree-2 correlation diagnostic of the argmax
            // strategy's message partition instead (ratios only).
            let n = cfg.game.n()?;
            let mut classes: Vec<Vec<BitString>> = vec![Vec::new(); n];
            for x in BitString::enumerate(n) {
                classes[crate::strategies::hmnl_argmax_alice(&x).to_index()].push(x);
            }
            let decode = |msg: usize, m: &crate::bitcore::Matching| {
                let (_, pair) = m.pair_containing(0).expect("index 0 is matched");
                let j = if pair.0 == 0 { pair.1 } else { pair.0 };
                crate::strategies::HmOutput {
                    pair,
                    v: u8::from((msg & j).count_ones() & 1 == 1),
                }
            };
            report.kkl = Some(kkl_diagnostic(n, &classes, Some(&decode))?);
        }
        other => {
            return Err(Error::Schema(format!(
                "no bound formula or diagnostic for game '{other}'"
            )))
        }
    }
    report.stamp();
    Ok(report)
}

/// `violate`: assemble the classical-vs-quantum comparison.
pub fn run_violate(cfg: &ExperimentConfig, mode: ViolationMode) -> Result<ReportDocument> {
    schema_checked(cfg)?;
    let mut report = ReportDocument::new("violate", cfg.clone());
    let (game_desc, classical, quantum, q_prov): (String, ClassicalSide, f64, &str) =
        match cfg.game.name.as_str() {
            "chsh" => {
                let ig = IndexedGame::new(chsh_game())?;
                let brute = brute_force_classical_value(&ig)?;
                report.brute_force = Some(entry_of(brute.clone()));
                (
                    "chsh".into(),
                    ClassicalSide {
                        value: brute.value,
                        provenance: "brute-force-exact".into(),
                    },
                    chsh_quantum_value(),
                    "closed-form",
                )
            }
            "hmnl" => {
                let n = cfg.game.n()?;
                let family = cfg.game.family()?;
                let ig = IndexedGame::new(hm_nl_game(n, family)?)?;
                let brute = brute_force_classical_value(&ig)?;
                if !brute.exact {
                    return Err(Error::CapExceeded {
                        what: "hmnl brute force (no bound formula exists to substitute)",
                        requested: n,
                        limit: 0,
                    });
                }
                report.brute_force = Some(entry_of(brute.clone()));
                (
                    format!("hmnl(n={n})"),
                    ClassicalSide {
                        value: brute.value,
                        provenance: "brute-force-exact".into(),
                    },
                    1.0,
                    "closed-form",
                )
            }
            "kv" => {
                let n = cfg.game.n()?;
                let eta = cfg.game.eta()?;
                // Exact classical value when enumerable, the proven bound
                // otherwise.
                let classical = match kv_game(n, eta).and_then(IndexedGame::new) {
                    Ok(ig) => {
                        let brute = brute_force_classical_value(&ig)?;
                        if brute.exact {
                            report.brute_force = Some(entry_of(brute.clone()));
                            ClassicalSide {
                                value: brute.value,
                                provenance: "brute-force-exact".into(),
                            }
                        } else {
                            ClassicalSide {
                                value: kv_classical_bound(n, eta)?,
                                provenance: "bound-formula".into(),
                            }
                        }
                    }
                    Err(Error::CapExceeded { .. }) => ClassicalSide {
                        value: kv_classical_bound(n, eta)?,
                        provenance: "bound-formula".into(),
                    },
                    Err(e) => return Err(e),
                };
                (
                    format!("kv(n={n}, eta={eta})"),
                    classical,
                    kv_quantum_value(n, eta)?,
                    "closed-form",
                )
            }
            other => {
                return Err(Error::Schema(format!(
                    "violation reports are not defined for game '{other}'"
                )))
            }
        };
    report
        .violations
        .push(violation_report(game_desc, classical, quantum, q_prov, mode)?);
    report.stamp();
    Ok(report)
}

/// `sweep`: a CSV over the configured grid, rows in grid order.
pub fn run_sweep(cfg: &ExperimentConfig) -> Result<String> {
    schema_checked(cfg)?;
    let grid = cfg
        .grid
        .as_ref()
        .ok_or_else(|| Error::Schema("sweep requires a grid".into()))?;
    let ns = grid
        .n
        .clone()
        .or_else(|| cfg.game.n.map(|n| vec![n]))
        .ok_or_else(|| Error::Schema("sweep requires grid.n or game.n".into()))?;
    for &n in &ns {
        if n < 2 || !n.is_power_of_two() {
            return Err(Error::Schema(format!("n must be a power of two, got {n}")));
        }
    }
    let mut out = String::new();
    match cfg.game.name.as_str() {
        "kv" => {
            let etas = grid
                .eta
                .clone()
                .or_else(|| cfg.game.eta.map(|e| vec![e]))
                .ok_or_else(|| Error::Schema("kv sweep requires grid.eta or game.eta".into()))?;
            out.push_str(
                "game,n,eta,quantum_value,classical_bound,brute_force_value,brute_exact\n",
            );
            for &n in &ns {
                for &eta in &etas {
                    let q = kv_quantum_value(n, eta)?;
                    let bound = kv_classical_bound(n, eta)?;
                    let brute = match kv_game(n, eta).and_then(IndexedGame::new) {
                        Ok(ig) => Some(brute_force_classical_value(&ig)?),
                        Err(Error::CapExceeded { .. }) => None,
                        Err(e) => return Err(e),
                    };
                    let (bv, be) = match &brute {
                        Some(b) if b.exact => (format!("{:.12}", b.value), "true"),
                        _ => (String::new(), "false"),
                    };
                    out.push_str(&format!("kv,{n},{eta},{q:.12},{bound:.12},{bv},{be}\n"));
                }
            }
        }
        "hm" => {
            let cs = grid
                .c
                .clone()
                .or_else(|| cfg.game.c.map(|c| vec![c]))
                .ok_or_else(|| Error::Schema("hm sweep requires grid.c or game.c".into()))?;
            let trials = need_trials(cfg)?;
            let seed = need_seed(cfg)?;
            out.push_str("game,n,c,mc_value,mc_stderr,trials,seed\n");
            for &n in &ns {
                for &c in &cs {
                    let proto = hm_comm_protocol(n, c, None)?;
                    let problem = HiddenMatchingProblem::new(n)?;
                    let mc = hm_protocol_value_mc(&problem, &proto, trials, seed)?;
                    out.push_str(&format!(
                        "hm,{n},{c},{:.12},{:.3e},{trials},{seed}\n",
                        mc.estimate, mc.stderr
                    ));
                }
            }
        }
        "hmnl" => {
            out.push_str("game,n,argmax_value,argmax_method,halfspace_closed_form,quantum_value\n");
            for &n in &ns {
                let (argmax, method) = match crate::strategies::hmnl_argmax_exact_value(n) {
                    Ok(v) => (v, "exact-enum"),
                    Err(Error::CapExceeded { .. }) => {
                        let mc = crate::strategies::hmnl_argmax_value_mc(
                            n,
                            need_trials(cfg)?,
                            need_seed(cfg)?,
                        )?;
                        (mc.estimate, "monte-carlo")
                    }
                    Err(e) => return Err(e),
                };
                out.push_str(&format!(
                    "hmnl,{n},{argmax:.12},{method},{:.12},1.0\n",
                    hmnl_halfspace_closed_form(n)
                ));
            }
        }
        other => {
            return Err(Error::Schema(format!(
                "sweep is not defined for game '{other}'"
            )))
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cli::config::{EvaluatorSpec, GameSpec, GridSpec, StrategySpec};

    fn chsh_cfg() -> ExperimentConfig {
        ExperimentConfig {
            schema_version: 1,
            game: GameSpec {
                name: "chsh".into(),
                n: None,
                eta: None,
                family: None,
                c: None,
            },
            strategies: vec![
                StrategySpec {
                    name: "chsh-optimal-classical".into(),
                },
                StrategySpec {
                    name: "chsh-quantum".into(),
                },
            ],
            evaluator: EvaluatorSpec {
                method: "exact".into(),
                trials: None,
            },
            seed: Some(11),
            grid: None,
        }
    }

    #[test]
    fn chsh_value_report() {
        let report = run_value(&chsh_cfg()).unwrap();
        assert_eq!(report.results.len(), 2);
        assert_eq!(report.results[0].value, 0.75);
        assert!((report.results[1].value - chsh_quantum_value()).abs() < 1e-9);
        assert_eq!(report.results[0].method, "exact-enum");
    }

    #[test]
    fn kv_closed_form_value() {
        let mut cfg = chsh_cfg();
        cfg.game = GameSpec {
            name: "kv".into(),
            n: Some(16),
            eta: Some(0.25),
            family: None,
            c: None,
        };
        cfg.strategies = vec![StrategySpec {
            name: "kv-quantum".into(),
        }];
        cfg.evaluator.method = "closed-form".into();
        let report = run_value(&cfg).unwrap();
        assert!((report.results[0].value - 0.296875).abs() < 1e-15);
    }

    #[test]
    fn unknown_strategy_is_a_schema_error() {
        let mut cfg = chsh_cfg();
        cfg.strategies = vec![StrategySpec {
            name: "nope".into(),
        }];
        match run_value(&cfg) {
            Err(e @ Error::Schema(_)) => assert_eq!(e.exit_code(), 2),
            other => panic!("expected schema error, got {other:?}"),
        }
    }

    #[test]
    fn violate_chsh_ratio() {
        let cfg = chsh_cfg();
        let report = run_violate(&cfg, ViolationMode::Ratio).unwrap();
        let v = &report.violations[0];
        assert!((v.violation - chsh_quantum_value() / 0.75).abs() < 1e-12);
    }

    #[test]
    fn violate_hmnl_deviation_numerator() {
        let mut cfg = chsh_cfg();
        cfg.game = GameSpec {
            name: "hmnl".into(),
            n: Some(4),
            eta: None,
            family: Some("full".into()),
            c: None,
        };
        cfg.strategies = vec![StrategySpec {
            name: "hmnl-quantum".into(),
        }];
        let report = run_violate(&cfg, ViolationMode::Deviation).unwrap();
        let v = &report.violations[0];
        assert!((v.quantum_value - 0.5 - 0.5).abs() < 1e-12);
        assert!(v.deviation_ratio.is_some());
    }

    #[test]
    fn sweep_kv_grid_rows() {
        let mut cfg = chsh_cfg();
        cfg.game = GameSpec {
            name: "kv".into(),
            n: None,
            eta: None,
            family: None,
            c: None,
        };
        cfg.strategies = vec![StrategySpec {
            name: "kv-quantum".into(),
        }];
        cfg.evaluator.method = "closed-form".into();
        cfg.grid = Some(GridSpec {
            n: Some(vec![2, 4]),
            eta: Some(vec![0.0, 0.25]),
            c: None,
        });
        let csv = run_sweep(&cfg).unwrap();
        let lines: Vec<&str> = csv.trim().lines().collect();
        assert_eq!(lines.len(), 5); // header + 4 rows
        assert!(lines[1].starts_with("kv,2,0,"));
        assert!(lines[4].starts_with("kv,4,0.25,"));
    }

    #[test]
    fn reports_are_reproducible_modulo_meta() {
        let mut cfg = chsh_cfg();
        cfg.evaluator = EvaluatorSpec {
            method: "monte-carlo".into(),
            trials: Some(20_000),
        };
        let a = run_value(&cfg).unwrap();
        std::thread::sleep(std::time::Duration::from_millis(5));
        let b = run_value(&cfg).unwrap();
        assert_eq!(a.payload_json().unwrap(), b.payload_json().unwrap());
        assert_ne!(a.meta.timestamp_unix_ms, b.meta.timestamp_unix_ms);
    }
}
