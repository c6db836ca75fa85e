//! Classical value computation: exact brute force with best-response
//! decomposition, hill-climbing local search, the exact bound formulas, and
//! the Fourier-analytic diagnostics.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::games::{EnumerableGame, IndexedGame};
use crate::strategies::TabularStrategy;
use crate::{Error, Result};

mod bounds;
mod kkl;
mod report;

pub use bounds::{hypercontractivity_check, kv_classical_bound, HypercontractivityCheck};
pub use kkl::{kkl_diagnostic, KklDiagnostic, MessageDiagnostic};
pub use report::{violation_report, ClassicalSide, ViolationMode, ViolationReport};

/// Default cap on the number of enumerated deterministic strategies.
pub const BRUTE_FORCE_CAP: u64 = 10_000_000;

/// Result of a classical value computation.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BruteForceResult {
    pub value: f64,
    pub witness: TabularStrategy,
    /// Number of enumerated strategies of the smaller side.
    pub enumerated_count: u64,
    /// True when the whole side was enumerated, so `value` is the exact
    /// classical value.
    pub exact: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Side {
    Alice,
    Bob,
}

/// Which side has fewer deterministic strategies (output count ^ input
/// count), compared in log space. Ties go to Bob.
fn smaller_side<G: EnumerableGame>(ig: &IndexedGame<G>) -> Side {
    let alice_log = ig.n_x() as f64 * (ig.k_a() as f64).ln();
    let bob_log = ig.n_y() as f64 * (ig.k_b() as f64).ln();
    if alice_log < bob_log {
        Side::Alice
    } else {
        Side::Bob
    }
}

fn count_assignments(inputs: usize, outputs: usize, cap: u64) -> Option<u64> {
    let mut count: u64 = 1;
    for _ in 0..inputs {
        count = count.checked_mul(outputs as u64)?;
        if count > cap {
            return None;
        }
    }
    Some(count)
}

/// Value and best-response witness for one fixed assignment of the
/// enumerated side. `assign[i]` is the output position for input i of that
/// side; the other side answers per-input best responses (ties to the
/// smallest output index).
fn best_response_value<G: EnumerableGame>(
    ig: &IndexedGame<G>,
    side: Side,
    assign: &[usize],
) -> (f64, Vec<usize>) {
    let (responder_inputs, k_resp) = match side {
        Side::Bob => (ig.n_x(), ig.k_a()),
        Side::Alice => (ig.n_y(), ig.k_b()),
    };
    let mut value = 0.0;
    let mut response = Vec::with_capacity(responder_inputs);
    for r in 0..responder_inputs {
        let entry_ids = match side {
            Side::Bob => ig.entries_by_x(r),
            Side::Alice => ig.entries_by_y(r),
        };
        let mut best = f64::NEG_INFINITY;
        let mut best_out = 0;
        for out in 0..k_resp {
            let mut score = 0.0;
            for &ei in entry_ids {
                let e = &ig.entries()[ei as usize];
                score += e.p
                    * match side {
                        Side::Bob => ig.win(ei as usize, out, assign[e.y]),
                        Side::Alice => ig.win(ei as usize, assign[e.x], out),
                    };
            }
            if score > best {
                best = score;
                best_out = out;
            }
        }
        value += best;
        response.push(best_out);
    }
    (value, response)
}

fn decode_assignment(mut index: u64, inputs: usize, outputs: usize) -> Vec<usize> {
    let mut digits = vec![0usize; inputs];
    for d in digits.iter_mut().rev() {
        *d = (index % outputs as u64) as usize;
        index /= outputs as u64;
    }
    digits
}

fn make_witness(side: Side, assign: Vec<usize>, response: Vec<usize>) -> TabularStrategy {
    match side {
        Side::Bob => TabularStrategy {
            alice: response,
            bob: assign,
        },
        Side::Alice => TabularStrategy {
            alice: assign,
            bob: response,
        },
    }
}

/// Exact classical value by enumerating every deterministic strategy of the
/// smaller side and taking per-input best responses on the other side (the
/// value is linear in each player's per-input choice, so the decomposition
/// is lossless).
///
/// When the smaller side exceeds the cap, falls back to alternating
/// best-response ascent from the all-zeros assignment and reports
/// `exact: false` with the best witness found.
pub fn brute_force_classical_value<G>(ig: &IndexedGame<G>) -> Result<BruteForceResult>
where
    G: EnumerableGame + Sync,
    G::Aux: Sync,
    G::AliceIn: Sync,
    G::BobIn: Sync,
    G::AliceOut: Sync,
    G::BobOut: Sync,
{
    brute_force_with_cap(ig, BRUTE_FORCE_CAP)
}

pub fn brute_force_with_cap<G>(ig: &IndexedGame<G>, cap: u64) -> Result<BruteForceResult>
where
    G: EnumerableGame + Sync,
    G::Aux: Sync,
    G::AliceIn: Sync,
    G::BobIn: Sync,
    G::AliceOut: Sync,
    G::BobOut: Sync,
{
    let side = smaller_side(ig);
    let (inputs, outputs) = match side {
        Side::Bob => (ig.n_y(), ig.k_b()),
        Side::Alice => (ig.n_x(), ig.k_a()),
    };
    let Some(count) = count_assignments(inputs, outputs, cap) else {
        return Ok(alternating_ascent(ig, side));
    };

    // Deterministic parallel scan: chunks merge by (max value, then
    // lexicographically smallest witness), matching the serial result.
    let best = (0..count)
        .into_par_iter()
        .fold(
            || None::<(f64, u64)>,
            |acc, idx| {
                let assign = decode_assignment(idx, inputs, outputs);
                let (value, _) = best_response_value(ig, side, &assign);
                match acc {
                    Some((v, _)) if v >= value => acc,
                    _ => Some((value, idx)),
                }
            },
        )
        .reduce(
            || None,
            |a, b| match (a, b) {
                (None, x) | (x, None) => x,
                (Some((va, ia)), Some((vb, ib))) => {
                    if va > vb || (va == vb && ia <= ib) {
                        Some((va, ia))
                    } else {
                        Some((vb, ib))
                    }
                }
            },
        );
    let (value, idx) = best.expect("at least one assignment exists");
    let assign = decode_assignment(idx, inputs, outputs);
    let (_, response) = best_response_value(ig, side, &assign);
    Ok(BruteForceResult {
        value,
        witness: make_witness(side, assign, response),
        enumerated_count: count,
        exact: true,
    })
}

/// Coordinate-ascent fallback for over-cap instances: alternate per-input
/// best responses until a fixpoint.
fn alternating_ascent<G: EnumerableGame>(ig: &IndexedGame<G>, side: Side) -> BruteForceResult {
    let inputs = match side {
        Side::Bob => ig.n_y(),
        Side::Alice => ig.n_x(),
    };
    let mut assign = vec![0usize; inputs];
    let mut evaluated = 0u64;
    let (mut value, mut response) = best_response_value(ig, side, &assign);
    loop {
        evaluated += 1;
        // Best-respond with the enumerated side against the responder's map.
        let other = match side {
            Side::Bob => Side::Alice,
            Side::Alice => Side::Bob,
        };
        let (_, back_assign) = best_response_value(ig, other, &response);
        let (v, r) = best_response_value(ig, side, &back_assign);
        if v <= value + 1e-15 || evaluated > 1000 {
            if v > value {
                assign = back_assign;
                value = v;
                response = r;
            }
            break;
        }
        assign = back_assign;
        value = v;
        response = r;
    }
    BruteForceResult {
        value,
        witness: make_witness(side, assign, response),
        enumerated_count: evaluated,
        exact: false,
    }
}

/// Outcome of hill-climbing local search.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LocalSearchOutcome {
    pub best: BruteForceResult,
    /// The local optimum of every restart, in restart order.
    pub restart_optima: Vec<(TabularStrategy, f64)>,
}

fn full_value<G: EnumerableGame>(ig: &IndexedGame<G>, tab: &TabularStrategy) -> f64 {
    ig.entries()
        .iter()
        .enumerate()
        .map(|(i, e)| e.p * ig.win(i, tab.alice[e.x], tab.bob[e.y]))
        .sum()
}

/// Hill climbing over single-entry changes of both maps: first strict
/// improvement in a fixed scan order (Alice inputs then Bob inputs, outputs
/// ascending), repeated until no single change improves. Restart r runs on
/// ChaCha stream r of the seed. If a `bound` is registered, any witness
/// exceeding it beyond 1e-9 is an error (it would mean the evaluator and the
/// proof disagree).
pub fn local_search_classical<G: EnumerableGame>(
    ig: &IndexedGame<G>,
    seed: u64,
    restarts: u32,
    bound: Option<f64>,
) -> Result<LocalSearchOutcome> {
    assert!(restarts >= 1, "at least one restart required");
    let mut restart_optima = Vec::with_capacity(restarts as usize);
    let mut best: Option<(f64, TabularStrategy)> = None;
    for r in 0..restarts {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(r as u64);
        let mut tab = TabularStrategy {
            alice: (0..ig.n_x()).map(|_| rng.gen_range(0..ig.k_a())).collect(),
            bob: (0..ig.n_y()).map(|_| rng.gen_range(0..ig.k_b())).collect(),
        };
        let mut value = full_value(ig, &tab);
        loop {
            let mut improved = false;
            'scan: {
                for x in 0..ig.n_x() {
                    let current = tab.alice[x];
                    for a in 0..ig.k_a() {
                        if a == current {
                            continue;
                        }
                        let delta: f64 = ig
                            .entries_by_x(x)
                            .iter()
                            .map(|&ei| {
                                let e = &ig.entries()[ei as usize];
                                e.p * (ig.win(ei as usize, a, tab.bob[e.y])
                                    - ig.win(ei as usize, current, tab.bob[e.y]))
                            })
                            .sum();
                        if delta > 1e-15 {
                            tab.alice[x] = a;
                            value += delta;
                            improved = true;
                            break 'scan;
                        }
                    }
                }
                for y in 0..ig.n_y() {
                    let current = tab.bob[y];
                    for b in 0..ig.k_b() {
                        if b == current {
                            continue;
                        }
                        let delta: f64 = ig
                            .entries_by_y(y)
                            .iter()
                            .map(|&ei| {
                                let e = &ig.entries()[ei as usize];
                                e.p * (ig.win(ei as usize, tab.alice[e.x], b)
                                    - ig.win(ei as usize, tab.alice[e.x], current))
                            })
                            .sum();
                        if delta > 1e-15 {
                            tab.bob[y] = b;
                            value += delta;
                            improved = true;
                            break 'scan;
                        }
                    }
                }
            }
            if !improved {
                break;
            }
        }
        let _ = value;
        // Re-evaluate from scratch: incremental deltas accumulate rounding.
        let value = full_value(ig, &tab);
        if let Some(bound) = bound {
            if value > bound + 1e-9 {
                return Err(Error::BoundViolation { value, bound });
            }
        }
        match &best {
            Some((bv, bw)) if *bv > value || (*bv == value && *bw <= tab) => {}
            _ => best = Some((value, tab.clone())),
        }
        restart_optima.push((tab, value));
    }
    let (value, witness) = best.expect("restarts >= 1");
    Ok(LocalSearchOutcome {
        best: BruteForceResult {
            value,
            witness,
            enumerated_count: restarts as u64,
            exact: false,
        },
        restart_optima,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::games::{
        chsh_game, functional_to_game, hm_nl_game, kv_game, BellFunctional, MatchingFamily,
    };
    use crate::strategies::{eval_exact, BoundTabular};

    #[test]
    fn chsh_brute_force_is_exactly_three_quarters() {
        let ig = IndexedGame::new(chsh_game()).unwrap();
        let r = brute_force_classical_value(&ig).unwrap();
        assert_eq!(r.value, 0.75);
        assert!(r.exact);
        // Only the smaller side (here Bob: 2^2 maps) is enumerated.
        assert_eq!(r.enumerated_count, 4);
        // The witness reproduces the value through the generic evaluator.
        let v = eval_exact(&ig, &BoundTabular { ig: &ig, tab: &r.witness }).unwrap();
        assert_eq!(v, 0.75);
    }

    #[test]
    fn hmnl_n2_brute_force_is_one() {
        let ig = IndexedGame::new(hm_nl_game(2, MatchingFamily::Full).unwrap()).unwrap();
        let r = brute_force_classical_value(&ig).unwrap();
        assert_eq!(r.value, 1.0);
        assert!(r.exact);
    }

    #[test]
    fn kv_n2_brute_force_respects_the_bound_and_naive_enumeration() {
        let ig = IndexedGame::new(kv_game(2, 0.25).unwrap()).unwrap();
        let r = brute_force_classical_value(&ig).unwrap();
        let bound = kv_classical_bound(2, 0.25).unwrap();
        assert!(r.value <= bound + 1e-12, "{} vs {bound}", r.value);
        // Naive double enumeration oracle.
        let mut naive = f64::NEG_INFINITY;
        for a0 in 0..2 {
            for a1 in 0..2 {
                for b0 in 0..2 {
                    for b1 in 0..2 {
                        let tab = TabularStrategy {
                            alice: vec![a0, a1],
                            bob: vec![b0, b1],
                        };
                        naive = naive.max(full_value(&ig, &tab));
                    }
                }
            }
        }
        assert!((r.value - naive).abs() < 1e-12);
    }

    #[test]
    fn decomposition_matches_naive_enumeration_on_random_games() {
        let mut rng = ChaCha8Rng::seed_from_u64(71);
        for trial in 0..50 {
            let n_x = rng.gen_range(1..=3);
            let n_y = rng.gen_range(1..=3);
            let k_a = rng.gen_range(2..=4);
            let k_b = rng.gen_range(2..=4);
            let entries: Vec<f64> = (0..n_x * n_y * k_a * k_b)
                .map(|_| rng.gen_range(0.0..1.0))
                .collect();
            let m = BellFunctional::new(n_x, n_y, k_a, k_b, entries).unwrap();
            let (game, _) = functional_to_game(&m).unwrap();
            let ig = IndexedGame::new(game).unwrap();
            let r = brute_force_classical_value(&ig).unwrap();
            let mut naive = f64::NEG_INFINITY;
            let a_count = (k_a as u64).pow(n_x as u32);
            let b_count = (k_b as u64).pow(n_y as u32);
            for ai in 0..a_count {
                for bi in 0..b_count {
                    let tab = TabularStrategy {
                        alice: decode_assignment(ai, n_x, k_a),
                        bob: decode_assignment(bi, n_y, k_b),
                    };
                    naive = naive.max(full_value(&ig, &tab));
                }
            }
            assert!(
                (r.value - naive).abs() < 1e-12,
                "trial {trial}: {} vs naive {naive}",
                r.value
            );
        }
    }

    #[test]
    fn over_cap_falls_back_to_heuristic() {
        let ig = IndexedGame::new(kv_game(4, 0.25).unwrap()).unwrap();
        let exact = brute_force_classical_value(&ig).unwrap();
        let heur = brute_force_with_cap(&ig, 10).unwrap();
        assert!(exact.exact);
        assert!(!heur.exact);
        assert!(heur.value <= exact.value + 1e-12);
    }

    #[test]
    fn local_search_reaches_the_chsh_optimum_from_any_seed() {
        let ig = IndexedGame::new(chsh_game()).unwrap();
        for seed in 0..10 {
            let out = local_search_classical(&ig, seed, 3, None).unwrap();
            assert_eq!(out.best.value, 0.75, "seed {seed}");
        }
    }

    #[test]
    fn local_search_finds_the_optimum_on_tiny_kv() {
        let ig = IndexedGame::new(kv_game(4, 0.25).unwrap()).unwrap();
        let brute = brute_force_classical_value(&ig).unwrap();
        let ls = local_search_classical(&ig, 42, 50, None).unwrap();
        assert!(ls.best.value >= brute.value - 1e-12);
        assert!(ls.best.value <= brute.value + 1e-12);
        assert_eq!(ls.restart_optima.len(), 50);
    }

    #[test]
    fn local_search_never_beats_a_true_bound() {
        let ig = IndexedGame::new(kv_game(8, 0.3).unwrap()).unwrap();
        let bound = kv_classical_bound(8, 0.3).unwrap();
        let ls = local_search_classical(&ig, 7, 10, Some(bound)).unwrap();
        for (_, v) in &ls.restart_optima {
            assert!(*v <= bound + 1e-9);
        }
        // A fake bound below the reachable value must trip the violation.
        assert!(matches!(
            local_search_classical(&ig, 7, 10, Some(0.01)),
            Err(Error::BoundViolation { .. })
        ));
    }

    #[test]
    fn brute_force_dominates_explicit_strategies() {
        let game = kv_game(4, 0.2).unwrap();
        let ig = IndexedGame::new(game.clone()).unwrap();
        let brute = brute_force_classical_value(&ig).unwrap();
        let (a, b) = crate::strategies::kv_maxweight_strategy(4).unwrap();
        let v = eval_exact(&ig, &crate::strategies::selector_strategy(&game, &a, &b)).unwrap();
        assert!(brute.value >= v - 1e-12);
    }
}
