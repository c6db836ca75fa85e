use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::games::{EnumerableGame, IndexedGame, NonlocalGame};
use crate::strategies::{SharedRandomnessStrategy, Strategy};
use crate::Result;

/// A Monte-Carlo estimate with its binomial standard error.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct McEstimate {
    pub estimate: f64,
    pub stderr: f64,
    pub trials: u64,
    pub seed: u64,
}

impl McEstimate {
    fn from_wins(wins: u64, trials: u64, seed: u64) -> Self {
        let p = wins as f64 / trials as f64;
        McEstimate {
            estimate: p,
            stderr: (p * (1.0 - p) / trials as f64).sqrt(),
            trials,
            seed,
        }
    }
}

/// Exact winning probability of a deterministic strategy: the expectation of
/// the win predicate over the game's enumerator.
pub fn eval_exact<G: EnumerableGame>(
    ig: &IndexedGame<G>,
    strategy: &impl Strategy<G>,
) -> Result<f64> {
    let a_choice: Vec<usize> = ig
        .alice_inputs()
        .iter()
        .enumerate()
        .map(|(xi, x)| ig.alice_output_index(xi, &strategy.alice(x)))
        .collect::<Result<_>>()?;
    let b_choice: Vec<usize> = ig
        .bob_inputs()
        .iter()
        .enumerate()
        .map(|(yi, y)| ig.bob_output_index(yi, &strategy.bob(y)))
        .collect::<Result<_>>()?;
    Ok(ig
        .entries()
        .iter()
        .enumerate()
        .map(|(i, e)| e.p * ig.win(i, a_choice[e.x], b_choice[e.y]))
        .sum())
}

/// Value of a shared-randomness strategy as the average of its deterministic
/// instances over the given seeds.
pub fn eval_shared_exact<G: EnumerableGame>(
    ig: &IndexedGame<G>,
    strategy: &SharedRandomnessStrategy<G>,
    seeds: &[u64],
) -> Result<f64> {
    let mut total = 0.0;
    for &s in seeds {
        total += eval_exact(ig, &strategy.instance(s))?;
    }
    Ok(total / seeds.len() as f64)
}

/// One Monte-Carlo trial. Trial `t` draws everything from the ChaCha stream
/// `t` of the master seed, so trials are independent of execution order and
/// parallel runs aggregate bit-identically.
fn run_trial<G: NonlocalGame, S: Strategy<G>>(
    game: &G,
    strategy: &S,
    seed: u64,
    trial: u64,
) -> Result<u64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    let (x, y, aux) = game.sample_round(&mut rng);
    let a = strategy.alice(&x);
    let b = strategy.bob(&y);
    let p = game.win_prob(&x, &y, &aux, &a, &b)?;
    let win = if p >= 1.0 {
        true
    } else if p <= 0.0 {
        false
    } else {
        rng.gen_bool(p)
    };
    Ok(u64::from(win))
}

/// Unbiased Monte-Carlo estimate of a deterministic strategy's value,
/// reproducible given (seed, trials).
pub fn eval_monte_carlo<G, S>(game: &G, strategy: &S, trials: u64, seed: u64) -> Result<McEstimate>
where
    G: NonlocalGame + Sync,
    S: Strategy<G> + Sync,
{
    assert!(trials >= 1, "at least one trial required");
    let wins = (0..trials)
        .into_par_iter()
        .map(|t| run_trial(game, strategy, seed, t))
        .try_reduce(|| 0u64, |a, b| Ok(a + b))?;
    Ok(McEstimate::from_wins(wins, trials, seed))
}

/// Monte-Carlo estimate for a shared-randomness strategy: each trial drives
/// a fresh deterministic instance with a seed derived from its stream.
pub fn eval_shared_monte_carlo<G>(
    game: &G,
    strategy: &SharedRandomnessStrategy<G>,
    trials: u64,
    seed: u64,
) -> Result<McEstimate>
where
    G: NonlocalGame + Sync,
{
    assert!(trials >= 1, "at least one trial required");
    let wins = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(t);
            let instance_seed: u64 = rng.gen();
            let instance = strategy.instance(instance_seed);
            let (x, y, aux) = game.sample_round(&mut rng);
            let a = instance.alice(&x);
            let b = instance.bob(&y);
            let p = game.win_prob(&x, &y, &aux, &a, &b)?;
            let win = if p >= 1.0 {
                true
            } else if p <= 0.0 {
                false
            } else {
                rng.gen_bool(p)
            };
            Ok::<u64, crate::Error>(u64::from(win))
        })
        .try_reduce(|| 0u64, |a, b| Ok(a + b))?;
    Ok(McEstimate::from_wins(wins, trials, seed))
}
