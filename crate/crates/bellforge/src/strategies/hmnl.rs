use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::bitcore::BitString;
use crate::games::{HmnlBobOutput, HmnlGame};
use crate::strategies::{ClosureStrategy, McEstimate, SharedRandomnessStrategy};
use crate::{Error, Result};

/// Cap on exact x-enumeration for the argmax value.
const ARGMAX_EXACT_CAP: usize = 16;

/// Number of matches J_a = |{j != 0 : a . j = x_0 xor x_j}| for every a,
/// with a and j ranging over integer index encodings.
fn match_counts(x: &BitString) -> Vec<u32> {
    let n = x.len();
    let x0 = x.get(0);
    let mut counts = vec![0u32; n];
    for j in 1..n {
        let target = x0 ^ x.get(j);
        for (a, c) in counts.iter_mut().enumerate() {
            if ((a & j).count_ones() & 1 == 1) == target {
                *c += 1;
            }
        }
    }
    counts
}

/// Alice's argmax answer: the a maximizing J_a, ties broken by the smallest
/// index (lexicographically smallest string).
pub fn hmnl_argmax_alice(x: &BitString) -> BitString {
    let n = x.len();
    let m = n.trailing_zeros() as usize;
    let counts = match_counts(x);
    let mut best = 0usize;
    for (a, &c) in counts.iter().enumerate() {
        if c > counts[best] {
            best = a;
        }
    }
    BitString::from_index(best as u64, m)
}

/// The deterministic argmax strategy: Alice maximizes the number of indices
/// whose parity against x_0 her answer predicts; Bob outputs the pair of his
/// matching containing index 0 and d = 0.
pub fn hmnl_argmax_strategy(_game: &HmnlGame) -> ClosureStrategy<HmnlGame> {
    ClosureStrategy::new(
        |x: &BitString| hmnl_argmax_alice(x),
        |m: &crate::bitcore::Matching| {
            let (_, pair) = m.pair_containing(0).expect("matchings cover index 0");
            HmnlBobOutput { pair, d: 0 }
        },
    )
}

/// Exact value of the argmax strategy under the full matching family,
/// by enumerating x only: with Bob answering the pair containing index 0,
/// the partner j is uniform over the other n - 1 indices, so the value is
/// E_x[max_a J_a / (n - 1)].
pub fn hmnl_argmax_exact_value(n: usize) -> Result<f64> {
    if n < 2 || !n.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(n));
    }
    if n > ARGMAX_EXACT_CAP {
        return Err(Error::CapExceeded {
            what: "argmax x-enumeration",
            requested: n,
            limit: ARGMAX_EXACT_CAP,
        });
    }
    let mut total = 0.0f64;
    for x in BitString::enumerate(n) {
        let best = *match_counts(&x).iter().max().expect("nonempty") as f64;
        total += best / (n - 1) as f64;
    }
    Ok(total / (1u64 << n) as f64)
}

/// Monte-Carlo estimate of the same quantity for n beyond the exact cap,
/// sampling x uniformly; the standard error is the sample standard deviation
/// of p_x = max_a J_a / (n-1) over the drawn sample.
pub fn hmnl_argmax_value_mc(n: usize, samples: u64, seed: u64) -> Result<McEstimate> {
    if n < 2 || !n.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(n));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sum = 0.0f64;
    let mut sum_sq = 0.0f64;
    for _ in 0..samples {
        let x = BitString::random(n, &mut rng);
        let p = *match_counts(&x).iter().max().expect("nonempty") as f64 / (n - 1) as f64;
        sum += p;
        sum_sq += p * p;
    }
    let mean = sum / samples as f64;
    let var = (sum_sq / samples as f64 - mean * mean).max(0.0);
    Ok(McEstimate {
        estimate: mean,
        stderr: (var / samples as f64).sqrt(),
        trials: samples,
        seed,
    })
}

/// Closed-form value of the halfspace-rounding strategy:
/// 3/4 - arccos(1/sqrt(n)) / (2 pi).
pub fn hmnl_halfspace_closed_form(n: usize) -> f64 {
    0.75 - (1.0 / (n as f64).sqrt()).acos() / (2.0 * std::f64::consts::PI)
}

/// The halfspace-rounding shared-randomness strategy.
///
/// Per shared seed: a random unit vector w. Alice forms
/// u = ((-1)^(x_0 xor x_k) / sqrt(n))_k and answers the all-zero string when
/// <w, u> > 0, otherwise a pseudo-uniform string derived from (seed, x) so
/// each instance stays deterministic. Bob answers the pair of his matching
/// containing index 0 with d = 0 iff w_j > 0 for the partner j. Exactly zero
/// inner products count as "not positive".
pub fn hmnl_halfspace_strategy(n: usize) -> Result<SharedRandomnessStrategy<HmnlGame>> {
    if n < 2 || !n.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(n));
    }
    let m = n.trailing_zeros() as usize;
    Ok(SharedRandomnessStrategy::new(move |seed| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut w: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        let norm = w.iter().map(|v| v * v).sum::<f64>().sqrt();
        for v in &mut w {
            *v /= norm;
        }
        let w_alice = w.clone();
        let scale = 1.0 / (n as f64).sqrt();
        let alice = move |x: &BitString| {
            let x0 = x.get(0);
            let mut dot = 0.0;
            for (k, wk) in w_alice.iter().enumerate() {
                let sign = if x0 ^ x.get(k) { -scale } else { scale };
                dot += wk * sign;
            }
            if dot > 0.0 {
                BitString::zeros(m)
            } else {
                let mut fallback = ChaCha8Rng::seed_from_u64(seed ^ x.fnv64());
                BitString::from_index(fallback.gen_range(0..1u64 << m), m)
            }
        };
        let bob = move |mat: &crate::bitcore::Matching| {
            let (_, pair) = mat.pair_containing(0).expect("matchings cover index 0");
            let j = if pair.0 == 0 { pair.1 } else { pair.0 };
            let d = if w[j] > 0.0 { 0 } else { 1 };
            HmnlBobOutput { pair, d }
        };
        ClosureStrategy::new(alice, bob)
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::games::{hm_nl_game, IndexedGame, MatchingFamily, NonlocalGame};
    use crate::strategies::{eval_exact, eval_shared_monte_carlo, Strategy};

    fn bs(s: &str) -> BitString {
        s.parse().unwrap()
    }

    #[test]
    fn argmax_n2_recovers_the_parity() {
        for x in BitString::enumerate(2) {
            let a = hmnl_argmax_alice(&x);
            let expected = u64::from(x.get(0) ^ x.get(1));
            assert_eq!(a, BitString::from_index(expected, 1), "x={x}");
        }
        assert!((hmnl_argmax_exact_value(2).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn argmax_exact_value_matches_generic_evaluation() {
        for n in [4usize, 8] {
            let game = hm_nl_game(n, MatchingFamily::Full).unwrap();
            let strat = hmnl_argmax_strategy(&game);
            let ig = IndexedGame::new(game).unwrap();
            let via_game = eval_exact(&ig, &strat).unwrap();
            let via_x = hmnl_argmax_exact_value(n).unwrap();
            assert!(
                (via_game - via_x).abs() < 1e-12,
                "n={n}: {via_game} vs {via_x}"
            );
            assert!(via_x > 0.5);
        }
    }

    #[test]
    fn argmax_n4_value_by_hand() {
        // E_x[max_a J_a] = 2.5 over the 16 inputs, so the value is 2.5/3.
        let v = hmnl_argmax_exact_value(4).unwrap();
        assert!((v - 2.5 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn argmax_advantage_decays_with_n() {
        // value(n) - 1/2 > value(4n) - 1/2 > 0 along n = 8, 16, 64; exact up
        // to n = 16, sampled beyond.
        let v8 = hmnl_argmax_exact_value(8).unwrap();
        let v16 = hmnl_argmax_exact_value(16).unwrap();
        let v32 = hmnl_argmax_value_mc(32, 20_000, 5).unwrap();
        let v64 = hmnl_argmax_value_mc(64, 20_000, 6).unwrap();
        let v256 = hmnl_argmax_value_mc(256, 10_000, 7).unwrap();
        assert!(v8 - 0.5 > v32.estimate - 0.5 + 3.0 * v32.stderr);
        assert!(v16 - 0.5 > v64.estimate - 0.5 + 3.0 * v64.stderr);
        assert!(
            v64.estimate - 0.5
                > v256.estimate - 0.5 + 3.0 * (v64.stderr + v256.stderr)
        );
        assert!(v256.estimate - 0.5 > 3.0 * v256.stderr);
    }

    #[test]
    fn halfspace_closed_form_n4_is_seven_twelfths() {
        assert!((hmnl_halfspace_closed_form(4) - 7.0 / 12.0).abs() < 1e-12);
    }

    #[test]
    fn halfspace_instances_are_deterministic() {
        let s = hmnl_halfspace_strategy(8).unwrap();
        let game = hm_nl_game(8, MatchingFamily::Reduced).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let (x, m, _) = game.sample_round(&mut rng);
        let i1 = s.instance(77);
        let i2 = s.instance(77);
        assert_eq!(i1.alice(&x), i2.alice(&x));
        assert_eq!(i1.bob(&m), i2.bob(&m));
    }

    #[test]
    fn halfspace_matches_closed_form_at_n4() {
        let game = hm_nl_game(4, MatchingFamily::Full).unwrap();
        let s = hmnl_halfspace_strategy(4).unwrap();
        let mc = eval_shared_monte_carlo(&game, &s, 400_000, 11).unwrap();
        let expected = hmnl_halfspace_closed_form(4);
        assert!(
            (mc.estimate - expected).abs() < 3.0 * mc.stderr,
            "{} vs {expected} (sigma {})",
            mc.estimate,
            mc.stderr
        );
    }

    #[test]
    fn halfspace_scaled_advantage_sits_near_one_over_two_pi() {
        // (value - 1/2) * sqrt(n) stays within [0.1, 0.2] for large n; the
        // Monte-Carlo oracle samples the exact joint law of the two signed
        // projections (<g, u>, g_j): normalization cancels in the signs, and
        // projections of an iid Gaussian vector onto the unit vectors u and
        // e_j are bivariate normal with correlation <u, e_j> = +-1/sqrt(n).
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for n in [64usize, 256, 1024] {
            let trials = 2_000_000u64;
            let rho = 1.0 / (n as f64).sqrt();
            let mut wins = 0u64;
            for _ in 0..trials {
                let parity = rng.gen_bool(0.5); // x_0 xor x_j
                let signed_rho = if parity { -rho } else { rho };
                let g1: f64 = rng.sample(StandardNormal);
                let g2: f64 = rng.sample(StandardNormal);
                let proj_u = g1;
                let proj_v = signed_rho * g1 + (1.0 - signed_rho * signed_rho).sqrt() * g2;
                let win = if proj_u > 0.0 {
                    // Alice answers 0^m; they win iff d equals the parity.
                    let d = proj_v <= 0.0;
                    d == parity
                } else {
                    // Uniform fallback answer: a . j is a fair coin.
                    rng.gen_bool(0.5)
                };
                wins += u64::from(win);
            }
            let value = wins as f64 / trials as f64;
            let scaled = (value - 0.5) * (n as f64).sqrt();
            assert!(
                (0.1..=0.2).contains(&scaled),
                "n={n}: scaled advantage {scaled}"
            );
            let closed = (hmnl_halfspace_closed_form(n) - 0.5) * (n as f64).sqrt();
            assert!((scaled - closed).abs() < 0.02, "n={n}: {scaled} vs {closed}");
        }
    }
}
