//! The one-way communication version of Hidden Matching: Alice holds
//! x in {0,1}^n, Bob a uniform perfect matching; Alice sends a c-bit message
//! and Bob outputs a pair (i, j) of his matching and a bit v, winning iff
//! v = x_i xor x_j.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::bitcore::{full_matchings, random_matching, BitString, Matching};
use crate::games::HmnlGame;
use crate::stats::binomial_half_cdf;
use crate::strategies::{McEstimate, Strategy};
use crate::{Error, Result};

/// The communication problem instance: uniform x and uniform full-family
/// matching on n points.
#[derive(Clone, Copy, Debug)]
pub struct HiddenMatchingProblem {
    pub n: usize,
}

impl HiddenMatchingProblem {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 || !n.is_power_of_two() {
            return Err(Error::NotPowerOfTwo(n));
        }
        Ok(HiddenMatchingProblem { n })
    }

    pub fn sample(&self, rng: &mut ChaCha8Rng) -> (BitString, Matching) {
        (BitString::random(self.n, rng), random_matching(self.n, rng))
    }

    pub fn wins(&self, x: &BitString, m: &Matching, out: &HmOutput) -> Result<bool> {
        let (i, j) = out.pair;
        if m.pair_position(i, j).is_none() {
            return Err(Error::InvalidOutput(format!(
                "pair ({i},{j}) is not in Bob's matching"
            )));
        }
        if out.v > 1 {
            return Err(Error::InvalidOutput(format!("v must be 0 or 1, got {}", out.v)));
        }
        Ok((out.v == 1) == (x.get(i) ^ x.get(j)))
    }
}

/// Bob's answer: a pair of his matching and the predicted parity bit.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct HmOutput {
    pub pair: (usize, usize),
    pub v: u8,
}

/// A deterministic one-way protocol: Alice encodes x into a c-bit message,
/// Bob decodes (message, matching) into a pair and a bit.
pub struct OneWayProtocol {
    pub c: usize,
    alice: Box<dyn Fn(&BitString) -> BitString + Send + Sync>,
    bob: Box<dyn Fn(&BitString, &Matching) -> HmOutput + Send + Sync>,
}

impl OneWayProtocol {
    pub fn new(
        c: usize,
        alice: impl Fn(&BitString) -> BitString + Send + Sync + 'static,
        bob: impl Fn(&BitString, &Matching) -> HmOutput + Send + Sync + 'static,
    ) -> Self {
        OneWayProtocol {
            c,
            alice: Box::new(alice),
            bob: Box::new(bob),
        }
    }

    pub fn encode(&self, x: &BitString) -> Result<BitString> {
        let msg = (self.alice)(x);
        if msg.len() != self.c {
            return Err(Error::InvalidOutput(format!(
                "message has {} bits, budget is {}",
                msg.len(),
                self.c
            )));
        }
        Ok(msg)
    }

    pub fn decode(&self, msg: &BitString, m: &Matching) -> HmOutput {
        (self.bob)(msg, m)
    }
}

/// A protocol family over shared randomness.
pub struct SharedProtocol {
    pub c: usize,
    make: Box<dyn Fn(u64) -> OneWayProtocol + Send + Sync>,
}

impl SharedProtocol {
    pub fn new(c: usize, make: impl Fn(u64) -> OneWayProtocol + Send + Sync + 'static) -> Self {
        SharedProtocol {
            c,
            make: Box::new(make),
        }
    }

    pub fn instance(&self, seed: u64) -> OneWayProtocol {
        (self.make)(seed)
    }
}

/// Integer distance threshold for "candidate string is close enough".
///
/// With an explicit beta the threshold is sqrt(n)/2 - beta * n^(1/4), taken
/// as a floor. The calibrated default instead picks the smallest integer t
/// whose per-candidate hit probability q(t) = Pr[Bin(sqrt n, 1/2) <= t]
/// makes the "found a close candidate" event land with probability at least
/// 0.9 across the 2^(c/2) - 1 candidates.
pub fn hm_comm_threshold(n: usize, c: usize, beta: Option<f64>) -> usize {
    let sqrt_n = (n as f64).sqrt().round() as usize;
    match beta {
        Some(b) => {
            let t = sqrt_n as f64 / 2.0 - b * (n as f64).powf(0.25);
            t.max(0.0).floor() as usize
        }
        None => {
            let candidates = (1usize << (c / 2)) - 1;
            for t in 0..=sqrt_n {
                let q = binomial_half_cdf(sqrt_n, t);
                let found = 1.0 - (1.0 - q).powi(candidates as i32);
                if found >= 0.9 {
                    return t;
                }
            }
            sqrt_n
        }
    }
}

fn restrict(x: &BitString, subset: &[usize]) -> BitString {
    let mut r = BitString::zeros(subset.len());
    for (p, &i) in subset.iter().enumerate() {
        r.set(p, x.get(i));
    }
    r
}

fn first_close(target: &BitString, cands: &[BitString], threshold: usize) -> u64 {
    for (l, cand) in cands.iter().enumerate() {
        if target.distance(cand).expect("equal lengths") <= threshold {
            return l as u64 + 1;
        }
    }
    0
}

fn matching_fingerprint(m: &Matching) -> u64 {
    let mut h = 0xcbf29ce484222325u64;
    for &(a, b) in m.pairs() {
        h ^= (a as u64) << 32 | b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e3779b97f4a7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// The c-bit shared-randomness protocol: both players pick two disjoint
/// sqrt(n)-subsets S1, S2 and 2^(c/2) - 1 candidate sqrt(n)-bit strings per
/// subset; Alice sends the index of the first candidate close to her
/// restriction (0 meaning "none") for each half, and Bob predicts the parity
/// when his matching joins S1 to S2 and both halves were approximated,
/// otherwise answers with a shared-randomness coin.
pub fn hm_comm_protocol(n: usize, c: usize, beta: Option<f64>) -> Result<SharedProtocol> {
    if n < 2 || !n.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(n));
    }
    let sqrt_n = (n as f64).sqrt().round() as usize;
    if sqrt_n * sqrt_n != n {
        return Err(Error::InvalidParameter(format!(
            "n must have an integer square root, got {n}"
        )));
    }
    if c % 2 != 0 || c < 4 || c > sqrt_n {
        return Err(Error::InvalidParameter(format!(
            "communication budget must be even with 4 <= c <= sqrt(n), got c={c}, n={n}"
        )));
    }
    let threshold = hm_comm_threshold(n, c, beta);
    let half_bits = c / 2;
    let candidates = (1usize << half_bits) - 1;

    Ok(SharedProtocol::new(c, move |seed| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut indices: Vec<usize> = (0..n).collect();
        indices.shuffle(&mut rng);
        let mut s1: Vec<usize> = indices[..sqrt_n].to_vec();
        let mut s2: Vec<usize> = indices[sqrt_n..2 * sqrt_n].to_vec();
        s1.sort_unstable();
        s2.sort_unstable();
        let cands1: Vec<BitString> = (0..candidates)
            .map(|_| BitString::random(sqrt_n, &mut rng))
            .collect();
        let cands2: Vec<BitString> = (0..candidates)
            .map(|_| BitString::random(sqrt_n, &mut rng))
            .collect();
        let coin_key: u64 = rng.gen();

        let s1_a = s1.clone();
        let s2_a = s2.clone();
        let cands1_a = cands1.clone();
        let cands2_a = cands2.clone();
        let alice = move |x: &BitString| {
            let l1 = first_close(&restrict(x, &s1_a), &cands1_a, threshold);
            let l2 = first_close(&restrict(x, &s2_a), &cands2_a, threshold);
            let packed = (l1 << half_bits) | l2;
            BitString::from_index(packed, 2 * half_bits)
        };

        let bob = move |msg: &BitString, m: &Matching| {
            let packed = msg.to_index() as u64;
            let l1 = (packed >> half_bits) as usize;
            let l2 = (packed & ((1 << half_bits) - 1)) as usize;
            let bridge = m.pairs().iter().copied().find(|&(i, j)| {
                (s1.binary_search(&i).is_ok() && s2.binary_search(&j).is_ok())
                    || (s2.binary_search(&i).is_ok() && s1.binary_search(&j).is_ok())
            });
            if let (Some((i, j)), true) = (bridge, l1 > 0 && l2 > 0) {
                let (in_s1, in_s2) = if s1.binary_search(&i).is_ok() {
                    (i, j)
                } else {
                    (j, i)
                };
                let p1 = s1.binary_search(&in_s1).expect("membership checked");
                let p2 = s2.binary_search(&in_s2).expect("membership checked");
                let pred1 = cands1[l1 - 1].get(p1);
                let pred2 = cands2[l2 - 1].get(p2);
                HmOutput {
                    pair: (i, j),
                    v: u8::from(pred1 ^ pred2),
                }
            } else {
                // No usable prediction: first pair, shared-randomness coin.
                let coin = splitmix(coin_key ^ msg.fnv64() ^ matching_fingerprint(m)) & 1;
                HmOutput {
                    pair: m.pairs()[0],
                    v: coin as u8,
                }
            }
        };

        OneWayProtocol::new(c, alice, bob)
    }))
}

/// Exact value of a fixed (deterministic) protocol instance, enumerating all
/// x and all full-family matchings. Only available for n under the matching
/// enumeration cap.
pub fn hm_protocol_value_exact(n: usize, proto: &OneWayProtocol) -> Result<f64> {
    let problem = HiddenMatchingProblem::new(n)?;
    let matchings = full_matchings(n)?;
    let mut total = 0.0;
    let mut count = 0u64;
    for x in BitString::enumerate(n) {
        let msg = proto.encode(&x)?;
        for m in &matchings {
            let out = proto.decode(&msg, m);
            total += f64::from(problem.wins(&x, m, &out)?);
            count += 1;
        }
    }
    Ok(total / count as f64)
}

/// Monte-Carlo value of a shared-randomness protocol; trial t uses ChaCha
/// stream t of the master seed for the shared randomness and the inputs.
pub fn hm_protocol_value_mc(
    problem: &HiddenMatchingProblem,
    proto: &SharedProtocol,
    trials: u64,
    seed: u64,
) -> Result<McEstimate> {
    assert!(trials >= 1, "at least one trial required");
    let wins = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(t);
            let instance_seed: u64 = rng.gen();
            let instance = proto.instance(instance_seed);
            let (x, m) = problem.sample(&mut rng);
            let msg = instance.encode(&x)?;
            let out = instance.decode(&msg, &m);
            Ok::<u64, crate::Error>(u64::from(problem.wins(&x, &m, &out)?))
        })
        .try_reduce(|| 0u64, |a, b| Ok(a + b))?;
    let p = wins as f64 / trials as f64;
    Ok(McEstimate {
        estimate: p,
        stderr: (p * (1.0 - p) / trials as f64).sqrt(),
        trials,
        seed,
    })
}

/// Turns a non-local Hidden Matching strategy into a one-way protocol with
/// log2(n) bits: Alice sends her answer a, Bob replays his answer (i, j), d
/// and outputs v = (a . (i xor j)) xor d. The protocol wins exactly when the
/// strategy wins, round by round.
pub fn hmnl_to_hm_protocol<S>(game: &HmnlGame, strategy: S) -> OneWayProtocol
where
    S: Strategy<HmnlGame> + Send + Sync + 'static,
{
    let m_bits = game.index_bits();
    let strategy = std::sync::Arc::new(strategy);
    let s_a = strategy.clone();
    OneWayProtocol::new(
        m_bits,
        move |x: &BitString| s_a.alice(x),
        move |msg: &BitString, mat: &Matching| {
            let out = strategy.bob(mat);
            let (i, j) = out.pair;
            let idx_xor = crate::bitcore::index_string(i, m_bits)
                .xor(&crate::bitcore::index_string(j, m_bits))
                .expect("index strings share a length");
            let v = msg.dot(&idx_xor).expect("message length matches") ^ (out.d == 1);
            HmOutput {
                pair: (i, j),
                v: u8::from(v),
            }
        },
    )
}
