//! The perfect entangled strategy for non-local Hidden Matching, in two
//! equivalent forms: a sequential circuit transcript (phase flip, pair
//! projection, local Hadamards, computational measurement) and a single
//! projective strategy whose bases fold the local unitaries in.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::bitcore::{index_string, BitString, Matching};
use crate::games::{HmnlBobOutput, HmnlGame};
use crate::quantum::{LabeledBasis, ProjectiveStrategy, StateVector};
use crate::{Cplx, Error, Real, Result};

/// One sequential run of the protocol on the maximally entangled state.
#[derive(Clone, Debug)]
pub struct HmnlCircuitTranscript {
    /// The pair Bob's projective measurement collapsed onto.
    pub pair: (usize, usize),
    /// Alice's and Bob's computational-basis results after the Hadamards.
    pub a: BitString,
    pub b: BitString,
    /// Bob's reported bit d = b . (i xor j).
    pub d: u8,
    /// The post-Hadamard bipartite state the (a, b) sample was drawn from.
    pub final_state: Vec<Cplx>,
}

impl HmnlCircuitTranscript {
    /// Whether the winning relation (a . (i xor j)) xor d = x_i xor x_j holds.
    pub fn wins(&self, x: &BitString) -> bool {
        let m = self.a.len();
        let (i, j) = self.pair;
        let idx_xor = index_string(i, m)
            .xor(&index_string(j, m))
            .expect("index strings share a length");
        let lhs = self.a.dot(&idx_xor).expect("lengths match") ^ (self.d == 1);
        lhs == (x.get(i) ^ x.get(j))
    }
}

/// Runs the three-step circuit: Alice's phase flip, Bob's pair projection,
/// local Hadamards on both sides, then a computational-basis sample.
pub fn hmnl_circuit_run(
    x: &BitString,
    m: &Matching,
    rng: &mut ChaCha8Rng,
) -> Result<HmnlCircuitTranscript> {
    let n = x.len();
    if m.n() != n {
        return Err(Error::LengthMismatch(m.n(), n));
    }
    if n < 2 || !n.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(n));
    }
    let bits = n.trailing_zeros() as usize;

    // Phase-flipped maximally entangled state has support on |kk> with
    // amplitude (-1)^(x_k) / sqrt(n); Bob's projector P_ij keeps {ii, jj}
    // with probability 2/n per pair.
    let pair_idx = rng.gen_range(0..m.pairs().len());
    let (i, j) = m.pairs()[pair_idx];

    // Collapsed and renormalized: amp(kk) = (-1)^(x_k) / sqrt(2), k in {i, j}.
    // Local Hadamards map |k>|k> to (1/n) sum_{a,b} (-1)^(a.k + b.k) |a>|b>.
    let inv = std::f64::consts::FRAC_1_SQRT_2 / n as Real;
    let mut final_state = vec![Cplx::new(0.0, 0.0); n * n];
    for (a, row) in final_state.chunks_mut(n).enumerate() {
        for (b, amp) in row.iter_mut().enumerate() {
            let mut acc = 0.0;
            for k in [i, j] {
                let mut sign = if x.get(k) { -inv } else { inv };
                if ((a & k).count_ones() + (b & k).count_ones()) & 1 == 1 {
                    sign = -sign;
                }
                acc += sign;
            }
            *amp = Cplx::new(acc, 0.0);
        }
    }

    let u: f64 = rng.gen();
    let mut acc = 0.0;
    let mut sampled = n * n - 1;
    for (idx, amp) in final_state.iter().enumerate() {
        acc += amp.norm_sqr();
        if u < acc {
            sampled = idx;
            break;
        }
    }
    let a = BitString::from_index((sampled / n) as u64, bits);
    let b = BitString::from_index((sampled % n) as u64, bits);
    let idx_xor = index_string(i, bits).xor(&index_string(j, bits))?;
    let d = u8::from(b.dot(&idx_xor)?);
    Ok(HmnlCircuitTranscript {
        pair: (i, j),
        a,
        b,
        d,
        final_state,
    })
}

/// The same strategy as one projective measurement per side: Alice measures
/// in the phase-flipped Hadamard basis, Bob in the pair basis of his
/// matching with labels ((i, j), d).
pub fn hmnl_quantum_strategy(game: &HmnlGame) -> Result<ProjectiveStrategy<HmnlGame>> {
    let n = game.n();
    let bits = game.index_bits();
    let scale = 1.0 / (n as Real).sqrt();
    let alice = move |x: &BitString| {
        let vectors: Vec<Vec<Real>> = (0..n)
            .map(|a| {
                (0..n)
                    .map(|i| {
                        let mut sign = if x.get(i) { -scale } else { scale };
                        if (a & i).count_ones() & 1 == 1 {
                            sign = -sign;
                        }
                        sign
                    })
                    .collect()
            })
            .collect();
        let labels = (0..n)
            .map(|a| BitString::from_index(a as u64, bits))
            .collect();
        LabeledBasis::from_real(vectors, labels)
    };
    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    let bob = move |m: &Matching| {
        let mut vectors = Vec::with_capacity(n);
        let mut labels = Vec::with_capacity(n);
        for &(i, j) in m.pairs() {
            for d in 0..2u8 {
                let mut v = vec![0.0; n];
                v[i] = inv_sqrt2;
                v[j] = if d == 0 { inv_sqrt2 } else { -inv_sqrt2 };
                vectors.push(v);
                labels.push(HmnlBobOutput { pair: (i, j), d });
            }
        }
        LabeledBasis::from_real(vectors, labels)
    };
    ProjectiveStrategy::new(n, StateVector::maximally_entangled(n), alice, bob)
}
