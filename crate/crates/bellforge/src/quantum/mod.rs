//! State-vector simulation of two-party projective-measurement strategies on
//! shared entangled states, plus the explicit quantum constructions for the
//! built-in games and the log2(n)-qubit communication protocol.
//!
//! The state and measurement kernels are generic over the scalar; the
//! game-facing strategies use the crate's [`Real`] alias.

use num_complex::Complex;
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::games::{EnumerableGame, IndexedGame, NonlocalGame};
use crate::strategies::McEstimate;
use crate::{Error, Real, Result};

mod chsh;
mod hm;
mod hmnl;
mod kv;

pub use chsh::{chsh_quantum_strategy, chsh_quantum_value, rotation_basis};
pub use hm::{hm_measurement_distribution, hm_quantum_protocol};
pub use hmnl::{hmnl_circuit_run, hmnl_quantum_strategy, HmnlCircuitTranscript};
pub use kv::{
    kv_pair_probability, kv_quantum_strategy, kv_quantum_value, kv_win_prob_given_z, sign_vector,
};

const UNIT_NORM_TOL: f64 = 1e-12;
const ORTHONORMAL_TOL: f64 = 1e-9;

/// A pure state: a complex amplitude vector with unit 2-norm.
#[derive(Clone, Debug)]
pub struct StateVector<T: Float> {
    amps: Vec<Complex<T>>,
}

impl<T: Float> StateVector<T> {
    pub fn new(amps: Vec<Complex<T>>) -> Result<Self> {
        let sv = StateVector { amps };
        let norm = sv.norm().to_f64().expect("norm fits f64");
        if (norm - 1.0).abs() > UNIT_NORM_TOL {
            return Err(Error::InvalidParameter(format!(
                "state vector norm {norm} deviates from 1 beyond {UNIT_NORM_TOL:e}"
            )));
        }
        Ok(sv)
    }

    /// The maximally entangled state (1/sqrt(d)) sum_i |i>|i> on d^2 amplitudes.
    pub fn maximally_entangled(d: usize) -> Self {
        let mut amps = vec![Complex::new(T::zero(), T::zero()); d * d];
        let coeff = T::one() / T::from(d).expect("dimension fits the scalar").sqrt();
        for i in 0..d {
            amps[i * d + i] = Complex::new(coeff, T::zero());
        }
        StateVector { amps }
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amps(&self) -> &[Complex<T>] {
        &self.amps
    }

    pub fn norm(&self) -> T {
        self.amps
            .iter()
            .fold(T::zero(), |acc, a| acc + a.norm_sqr())
            .sqrt()
    }
}

/// The phase state (1/sqrt(n)) sum_i (-1)^(x_i) |i>.
pub fn phase_state<T: Float>(x: &crate::bitcore::BitString) -> StateVector<T> {
    let n = x.len();
    let coeff = T::one() / T::from(n).expect("dimension fits the scalar").sqrt();
    let amps = (0..n)
        .map(|i| {
            let sign = if x.get(i) { -coeff } else { coeff };
            Complex::new(sign, T::zero())
        })
        .collect();
    StateVector { amps }
}

/// An orthonormal measurement basis whose vectors carry output labels.
pub struct LabeledBasis<L, T: Float = Real> {
    vectors: Vec<Vec<Complex<T>>>,
    labels: Vec<L>,
}

impl<L, T: Float> LabeledBasis<L, T> {
    /// Validates a complete orthonormal basis: `dim` vectors of length `dim`,
    /// pairwise inner products within 1e-9 of the identity.
    pub fn new(vectors: Vec<Vec<Complex<T>>>, labels: Vec<L>) -> Result<Self> {
        let dim = vectors.len();
        if labels.len() != dim {
            return Err(Error::DimensionMismatch(format!(
                "{} labels for {} basis vectors",
                labels.len(),
                dim
            )));
        }
        if vectors.iter().any(|v| v.len() != dim) {
            return Err(Error::DimensionMismatch(
                "basis vectors must have length equal to the basis size".into(),
            ));
        }
        let tol = T::from(ORTHONORMAL_TOL).expect("tolerance fits the scalar");
        for i in 0..dim {
            for j in i..dim {
                let mut ip = Complex::new(T::zero(), T::zero());
                for k in 0..dim {
                    ip = ip + vectors[i][k].conj() * vectors[j][k];
                }
                let target = if i == j { T::one() } else { T::zero() };
                if (ip.re - target).abs() > tol || ip.im.abs() > tol {
                    return Err(Error::NonOrthonormalBasis(format!(
                        "<v{i}, v{j}> = {} + {}i",
                        ip.re.to_f64().unwrap_or(f64::NAN),
                        ip.im.to_f64().unwrap_or(f64::NAN)
                    )));
                }
            }
        }
        Ok(LabeledBasis { vectors, labels })
    }

    /// Convenience constructor from real vectors.
    pub fn from_real(vectors: Vec<Vec<T>>, labels: Vec<L>) -> Result<Self> {
        let complex = vectors
            .into_iter()
            .map(|v| v.into_iter().map(|r| Complex::new(r, T::zero())).collect())
            .collect();
        Self::new(complex, labels)
    }

    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    pub fn labels(&self) -> &[L] {
        &self.labels
    }

    pub fn vectors(&self) -> &[Vec<Complex<T>>] {
        &self.vectors
    }
}

/// Probabilities of measuring a single-system state in the given basis.
pub fn measure_state<L, T: Float>(
    state: &StateVector<T>,
    basis: &LabeledBasis<L, T>,
) -> Result<Vec<T>> {
    if basis.dim() != state.dim() {
        return Err(Error::DimensionMismatch(format!(
            "basis dimension {} vs state dimension {}",
            basis.dim(),
            state.dim()
        )));
    }
    Ok(basis
        .vectors
        .iter()
        .map(|v| {
            let mut amp = Complex::new(T::zero(), T::zero());
            for (vi, si) in v.iter().zip(&state.amps) {
                amp = amp + vi.conj() * *si;
            }
            amp.norm_sqr()
        })
        .collect())
}

/// Joint outcome distribution of measuring a bipartite state (d^2 amplitudes,
/// row-major in (i, j)) with Alice's and Bob's bases: row-major (a, b)
/// probabilities. The distribution is validated to sum to 1 within 1e-9.
pub fn joint_distribution<LA, LB, T: Float>(
    state: &StateVector<T>,
    alice: &LabeledBasis<LA, T>,
    bob: &LabeledBasis<LB, T>,
) -> Result<Vec<T>> {
    let d = alice.dim();
    if bob.dim() != d || state.dim() != d * d {
        return Err(Error::DimensionMismatch(format!(
            "alice dim {}, bob dim {}, state dim {}",
            d,
            bob.dim(),
            state.dim()
        )));
    }
    // partial[a][j] = sum_i conj(e_a[i]) psi[i, j]
    let zero = Complex::new(T::zero(), T::zero());
    let mut partial = vec![zero; d * d];
    for (a, ea) in alice.vectors.iter().enumerate() {
        for j in 0..d {
            let mut acc = zero;
            for (i, ei) in ea.iter().enumerate() {
                acc = acc + ei.conj() * state.amps[i * d + j];
            }
            partial[a * d + j] = acc;
        }
    }
    let mut probs = vec![T::zero(); d * d];
    let mut total = T::zero();
    for (b, fb) in bob.vectors.iter().enumerate() {
        for a in 0..d {
            let mut amp = zero;
            for (j, fj) in fb.iter().enumerate() {
                amp = amp + partial[a * d + j] * fj.conj();
            }
            let p = amp.norm_sqr();
            probs[a * d + b] = p;
            total = total + p;
        }
    }
    let tol = T::from(1e-9).expect("tolerance fits the scalar");
    if (total - T::one()).abs() > tol {
        return Err(Error::InvalidParameter(format!(
            "joint outcome probabilities sum to {}",
            total.to_f64().unwrap_or(f64::NAN)
        )));
    }
    Ok(probs)
}

/// A two-party projective strategy: a shared bipartite state and one labeled
/// measurement basis per input on each side. Bases are produced lazily so
/// exponentially large input sets stay cheap.
pub struct ProjectiveStrategy<G: NonlocalGame> {
    dim: usize,
    state: StateVector<Real>,
    alice_basis: Box<dyn Fn(&G::AliceIn) -> Result<LabeledBasis<G::AliceOut>> + Send + Sync>,
    bob_basis: Box<dyn Fn(&G::BobIn) -> Result<LabeledBasis<G::BobOut>> + Send + Sync>,
}

impl<G: NonlocalGame> ProjectiveStrategy<G> {
    pub fn new(
        dim: usize,
        state: StateVector<Real>,
        alice_basis: impl Fn(&G::AliceIn) -> Result<LabeledBasis<G::AliceOut>>
            + Send
            + Sync
            + 'static,
        bob_basis: impl Fn(&G::BobIn) -> Result<LabeledBasis<G::BobOut>> + Send + Sync + 'static,
    ) -> Result<Self> {
        if state.dim() != dim * dim {
            return Err(Error::DimensionMismatch(format!(
                "shared state must have {} amplitudes, got {}",
                dim * dim,
                state.dim()
            )));
        }
        Ok(ProjectiveStrategy {
            dim,
            state,
            alice_basis: Box::new(alice_basis),
            bob_basis: Box::new(bob_basis),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn state(&self) -> &StateVector<Real> {
        &self.state
    }

    pub fn alice_basis(&self, x: &G::AliceIn) -> Result<LabeledBasis<G::AliceOut>> {
        (self.alice_basis)(x)
    }

    pub fn bob_basis(&self, y: &G::BobIn) -> Result<LabeledBasis<G::BobOut>> {
        (self.bob_basis)(y)
    }

    /// The joint label distribution on inputs (x, y).
    pub fn joint(
        &self,
        x: &G::AliceIn,
        y: &G::BobIn,
    ) -> Result<(
        LabeledBasis<G::AliceOut>,
        LabeledBasis<G::BobOut>,
        Vec<Real>,
    )> {
        let ea = self.alice_basis(x)?;
        let fb = self.bob_basis(y)?;
        let probs = joint_distribution(&self.state, &ea, &fb)?;
        Ok((ea, fb, probs))
    }
}

/// Exact value of a projective strategy: the expectation over the game's
/// enumerator of the win probability under the joint outcome distribution.
/// Bases are cached per input index.
pub fn eval_quantum_exact<G: EnumerableGame>(
    ig: &IndexedGame<G>,
    qs: &ProjectiveStrategy<G>,
) -> Result<f64> {
    let d = qs.dim();
    // Cache bases and the label -> output-position maps per input.
    let mut alice_cache: Vec<Option<(LabeledBasis<G::AliceOut>, Vec<usize>)>> = Vec::new();
    alice_cache.resize_with(ig.n_x(), || None);
    let mut bob_cache: Vec<Option<(LabeledBasis<G::BobOut>, Vec<usize>)>> = Vec::new();
    bob_cache.resize_with(ig.n_y(), || None);

    let mut value = 0.0;
    for (ei, e) in ig.entries().iter().enumerate() {
        if alice_cache[e.x].is_none() {
            let basis = qs.alice_basis(&ig.alice_inputs()[e.x])?;
            let map = basis
                .labels()
                .iter()
                .map(|l| ig.alice_output_index(e.x, l))
                .collect::<Result<Vec<_>>>()?;
            alice_cache[e.x] = Some((basis, map));
        }
        if bob_cache[e.y].is_none() {
            let basis = qs.bob_basis(&ig.bob_inputs()[e.y])?;
            let map = basis
                .labels()
                .iter()
                .map(|l| ig.bob_output_index(e.y, l))
                .collect::<Result<Vec<_>>>()?;
            bob_cache[e.y] = Some((basis, map));
        }
        let (ea, amap) = alice_cache[e.x].as_ref().expect("just filled");
        let (fb, bmap) = bob_cache[e.y].as_ref().expect("just filled");
        let probs = joint_distribution(&qs.state, ea, fb)?;
        let mut round = 0.0;
        for a in 0..d {
            for b in 0..d {
                let p = probs[a * d + b];
                if p > 0.0 {
                    round += p * ig.win(ei, amap[a], bmap[b]);
                }
            }
        }
        value += e.p * round;
    }
    Ok(value)
}

/// One sampled round of a projective strategy.
#[derive(Clone, Debug)]
pub struct QuantumRound<G: NonlocalGame> {
    pub x: G::AliceIn,
    pub y: G::BobIn,
    pub aux: G::Aux,
    pub a: G::AliceOut,
    pub b: G::BobOut,
    pub win: bool,
}

fn sample_index<R: Rng>(probs: &[Real], rng: &mut R) -> usize {
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    for (i, &p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    probs.len() - 1
}

/// Samples one full round: referee inputs, joint measurement outcome, and
/// the win flag.
pub fn sample_quantum_round<G: NonlocalGame>(
    game: &G,
    qs: &ProjectiveStrategy<G>,
    rng: &mut ChaCha8Rng,
) -> Result<QuantumRound<G>> {
    let (x, y, aux) = game.sample_round(rng);
    let (ea, fb, probs) = qs.joint(&x, &y)?;
    let idx = sample_index(&probs, rng);
    let d = qs.dim();
    let a = ea.labels()[idx / d].clone();
    let b = fb.labels()[idx % d].clone();
    let p = game.win_prob(&x, &y, &aux, &a, &b)?;
    let win = if p >= 1.0 {
        true
    } else if p <= 0.0 {
        false
    } else {
        rng.gen_bool(p)
    };
    Ok(QuantumRound {
        x,
        y,
        aux,
        a,
        b,
        win,
    })
}

/// Monte-Carlo value of a projective strategy, counter-seeded per trial.
pub fn eval_quantum_mc<G>(
    game: &G,
    qs: &ProjectiveStrategy<G>,
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
            let round = sample_quantum_round(game, qs, &mut rng)?;
            Ok::<u64, Error>(u64::from(round.win))
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

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bitcore::BitString;

    #[test]
    fn maximally_entangled_state_is_unit() {
        for d in [2usize, 4, 8, 16] {
            let s = StateVector::<f64>::maximally_entangled(d);
            assert!((s.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn state_norm_is_validated() {
        let bad = vec![Complex::new(1.0f64, 0.0); 2];
        assert!(StateVector::new(bad).is_err());
    }

    #[test]
    fn phase_state_signs() {
        let x: BitString = "0110".parse().unwrap();
        let s = phase_state::<f64>(&x);
        assert!((s.amps()[0].re - 0.5).abs() < 1e-15);
        assert!((s.amps()[1].re + 0.5).abs() < 1e-15);
        assert!((s.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn non_orthonormal_bases_are_rejected() {
        let vecs = vec![vec![1.0f64, 0.0], vec![1.0, 0.0]];
        assert!(matches!(
            LabeledBasis::from_real(vecs, vec![0u8, 1u8]),
            Err(Error::NonOrthonormalBasis(_))
        ));
    }

    #[test]
    fn identical_real_bases_give_perfect_correlation() {
        // On the maximally entangled state, measuring both halves in the
        // same real basis always yields equal outcomes.
        let d = 4usize;
        let theta = 0.7f64;
        let mut vecs = vec![vec![0.0f64; d]; d];
        vecs[0][0] = theta.cos();
        vecs[0][1] = theta.sin();
        vecs[1][0] = -theta.sin();
        vecs[1][1] = theta.cos();
        vecs[2][2] = 1.0;
        vecs[3][3] = 1.0;
        let ba = LabeledBasis::from_real(vecs.clone(), vec![0u8, 1, 2, 3]).unwrap();
        let bb = LabeledBasis::from_real(vecs, vec![0u8, 1, 2, 3]).unwrap();
        let state = StateVector::maximally_entangled(d);
        let probs = joint_distribution(&state, &ba, &bb).unwrap();
        let mut agree = 0.0;
        for a in 0..d {
            for b in 0..d {
                if a == b {
                    agree += probs[a * d + b];
                } else {
                    assert!(probs[a * d + b] < 1e-12);
                }
            }
        }
        assert!((agree - 1.0).abs() < 1e-12);
    }

    #[test]
    fn two_dim_relative_angle_gives_cos_squared() {
        let state = StateVector::maximally_entangled(2);
        for theta in [0.0f64, 0.3, std::f64::consts::FRAC_PI_8, 1.1] {
            let ba = rotation_basis(0.0);
            let bb = rotation_basis(theta);
            let probs = joint_distribution(&state, &ba, &bb).unwrap();
            let agree = probs[0] + probs[3];
            assert!(
                (agree - theta.cos().powi(2)).abs() < 1e-12,
                "theta={theta}: {agree}"
            );
        }
    }

    #[test]
    fn joint_distributions_are_normalized_and_nonnegative() {
        let state = StateVector::maximally_entangled(8);
        let x: BitString = "10110100".parse().unwrap();
        let basis = |phase: &BitString| {
            let n = phase.len();
            let scale = 1.0 / (n as f64).sqrt();
            let vecs: Vec<Vec<f64>> = (0..n)
                .map(|a| {
                    (0..n)
                        .map(|i| {
                            let mut sign = if phase.get(i) { -scale } else { scale };
                            if (a & i).count_ones() & 1 == 1 {
                                sign = -sign;
                            }
                            sign
                        })
                        .collect()
                })
                .collect();
            LabeledBasis::from_real(vecs, (0..n).collect()).unwrap()
        };
        let ba = basis(&x);
        let bb = basis(&BitString::zeros(8));
        let probs = joint_distribution(&state, &ba, &bb).unwrap();
        let total: f64 = probs.iter().sum();
        assert!((total - 1.0).abs() < 1e-9);
        assert!(probs.iter().all(|&p| p >= 0.0));
    }
}
