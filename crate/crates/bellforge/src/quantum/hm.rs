//! The log2(n)-qubit one-way protocol for the Hidden Matching communication
//! problem: Alice sends the phase state of her input, Bob measures it in the
//! pair basis of his matching and reads off the parity bit without error.

use rand_chacha::ChaCha8Rng;

use crate::bitcore::{BitString, Matching};
use crate::quantum::{measure_state, phase_state, LabeledBasis};
use crate::strategies::HmOutput;
use crate::{Error, Real, Result};

/// The exact outcome distribution of Bob's measurement: for each pair
/// (i, j) of M the two outcomes ((i, j), v = 0) for (|i> + |j>)/sqrt(2) and
/// ((i, j), v = 1) for (|i> - |j>)/sqrt(2).
pub fn hm_measurement_distribution(
    x: &BitString,
    m: &Matching,
) -> Result<Vec<(HmOutput, Real)>> {
    let n = x.len();
    if m.n() != n {
        return Err(Error::LengthMismatch(m.n(), n));
    }
    if !n.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(n));
    }
    let state = phase_state::<Real>(x);
    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    let mut vectors = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for &(i, j) in m.pairs() {
        for v in 0..2u8 {
            let mut vec = vec![0.0; n];
            vec[i] = inv_sqrt2;
            vec[j] = if v == 0 { inv_sqrt2 } else { -inv_sqrt2 };
            vectors.push(vec);
            labels.push(HmOutput { pair: (i, j), v });
        }
    }
    let basis = LabeledBasis::from_real(vectors, labels)?;
    let probs = measure_state(&state, &basis)?;
    Ok(basis
        .labels()
        .iter()
        .cloned()
        .zip(probs)
        .collect())
}

/// One run of the protocol: sample Bob's measurement outcome. The returned
/// bit v always equals x_i xor x_j.
pub fn hm_quantum_protocol(
    x: &BitString,
    m: &Matching,
    rng: &mut ChaCha8Rng,
) -> Result<HmOutput> {
    use rand::Rng;
    let dist = hm_measurement_distribution(x, m)?;
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    for (out, p) in &dist {
        acc += p;
        if u < acc {
            return Ok(out.clone());
        }
    }
    Ok(dist.last().expect("distribution is nonempty").0.clone())
}
