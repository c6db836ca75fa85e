//! The entangled Khot-Vishnoi strategy: each player measures its half of the
//! n-dimensional maximally entangled state in the sign-vector basis of its
//! coset and reports the measured coset element.

use num_traits::Float;

use crate::bitcore::BitString;
use crate::games::KvGame;
use crate::quantum::{LabeledBasis, ProjectiveStrategy, StateVector};
use crate::{Error, Real, Result};

/// The unit vector v^a = ((-1)^(a_i) / sqrt(n))_i. Inner products satisfy
/// <v^a, v^b> = 1 - 2 d(a, b) / n.
pub fn sign_vector<T: Float>(a: &BitString) -> Vec<T> {
    let n = a.len();
    let scale = T::one() / T::from(n).expect("length fits the scalar").sqrt();
    (0..n)
        .map(|i| if a.get(i) { -scale } else { scale })
        .collect()
}

/// Pr(a, b) = <v^a, v^b>^2 / n, the closed-form outcome rule for sign-vector
/// bases on the maximally entangled state.
pub fn kv_pair_probability(a: &BitString, b: &BitString) -> Result<Real> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch(a.len(), b.len()));
    }
    let n = a.len() as Real;
    let ip = 1.0 - 2.0 * a.distance(b)? as Real / n;
    Ok(ip * ip / n)
}

/// Winning probability on a round with hidden shift z: (1 - 2 |z| / n)^2.
pub fn kv_win_prob_given_z(n: usize, z_weight: usize) -> Real {
    let ip = 1.0 - 2.0 * z_weight as Real / n as Real;
    ip * ip
}

/// Exact value of the sign-vector strategy: the expectation of
/// (1 - 2 |z| / n)^2 under Binomial(n, eta), in closed form
/// (1 - 2 eta)^2 + 4 eta (1 - eta) / n. Always at least (1 - 2 eta)^2.
pub fn kv_quantum_value(n: usize, eta: f64) -> Result<Real> {
    if n < 2 || !n.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(n));
    }
    if !(0.0..=0.5).contains(&eta) {
        return Err(Error::InvalidParameter(format!(
            "noise rate eta must lie in [0, 1/2], got {eta}"
        )));
    }
    Ok((1.0 - 2.0 * eta).powi(2) + 4.0 * eta * (1.0 - eta) / n as Real)
}

/// The projective strategy itself: per coset, the orthonormal basis of sign
/// vectors of its members (in lexicographic member order).
pub fn kv_quantum_strategy(game: &KvGame) -> Result<ProjectiveStrategy<KvGame>> {
    let n = game.n();
    let subgroup_a = game.subgroup().clone();
    let subgroup_b = game.subgroup().clone();
    let basis_for = move |coset: &crate::bitcore::Coset,
                          subgroup: &crate::bitcore::HadamardSubgroup| {
        let members = subgroup.members(coset);
        let vectors = members.iter().map(sign_vector::<Real>).collect();
        LabeledBasis::from_real(vectors, members)
    };
    let ba = move |x: &crate::bitcore::Coset| basis_for(x, &subgroup_a);
    let basis_for_b = move |coset: &crate::bitcore::Coset,
                            subgroup: &crate::bitcore::HadamardSubgroup| {
        let members = subgroup.members(coset);
        let vectors = members.iter().map(sign_vector::<Real>).collect();
        LabeledBasis::from_real(vectors, members)
    };
    let bb = move |y: &crate::bitcore::Coset| basis_for_b(y, &subgroup_b);
    ProjectiveStrategy::new(n, StateVector::maximally_entangled(n), ba, bb)
}
