use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::bitcore::{fourier_transform, p_norm};
use crate::{Error, Result};

/// The exact classical upper bound for the Khot-Vishnoi game:
/// n^(-eta / (1 - eta)). At eta = 1/2 this is 1/n; at eta = 0 it is 1.
pub fn kv_classical_bound(n: usize, eta: f64) -> Result<f64> {
    if n < 2 || !n.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(n));
    }
    if !(0.0..=0.5).contains(&eta) {
        return Err(Error::InvalidParameter(format!(
            "noise rate eta must lie in [0, 1/2], got {eta}"
        )));
    }
    Ok((n as f64).powf(-eta / (1.0 - eta)))
}

/// Both sides of one hypercontractivity instance.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct HypercontractivityCheck<T> {
    /// ||T_rho F||_2, computed through the Fourier spectrum.
    pub lhs: T,
    /// ||F||_{1 + rho^2}, computed directly.
    pub rhs: T,
    pub holds: bool,
}

/// Checks ||T_rho F||_2 <= ||F||_{1 + rho^2} on a dense table: the noise
/// operator scales the coefficient of S by rho^|S|, so the left side is the
/// Parseval norm of the damped spectrum.
pub fn hypercontractivity_check<T: Float>(
    table: &[T],
    rho: T,
) -> Result<HypercontractivityCheck<T>> {
    if rho < T::zero() || rho > T::one() {
        return Err(Error::InvalidParameter(
            "noise parameter rho must lie in [0, 1]".into(),
        ));
    }
    let spectrum = fourier_transform(table)?;
    let mut sq = T::zero();
    for (s, &c) in spectrum.coeffs().iter().enumerate() {
        let damp = rho.powi(s.count_ones() as i32);
        sq = sq + damp * damp * c * c;
    }
    let lhs = sq.sqrt();
    let rhs = p_norm(table, T::one() + rho * rho);
    let tol = T::from(1e-9).expect("tolerance fits the scalar");
    Ok(HypercontractivityCheck {
        lhs,
        rhs,
        holds: lhs <= rhs + tol,
    })
}
