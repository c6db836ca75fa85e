use std::f64::consts::{FRAC_PI_8, PI};

use crate::games::ChshGame;
use crate::quantum::{LabeledBasis, ProjectiveStrategy, StateVector};
use crate::{Real, Result};

/// The two-outcome basis at angle theta: outcome 0 along (cos t, sin t).
pub fn rotation_basis(theta: Real) -> LabeledBasis<u8> {
    LabeledBasis::from_real(
        vec![
            vec![theta.cos(), theta.sin()],
            vec![-theta.sin(), theta.cos()],
        ],
        vec![0u8, 1],
    )
    .expect("rotations are orthonormal")
}

/// The optimal 2-dimensional entangled strategy for CHSH: Alice measures at
/// angles {0, pi/4}, Bob at {pi/8, -pi/8} on one maximally entangled pair.
pub fn chsh_quantum_strategy() -> Result<ProjectiveStrategy<ChshGame>> {
    ProjectiveStrategy::new(
        2,
        StateVector::maximally_entangled(2),
        |x: &u8| Ok(rotation_basis(if *x == 0 { 0.0 } else { PI / 4.0 })),
        |y: &u8| Ok(rotation_basis(if *y == 0 { FRAC_PI_8 } else { -FRAC_PI_8 })),
    )
}

/// cos^2(pi/8), the entangled value this strategy attains.
pub fn chsh_quantum_value() -> Real {
    FRAC_PI_8.cos().powi(2)
}
