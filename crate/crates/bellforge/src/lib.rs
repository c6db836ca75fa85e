//! # bellforge
//!
//! A laboratory for two-player non-local games. The crate implements three
//! referees — the CHSH game, the non-local Hidden Matching game and the
//! Khot-Vishnoi coset game — together with the classical, shared-randomness
//! and entangled strategies known for them, and the machinery to evaluate
//! everything exactly (enumeration, fast Walsh-Hadamard transform) or by
//! seeded Monte Carlo.
//!
//! The numeric kernels (Walsh-Hadamard transform, noise operators, norms,
//! state vectors) are generic over the scalar type via [`num_traits::Float`];
//! the game layer works with the concrete [`Real`] alias.

pub mod bitcore;
pub mod cli;
mod error;
pub mod games;
pub mod optimize;
pub mod quantum;
pub mod stats;
pub mod strategies;

pub use error::{Error, Result};

/// Concrete scalar used by the game layer.
pub type Real = f64;

/// Concrete complex amplitude type used by the game layer.
pub type Cplx = num_complex::Complex<Real>;
