//! The referee model: game definitions (CHSH, non-local Hidden Matching,
//! Khot-Vishnoi), their input/aux distributions and win predicates, and the
//! Bell-functional formalism.
//!
//! A game is a typed referee. Inputs and outputs keep their natural types
//! (bit strings, cosets, matchings); the [`IndexedGame`] view flattens the
//! domains to positional indices for exact enumeration, brute force and
//! functional work at small sizes.

use std::fmt::Debug;
use std::hash::Hash;

use rand_chacha::ChaCha8Rng;

use crate::Result;

mod chsh;
mod functional;
mod hmnl;
mod indexed;
mod kv;

pub use chsh::{chsh_game, ChshGame};
pub use functional::{
    behavior_of_tabular, functional_to_game, functional_value, game_to_functional,
    random_behavior, shift_functional, uniform_behavior, AffineMap, BellFunctional,
    FunctionalGame, StrategyBehavior,
};
pub use hmnl::{hm_nl_game, HmnlBobOutput, HmnlGame, MatchingFamily};
pub use indexed::{IndexedGame, RoundEntry};
pub use kv::{kv_game, KvGame};

/// A two-player non-local game: a seeded sampler for (x, y, hidden aux) and
/// a win predicate. The predicate may be randomized: `win_prob` returns the
/// probability that the referee accepts (0 or 1 for deterministic games).
pub trait NonlocalGame {
    type AliceIn: Clone + Eq + Hash + Debug;
    type BobIn: Clone + Eq + Hash + Debug;
    type AliceOut: Clone + Eq + Debug;
    type BobOut: Clone + Eq + Debug;
    type Aux: Clone + Debug;

    fn name(&self) -> String;

    /// Draws one round (x, y, aux) from the referee distribution.
    fn sample_round(&self, rng: &mut ChaCha8Rng) -> (Self::AliceIn, Self::BobIn, Self::Aux);

    /// Probability that outputs (a, b) win on (x, y, aux). Errors if an
    /// output is structurally invalid (outside its domain given the input).
    fn win_prob(
        &self,
        x: &Self::AliceIn,
        y: &Self::BobIn,
        aux: &Self::Aux,
        a: &Self::AliceOut,
        b: &Self::BobOut,
    ) -> Result<f64>;
}

/// Games whose domains and referee distribution can be materialized for
/// exact evaluation.
pub trait EnumerableGame: NonlocalGame {
    fn alice_inputs(&self) -> Vec<Self::AliceIn>;
    fn bob_inputs(&self) -> Vec<Self::BobIn>;

    /// Valid Alice outputs for input `x`, in canonical order. The position
    /// in this list is the output's functional index.
    fn alice_outputs(&self, x: &Self::AliceIn) -> Vec<Self::AliceOut>;
    fn bob_outputs(&self, y: &Self::BobIn) -> Vec<Self::BobOut>;

    /// The exact enumerator: every (x, y, aux) triple with its probability.
    /// Errors when materialization would exceed the game's cap.
    fn rounds(&self) -> Result<Vec<(Self::AliceIn, Self::BobIn, Self::Aux, f64)>>;
}
