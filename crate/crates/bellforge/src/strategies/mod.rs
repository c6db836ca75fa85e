//! Classical strategy representations, the explicit strategies for the
//! built-in games, and exact / Monte-Carlo / Walsh-Hadamard evaluation of
//! winning probabilities.

use serde::{Deserialize, Serialize};

use crate::games::{IndexedGame, NonlocalGame};
use crate::{Error, Result};

mod eval;
mod hm;
mod hmnl;
mod kv;

pub use eval::{eval_exact, eval_monte_carlo, eval_shared_exact, eval_shared_monte_carlo, McEstimate};
pub use hm::{
    hm_comm_protocol, hm_comm_threshold, hm_protocol_value_exact, hm_protocol_value_mc,
    hmnl_to_hm_protocol, HiddenMatchingProblem, HmOutput, OneWayProtocol, SharedProtocol,
};
pub use hmnl::{
    hmnl_argmax_alice, hmnl_argmax_exact_value, hmnl_argmax_strategy, hmnl_argmax_value_mc,
    hmnl_halfspace_closed_form, hmnl_halfspace_strategy,
};
pub use kv::{
    kv_eval_fwht, kv_maxweight_selector, kv_maxweight_strategy, random_selector,
    selector_strategy, CosetSelector,
};

/// A deterministic strategy for game `G`: one answer per input.
pub trait Strategy<G: NonlocalGame> {
    fn alice(&self, x: &G::AliceIn) -> G::AliceOut;
    fn bob(&self, y: &G::BobIn) -> G::BobOut;
}

impl<G: NonlocalGame, S: Strategy<G> + ?Sized> Strategy<G> for &S {
    fn alice(&self, x: &G::AliceIn) -> G::AliceOut {
        (**self).alice(x)
    }

    fn bob(&self, y: &G::BobIn) -> G::BobOut {
        (**self).bob(y)
    }
}

/// A strategy given by a pair of closures.
pub struct ClosureStrategy<G: NonlocalGame> {
    alice: Box<dyn Fn(&G::AliceIn) -> G::AliceOut + Send + Sync>,
    bob: Box<dyn Fn(&G::BobIn) -> G::BobOut + Send + Sync>,
}

impl<G: NonlocalGame> ClosureStrategy<G> {
    pub fn new(
        alice: impl Fn(&G::AliceIn) -> G::AliceOut + Send + Sync + 'static,
        bob: impl Fn(&G::BobIn) -> G::BobOut + Send + Sync + 'static,
    ) -> Self {
        ClosureStrategy {
            alice: Box::new(alice),
            bob: Box::new(bob),
        }
    }
}

impl<G: NonlocalGame> Strategy<G> for ClosureStrategy<G> {
    fn alice(&self, x: &G::AliceIn) -> G::AliceOut {
        (self.alice)(x)
    }

    fn bob(&self, y: &G::BobIn) -> G::BobOut {
        (self.bob)(y)
    }
}

/// A deterministic strategy as positional output choices against an
/// [`IndexedGame`]'s canonical input/output order. This is the serialized
/// form (maps as arrays) and the unit brute force and local search work on.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug, Serialize, Deserialize)]
pub struct TabularStrategy {
    pub alice: Vec<usize>,
    pub bob: Vec<usize>,
}

impl TabularStrategy {
    pub fn validate<G: crate::games::EnumerableGame>(&self, ig: &IndexedGame<G>) -> Result<()> {
        if self.alice.len() != ig.n_x() || self.bob.len() != ig.n_y() {
            return Err(Error::DimensionMismatch(
                "strategy tables do not match the game's input sets".into(),
            ));
        }
        if self.alice.iter().any(|&a| a >= ig.k_a()) || self.bob.iter().any(|&b| b >= ig.k_b()) {
            return Err(Error::InvalidOutput(
                "strategy table entry outside the output set".into(),
            ));
        }
        Ok(())
    }
}

/// A tabular strategy bound to its game view, usable as a typed [`Strategy`].
pub struct BoundTabular<'a, G: crate::games::EnumerableGame> {
    pub ig: &'a IndexedGame<G>,
    pub tab: &'a TabularStrategy,
}

impl<G: crate::games::EnumerableGame> Strategy<G> for BoundTabular<'_, G> {
    fn alice(&self, x: &G::AliceIn) -> G::AliceOut {
        let xi = self
            .ig
            .alice_input_index(x)
            .expect("input comes from the game's domain");
        self.ig.alice_outputs(xi)[self.tab.alice[xi]].clone()
    }

    fn bob(&self, y: &G::BobIn) -> G::BobOut {
        let yi = self
            .ig
            .bob_input_index(y)
            .expect("input comes from the game's domain");
        self.ig.bob_outputs(yi)[self.tab.bob[yi]].clone()
    }
}

/// A strategy using shared randomness: a family of deterministic strategies
/// indexed by seed. Its value is the average over seeds.
pub struct SharedRandomnessStrategy<G: NonlocalGame> {
    make: Box<dyn Fn(u64) -> ClosureStrategy<G> + Send + Sync>,
}

impl<G: NonlocalGame> SharedRandomnessStrategy<G> {
    pub fn new(make: impl Fn(u64) -> ClosureStrategy<G> + Send + Sync + 'static) -> Self {
        SharedRandomnessStrategy {
            make: Box::new(make),
        }
    }

    /// The deterministic strategy for one shared-randomness seed.
    pub fn instance(&self, seed: u64) -> ClosureStrategy<G> {
        (self.make)(seed)
    }
}
