use std::collections::HashMap;

use crate::games::EnumerableGame;
use crate::{Error, Result};

/// One enumerator entry with inputs flattened to positional indices.
#[derive(Clone, Debug)]
pub struct RoundEntry<Aux> {
    pub x: usize,
    pub y: usize,
    pub aux: Aux,
    pub p: f64,
}

/// Cap on the materialized win table (entries * k_a * k_b values).
const WIN_TABLE_CAP: usize = 1 << 24;

/// A materialized view of an enumerable game: input and output lists in
/// canonical order, the exact enumerator with indexed inputs, and (when it
/// fits) a dense table of win probabilities for fast brute force and local
/// search.
pub struct IndexedGame<G: EnumerableGame> {
    game: G,
    alice_inputs: Vec<G::AliceIn>,
    bob_inputs: Vec<G::BobIn>,
    alice_outputs: Vec<Vec<G::AliceOut>>,
    bob_outputs: Vec<Vec<G::BobOut>>,
    ka: usize,
    kb: usize,
    entries: Vec<RoundEntry<G::Aux>>,
    entries_by_x: Vec<Vec<u32>>,
    entries_by_y: Vec<Vec<u32>>,
    win_table: Option<Vec<f64>>,
}

impl<G: EnumerableGame> IndexedGame<G> {
    pub fn new(game: G) -> Result<Self> {
        let alice_inputs = game.alice_inputs();
        let bob_inputs = game.bob_inputs();
        let x_index: HashMap<&G::AliceIn, usize> = alice_inputs
            .iter()
            .enumerate()
            .map(|(i, x)| (x, i))
            .collect();
        let y_index: HashMap<&G::BobIn, usize> = bob_inputs
            .iter()
            .enumerate()
            .map(|(i, y)| (y, i))
            .collect();

        let alice_outputs: Vec<Vec<G::AliceOut>> =
            alice_inputs.iter().map(|x| game.alice_outputs(x)).collect();
        let bob_outputs: Vec<Vec<G::BobOut>> =
            bob_inputs.iter().map(|y| game.bob_outputs(y)).collect();
        let ka = alice_outputs.first().map_or(0, Vec::len);
        let kb = bob_outputs.first().map_or(0, Vec::len);
        if alice_outputs.iter().any(|o| o.len() != ka) || bob_outputs.iter().any(|o| o.len() != kb)
        {
            return Err(Error::DimensionMismatch(
                "per-input output counts are not uniform".into(),
            ));
        }
        if ka == 0 || kb == 0 {
            return Err(Error::DimensionMismatch("empty output set".into()));
        }

        let mut entries = Vec::new();
        let mut total = 0.0f64;
        for (x, y, aux, p) in game.rounds()? {
            let &xi = x_index
                .get(&x)
                .ok_or_else(|| Error::DimensionMismatch("round input not in input list".into()))?;
            let &yi = y_index
                .get(&y)
                .ok_or_else(|| Error::DimensionMismatch("round input not in input list".into()))?;
            total += p;
            entries.push(RoundEntry { x: xi, y: yi, aux, p });
        }
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "enumerator probabilities sum to {total}, expected 1"
            )));
        }

        let mut entries_by_x = vec![Vec::new(); alice_inputs.len()];
        let mut entries_by_y = vec![Vec::new(); bob_inputs.len()];
        for (i, e) in entries.iter().enumerate() {
            entries_by_x[e.x].push(i as u32);
            entries_by_y[e.y].push(i as u32);
        }

        let mut ig = IndexedGame {
            game,
            alice_inputs,
            bob_inputs,
            alice_outputs,
            bob_outputs,
            ka,
            kb,
            entries,
            entries_by_x,
            entries_by_y,
            win_table: None,
        };
        if ig.entries.len().saturating_mul(ka).saturating_mul(kb) <= WIN_TABLE_CAP {
            let mut table = Vec::with_capacity(ig.entries.len() * ka * kb);
            for e in &ig.entries {
                for a in 0..ka {
                    for b in 0..kb {
                        table.push(ig.win_typed(e, a, b)?);
                    }
                }
            }
            ig.win_table = Some(table);
        }
        Ok(ig)
    }

    fn win_typed(&self, e: &RoundEntry<G::Aux>, a: usize, b: usize) -> Result<f64> {
        self.game.win_prob(
            &self.alice_inputs[e.x],
            &self.bob_inputs[e.y],
            &e.aux,
            &self.alice_outputs[e.x][a],
            &self.bob_outputs[e.y][b],
        )
    }

    /// Win probability of output positions (a, b) on enumerator entry `e`.
    pub fn win(&self, entry_idx: usize, a: usize, b: usize) -> f64 {
        if let Some(table) = &self.win_table {
            table[(entry_idx * self.ka + a) * self.kb + b]
        } else {
            self.win_typed(&self.entries[entry_idx], a, b)
                .expect("positional outputs are structurally valid")
        }
    }

    pub fn game(&self) -> &G {
        &self.game
    }

    pub fn n_x(&self) -> usize {
        self.alice_inputs.len()
    }

    pub fn n_y(&self) -> usize {
        self.bob_inputs.len()
    }

    pub fn k_a(&self) -> usize {
        self.ka
    }

    pub fn k_b(&self) -> usize {
        self.kb
    }

    pub fn alice_inputs(&self) -> &[G::AliceIn] {
        &self.alice_inputs
    }

    pub fn bob_inputs(&self) -> &[G::BobIn] {
        &self.bob_inputs
    }

    pub fn alice_outputs(&self, x: usize) -> &[G::AliceOut] {
        &self.alice_outputs[x]
    }

    pub fn bob_outputs(&self, y: usize) -> &[G::BobOut] {
        &self.bob_outputs[y]
    }

    pub fn entries(&self) -> &[RoundEntry<G::Aux>] {
        &self.entries
    }

    pub fn entries_by_x(&self, x: usize) -> &[u32] {
        &self.entries_by_x[x]
    }

    pub fn entries_by_y(&self, y: usize) -> &[u32] {
        &self.entries_by_y[y]
    }

    /// Probability of the input pair (x, y) under the referee distribution.
    pub fn input_pair_prob(&self, x: usize, y: usize) -> f64 {
        self.entries_by_x[x]
            .iter()
            .map(|&i| &self.entries[i as usize])
            .filter(|e| e.y == y)
            .map(|e| e.p)
            .sum()
    }

    /// Position of a typed Alice output within the canonical list for `x`,
    /// or a structural-output error.
    pub fn alice_output_index(&self, x: usize, a: &G::AliceOut) -> Result<usize> {
        self.alice_outputs[x]
            .iter()
            .position(|o| o == a)
            .ok_or_else(|| {
                Error::InvalidOutput(format!("Alice output {a:?} not valid for input {x}"))
            })
    }

    pub fn bob_output_index(&self, y: usize, b: &G::BobOut) -> Result<usize> {
        self.bob_outputs[y]
            .iter()
            .position(|o| o == b)
            .ok_or_else(|| Error::InvalidOutput(format!("Bob output {b:?} not valid for input {y}")))
    }

    pub fn alice_input_index(&self, x: &G::AliceIn) -> Option<usize> {
        self.alice_inputs.iter().position(|v| v == x)
    }

    pub fn bob_input_index(&self, y: &G::BobIn) -> Option<usize> {
        self.bob_inputs.iter().position(|v| v == y)
    }
}
