use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::games::{EnumerableGame, NonlocalGame};
use crate::{Error, Result};

/// The CHSH calibration game: x, y uniform bits, win iff a XOR b = x AND y.
#[derive(Clone, Debug, Default)]
pub struct ChshGame;

pub fn chsh_game() -> ChshGame {
    ChshGame
}

fn check_bit(v: u8, role: &str) -> Result<()> {
    if v > 1 {
        return Err(Error::InvalidOutput(format!("{role} must be 0 or 1, got {v}")));
    }
    Ok(())
}

impl NonlocalGame for ChshGame {
    type AliceIn = u8;
    type BobIn = u8;
    type AliceOut = u8;
    type BobOut = u8;
    type Aux = ();

    fn name(&self) -> String {
        "chsh".into()
    }

    fn sample_round(&self, rng: &mut ChaCha8Rng) -> (u8, u8, ()) {
        (rng.gen_range(0..2), rng.gen_range(0..2), ())
    }

    fn win_prob(&self, x: &u8, y: &u8, _aux: &(), a: &u8, b: &u8) -> Result<f64> {
        check_bit(*a, "Alice output")?;
        check_bit(*b, "Bob output")?;
        Ok(if (a ^ b) == (x & y) { 1.0 } else { 0.0 })
    }
}

impl EnumerableGame for ChshGame {
    fn alice_inputs(&self) -> Vec<u8> {
        vec![0, 1]
    }

    fn bob_inputs(&self) -> Vec<u8> {
        vec![0, 1]
    }

    fn alice_outputs(&self, _x: &u8) -> Vec<u8> {
        vec![0, 1]
    }

    fn bob_outputs(&self, _y: &u8) -> Vec<u8> {
        vec![0, 1]
    }

    fn rounds(&self) -> Result<Vec<(u8, u8, (), f64)>> {
        let mut out = Vec::with_capacity(4);
        for x in 0..2u8 {
            for y in 0..2u8 {
                out.push((x, y, (), 0.25));
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn predicate_examples() {
        let g = chsh_game();
        assert_eq!(g.win_prob(&0, &0, &(), &0, &0).unwrap(), 1.0);
        assert_eq!(g.win_prob(&1, &1, &(), &0, &0).unwrap(), 0.0);
        assert_eq!(g.win_prob(&1, &1, &(), &0, &1).unwrap(), 1.0);
    }

    #[test]
    fn invalid_outputs_are_structural_errors() {
        let g = chsh_game();
        assert!(g.win_prob(&0, &0, &(), &2, &0).is_err());
    }

    #[test]
    fn enumerator_probabilities_sum_to_one() {
        let g = chsh_game();
        let total: f64 = g.rounds().unwrap().iter().map(|r| r.3).sum();
        assert!((total - 1.0).abs() < 1e-12);
    }
}
