use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bitcore::{full_matchings, index_string, reduced_matchings, BitString, Matching};
use crate::games::{EnumerableGame, NonlocalGame};
use crate::{Error, Result};

/// Which family Bob's matching is drawn from.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MatchingFamily {
    /// All (n-1)!! perfect matchings; only available up to the enumeration cap.
    Full,
    /// The n/2 shifted matchings pairing the low half with the high half.
    Reduced,
}

/// Bob's output in the non-local Hidden Matching game: a pair of his
/// matching and a bit.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct HmnlBobOutput {
    pub pair: (usize, usize),
    pub d: u8,
}

/// The non-local Hidden Matching game. Alice gets x uniform in {0,1}^n, Bob
/// a uniform matching M from the family; Alice outputs a log2(n)-bit string
/// a, Bob outputs a pair (i, j) of M and a bit d, and they win iff
/// (a . (i xor j)) xor d = x_i xor x_j, with indices encoded big-endian.
#[derive(Clone, Debug)]
pub struct HmnlGame {
    n: usize,
    m: usize,
    family: MatchingFamily,
    matchings: Vec<Matching>,
}

/// Cap on materializing the exact enumerator (|x| * |matchings| entries).
const ROUND_ENTRY_CAP: usize = 1 << 20;

pub fn hm_nl_game(n: usize, family: MatchingFamily) -> Result<HmnlGame> {
    if n < 2 || !n.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(n));
    }
    let matchings = match family {
        MatchingFamily::Full => full_matchings(n)?,
        MatchingFamily::Reduced => reduced_matchings(n)?,
    };
    Ok(HmnlGame {
        n,
        m: n.trailing_zeros() as usize,
        family,
        matchings,
    })
}

impl HmnlGame {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Output word size log2(n).
    pub fn index_bits(&self) -> usize {
        self.m
    }

    pub fn family(&self) -> MatchingFamily {
        self.family
    }

    pub fn matchings(&self) -> &[Matching] {
        &self.matchings
    }
}

impl NonlocalGame for HmnlGame {
    type AliceIn = BitString;
    type BobIn = Matching;
    type AliceOut = BitString;
    type BobOut = HmnlBobOutput;
    type Aux = ();

    fn name(&self) -> String {
        format!("hmnl(n={}, {:?})", self.n, self.family)
    }

    fn sample_round(&self, rng: &mut ChaCha8Rng) -> (BitString, Matching, ()) {
        let x = BitString::random(self.n, rng);
        let m = self.matchings[rng.gen_range(0..self.matchings.len())].clone();
        (x, m, ())
    }

    fn win_prob(
        &self,
        x: &BitString,
        y: &Matching,
        _aux: &(),
        a: &BitString,
        b: &HmnlBobOutput,
    ) -> Result<f64> {
        if a.len() != self.m {
            return Err(Error::InvalidOutput(format!(
                "Alice output must have {} bits, got {}",
                self.m,
                a.len()
            )));
        }
        if b.d > 1 {
            return Err(Error::InvalidOutput(format!("d must be 0 or 1, got {}", b.d)));
        }
        let (i, j) = b.pair;
        if y.pair_position(i, j).is_none() {
            return Err(Error::InvalidOutput(format!(
                "pair ({i},{j}) is not in Bob's matching"
            )));
        }
        let idx_xor = index_string(i, self.m).xor(&index_string(j, self.m))?;
        let lhs = a.dot(&idx_xor)? ^ (b.d == 1);
        let rhs = x.get(i) ^ x.get(j);
        Ok(if lhs == rhs { 1.0 } else { 0.0 })
    }
}

impl EnumerableGame for HmnlGame {
    fn alice_inputs(&self) -> Vec<BitString> {
        BitString::enumerate(self.n).collect()
    }

    fn bob_inputs(&self) -> Vec<Matching> {
        self.matchings.clone()
    }

    fn alice_outputs(&self, _x: &BitString) -> Vec<BitString> {
        BitString::enumerate(self.m).collect()
    }

    /// Canonical order: pairs of the matching in canonical order, d = 0 then
    /// d = 1 within each pair, so index = 2 * pair_position + d.
    fn bob_outputs(&self, y: &Matching) -> Vec<HmnlBobOutput> {
        y.pairs()
            .iter()
            .flat_map(|&pair| [HmnlBobOutput { pair, d: 0 }, HmnlBobOutput { pair, d: 1 }])
            .collect()
    }

    fn rounds(&self) -> Result<Vec<(BitString, Matching, (), f64)>> {
        let count = (1usize << self.n).saturating_mul(self.matchings.len());
        if count > ROUND_ENTRY_CAP {
            return Err(Error::CapExceeded {
                what: "hidden matching enumerator",
                requested: count,
                limit: ROUND_ENTRY_CAP,
            });
        }
        let p = 1.0 / count as f64;
        let mut out = Vec::with_capacity(count);
        for x in BitString::enumerate(self.n) {
            for m in &self.matchings {
                out.push((x.clone(), m.clone(), (), p));
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bs(s: &str) -> BitString {
        s.parse().unwrap()
    }

    #[test]
    fn full_family_respects_matching_cap() {
        assert!(matches!(
            hm_nl_game(16, MatchingFamily::Full),
            Err(Error::CapExceeded { .. })
        ));
        assert!(hm_nl_game(16, MatchingFamily::Reduced).is_ok());
        assert!(matches!(hm_nl_game(6, MatchingFamily::Full), Err(Error::NotPowerOfTwo(6))));
    }

    #[test]
    fn win_example_n2() {
        // x = 01, M = {(0,1)}, a = "1", d = 0: dot(1, 0 xor 1) = 1 = x0 xor x1.
        let g = hm_nl_game(2, MatchingFamily::Full).unwrap();
        let m = Matching::new(2, vec![(0, 1)]).unwrap();
        let out = HmnlBobOutput { pair: (0, 1), d: 0 };
        assert_eq!(
            g.win_prob(&bs("01"), &m, &(), &bs("1"), &out).unwrap(),
            1.0
        );
        // x = 00, a = "0", d = 0: both sides zero.
        assert_eq!(
            g.win_prob(&bs("00"), &m, &(), &bs("0"), &out).unwrap(),
            1.0
        );
    }

    #[test]
    fn pair_outside_matching_is_structural_error() {
        let g = hm_nl_game(4, MatchingFamily::Full).unwrap();
        let m = Matching::new(4, vec![(0, 1), (2, 3)]).unwrap();
        let bad = HmnlBobOutput { pair: (0, 2), d: 0 };
        assert!(matches!(
            g.win_prob(&bs("0000"), &m, &(), &bs("00"), &bad),
            Err(Error::InvalidOutput(_))
        ));
    }

    #[test]
    fn enumerator_sizes() {
        let g = hm_nl_game(4, MatchingFamily::Full).unwrap();
        let rounds = g.rounds().unwrap();
        assert_eq!(rounds.len(), 16 * 3);
        let total: f64 = rounds.iter().map(|r| r.3).sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bob_output_order_is_pair_major() {
        let g = hm_nl_game(4, MatchingFamily::Reduced).unwrap();
        let m = g.matchings()[0].clone();
        let outs = g.bob_outputs(&m);
        assert_eq!(outs.len(), 4);
        assert_eq!(outs[0].pair, m.pairs()[0]);
        assert_eq!(outs[0].d, 0);
        assert_eq!(outs[1].d, 1);
        assert_eq!(outs[2].pair, m.pairs()[1]);
    }
}
