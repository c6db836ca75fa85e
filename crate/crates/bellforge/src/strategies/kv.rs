use num_traits::Float;
use rand::Rng;

use crate::bitcore::{noisy_correlation, BitString, Coset, HadamardSubgroup};
use crate::games::KvGame;
use crate::strategies::ClosureStrategy;
use crate::{Error, Result};

/// A deterministic Khot-Vishnoi strategy for one player: a 0/1 table over
/// {0,1}^n that selects exactly one element of every coset of the Hadamard
/// subgroup.
#[derive(Clone, Debug)]
pub struct CosetSelector {
    n: usize,
    table: Vec<bool>,
}

impl CosetSelector {
    /// Validates the selector property: sum over h in H of A(u + h) = 1 for
    /// every u (checked exhaustively; n is capped by the coset enumeration).
    pub fn new(n: usize, table: Vec<bool>) -> Result<Self> {
        let h = HadamardSubgroup::new(n)?;
        if table.len() != 1 << n {
            return Err(Error::DimensionMismatch(format!(
                "selector table needs {} entries, got {}",
                1 << n,
                table.len()
            )));
        }
        for u in BitString::enumerate(n) {
            let count = h
                .codewords()
                .iter()
                .filter(|hw| table[u.xor(hw).expect("equal lengths").to_index()])
                .count();
            if count != 1 {
                return Err(Error::InvalidParameter(format!(
                    "selector marks {count} elements in the coset of {u}, expected exactly 1"
                )));
            }
        }
        Ok(CosetSelector { n, table })
    }

    /// Builds the selector that picks `choose(coset, members)` per coset.
    pub fn from_choice(
        h: &HadamardSubgroup,
        mut choose: impl FnMut(&Coset, &[BitString]) -> BitString,
    ) -> Result<Self> {
        let n = h.n();
        let mut table = vec![false; 1 << n];
        for coset in h.cosets()? {
            let members = h.members(&coset);
            let pick = choose(&coset, &members);
            if !members.contains(&pick) {
                return Err(Error::InvalidOutput(format!(
                    "choice {pick} is not a member of coset {coset}"
                )));
            }
            table[pick.to_index()] = true;
        }
        Ok(CosetSelector { n, table })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn selects(&self, s: &BitString) -> bool {
        self.table[s.to_index()]
    }

    /// The selected element of the given coset.
    pub fn selected(&self, coset: &Coset, h: &HadamardSubgroup) -> BitString {
        h.members(coset)
            .into_iter()
            .find(|m| self.table[m.to_index()])
            .expect("validated selector hits every coset")
    }

    /// The selector as a dense real table for the Fourier path.
    pub fn to_real_table<T: Float>(&self) -> Vec<T> {
        self.table
            .iter()
            .map(|&b| if b { T::one() } else { T::zero() })
            .collect()
    }
}

/// A uniformly random valid selector: an independent uniform member choice
/// per coset.
pub fn random_selector<R: Rng>(n: usize, rng: &mut R) -> Result<CosetSelector> {
    let h = HadamardSubgroup::new(n)?;
    CosetSelector::from_choice(&h, |_c, members| {
        members[rng.gen_range(0..members.len())].clone()
    })
}

/// The max-weight heuristic selector: per coset, the element of highest
/// Hamming weight, ties broken by the lexicographically smallest member.
pub fn kv_maxweight_selector(n: usize) -> Result<CosetSelector> {
    let h = HadamardSubgroup::new(n)?;
    CosetSelector::from_choice(&h, |_c, members| {
        // Members come sorted lexicographically, so the first maximum wins.
        members
            .iter()
            .max_by_key(|m| (m.weight(), std::cmp::Reverse((*m).clone())))
            .expect("cosets are nonempty")
            .clone()
    })
}

/// Both players play the max-weight heuristic.
pub fn kv_maxweight_strategy(n: usize) -> Result<(CosetSelector, CosetSelector)> {
    let s = kv_maxweight_selector(n)?;
    Ok((s.clone(), s))
}

/// Winning probability of a selector pair, computed in the Fourier basis:
/// n * E_{u,z}[A(u) B(u + z)].
pub fn kv_eval_fwht(a: &CosetSelector, b: &CosetSelector, eta: f64) -> Result<f64> {
    if a.n != b.n {
        return Err(Error::LengthMismatch(a.n, b.n));
    }
    let ta = a.to_real_table::<f64>();
    let tb = b.to_real_table::<f64>();
    Ok(a.n as f64 * noisy_correlation(&ta, &tb, eta)?)
}

/// Wraps a selector pair as a typed strategy for the KV game.
pub fn selector_strategy(
    game: &KvGame,
    a: &CosetSelector,
    b: &CosetSelector,
) -> ClosureStrategy<KvGame> {
    let ha = game.subgroup().clone();
    let hb = game.subgroup().clone();
    let sa = a.clone();
    let sb = b.clone();
    ClosureStrategy::new(
        move |x: &Coset| sa.selected(x, &ha),
        move |y: &Coset| sb.selected(y, &hb),
    )
}
