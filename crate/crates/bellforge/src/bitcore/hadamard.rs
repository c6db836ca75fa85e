use std::fmt;

use crate::bitcore::BitString;
use crate::{Error, Result};

/// Largest string length for which we materialize all cosets.
pub const COSET_ENUM_CAP: usize = 20;

/// The subgroup of {0,1}^n formed by the n Hadamard codewords.
///
/// Codeword k (k in 0..n) has bit i equal to the inner product of the
/// log2(n)-bit encodings of k and i, with positions i listed in
/// lexicographic order. The subgroup is closed under XOR and every nonzero
/// codeword has Hamming weight exactly n/2.
#[derive(Clone, Debug)]
pub struct HadamardSubgroup {
    n: usize,
    m: u32,
    codewords: Vec<BitString>,
}

impl HadamardSubgroup {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 || !n.is_power_of_two() {
            return Err(Error::NotPowerOfTwo(n));
        }
        let m = n.trailing_zeros();
        let codewords = (0..n as u64)
            .map(|k| {
                let mut w = BitString::zeros(n);
                for i in 0..n as u64 {
                    if (k & i).count_ones() & 1 == 1 {
                        w.set(i as usize, true);
                    }
                }
                w
            })
            .collect();
        Ok(HadamardSubgroup { n, m, codewords })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// log2(n): the index/output word size of the ambient game.
    pub fn index_bits(&self) -> u32 {
        self.m
    }

    pub fn codewords(&self) -> &[BitString] {
        &self.codewords
    }

    pub fn contains(&self, s: &BitString) -> bool {
        if s.len() != self.n {
            return false;
        }
        // Candidate k is read off the bits at positions 2^t.
        let mut k = 0u64;
        for t in 0..self.m {
            if s.get(1 << t) {
                k |= 1 << t;
            }
        }
        &self.codewords[k as usize] == s
    }

    /// Canonical coset containing `u`: the representative is the
    /// lexicographically smallest member, so cosets compare by representative.
    pub fn coset_of(&self, u: &BitString) -> Result<Coset> {
        if u.len() != self.n {
            return Err(Error::LengthMismatch(u.len(), self.n));
        }
        let mut rep = u.clone();
        for h in &self.codewords {
            let cand = u.xor(h)?;
            if cand < rep {
                rep = cand;
            }
        }
        Ok(Coset { rep })
    }

    /// Members of a coset in lexicographic order; the representative comes
    /// first.
    pub fn members(&self, coset: &Coset) -> Vec<BitString> {
        let mut out: Vec<BitString> = self
            .codewords
            .iter()
            .map(|h| coset.rep.xor(h).expect("coset/subgroup lengths match"))
            .collect();
        out.sort();
        out
    }

    /// All 2^n / n cosets, ordered by representative.
    pub fn cosets(&self) -> Result<Vec<Coset>> {
        if self.n > COSET_ENUM_CAP {
            return Err(Error::CapExceeded {
                what: "coset enumeration",
                requested: self.n,
                limit: COSET_ENUM_CAP,
            });
        }
        let mut out = Vec::with_capacity((1usize << self.n) / self.n);
        for u in BitString::enumerate(self.n) {
            let c = self.coset_of(&u)?;
            if c.rep == u {
                out.push(c);
            }
        }
        Ok(out)
    }
}

/// A coset u + H of the Hadamard subgroup, in canonical form.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Coset {
    rep: BitString,
}

impl Coset {
    pub fn representative(&self) -> &BitString {
        &self.rep
    }

    pub fn n(&self) -> usize {
        self.rep.len()
    }

    pub fn contains(&self, s: &BitString, h: &HadamardSubgroup) -> bool {
        match h.coset_of(s) {
            Ok(c) => c == *self,
            Err(_) => false,
        }
    }
}

impl fmt::Debug for Coset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Coset({})", self.rep)
    }
}

impl fmt::Display for Coset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.rep)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bs(s: &str) -> BitString {
        s.parse().unwrap()
    }

    #[test]
    fn rejects_non_power_of_two() {
        assert!(matches!(HadamardSubgroup::new(3), Err(Error::NotPowerOfTwo(3))));
        assert!(matches!(HadamardSubgroup::new(0), Err(Error::NotPowerOfTwo(0))));
    }

    #[test]
    fn codewords_n2() {
        let h = HadamardSubgroup::new(2).unwrap();
        assert_eq!(h.codewords(), &[bs("00"), bs("01")]);
    }

    #[test]
    fn codewords_n4() {
        let h = HadamardSubgroup::new(4).unwrap();
        assert_eq!(
            h.codewords(),
            &[bs("0000"), bs("0101"), bs("0011"), bs("0110")]
        );
    }

    #[test]
    fn nonzero_codewords_are_balanced() {
        for n in [2usize, 4, 8, 16] {
            let h = HadamardSubgroup::new(n).unwrap();
            for (k, w) in h.codewords().iter().enumerate() {
                if k == 0 {
                    assert_eq!(w.weight(), 0);
                } else {
                    assert_eq!(w.weight(), n / 2, "codeword {k} of n={n}");
                }
            }
        }
    }

    #[test]
    fn closure_under_xor_exhaustive() {
        for n in [2usize, 4, 8, 16] {
            let h = HadamardSubgroup::new(n).unwrap();
            for a in h.codewords() {
                for b in h.codewords() {
                    assert!(h.contains(&a.xor(b).unwrap()));
                }
            }
        }
    }

    #[test]
    fn coset_of_subgroup_member_is_zero() {
        let h = HadamardSubgroup::new(8).unwrap();
        for w in h.codewords() {
            let c = h.coset_of(w).unwrap();
            assert_eq!(c.representative(), &BitString::zeros(8));
        }
    }

    #[test]
    fn coset_n2() {
        let h = HadamardSubgroup::new(2).unwrap();
        let c = h.coset_of(&bs("10")).unwrap();
        assert_eq!(c.representative(), &bs("10"));
        assert_eq!(h.members(&c), vec![bs("10"), bs("11")]);
    }

    #[test]
    fn coset_n4() {
        let h = HadamardSubgroup::new(4).unwrap();
        let c = h.coset_of(&bs("1000")).unwrap();
        assert_eq!(c.representative(), &bs("1000"));
        assert_eq!(
            h.members(&c),
            vec![bs("1000"), bs("1011"), bs("1101"), bs("1110")]
        );
    }

    #[test]
    fn coset_is_invariant_under_subgroup_shift() {
        let h = HadamardSubgroup::new(8).unwrap();
        let u = bs("10110010");
        let c = h.coset_of(&u).unwrap();
        for hw in h.codewords() {
            assert_eq!(h.coset_of(&u.xor(hw).unwrap()).unwrap(), c);
        }
    }

    #[test]
    fn cosets_partition_the_cube() {
        for n in [2usize, 4, 8] {
            let h = HadamardSubgroup::new(n).unwrap();
            let cosets = h.cosets().unwrap();
            assert_eq!(cosets.len(), (1 << n) / n);
            // Representatives pairwise distinct and members cover everything.
            let mut seen = std::collections::HashSet::new();
            for c in &cosets {
                for m in h.members(c) {
                    assert!(seen.insert(m));
                }
            }
            assert_eq!(seen.len(), 1 << n);
        }
    }

    #[test]
    fn coset_length_mismatch_is_error() {
        let h = HadamardSubgroup::new(4).unwrap();
        assert!(h.coset_of(&bs("10")).is_err());
    }
}
