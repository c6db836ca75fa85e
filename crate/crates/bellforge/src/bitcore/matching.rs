use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Default cap on `n` for enumerating all (n-1)!! perfect matchings.
pub const FULL_MATCHING_CAP: usize = 8;

/// A perfect matching on {0, .., n-1}: n/2 disjoint pairs (i, j) with i < j,
/// stored sorted by first element.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct Matching {
    n: usize,
    pairs: Vec<(usize, usize)>,
}

impl Matching {
    pub fn new(n: usize, pairs: Vec<(usize, usize)>) -> Result<Self> {
        if n == 0 || n % 2 != 0 {
            return Err(Error::InvalidParameter(format!(
                "matching needs even positive n, got {n}"
            )));
        }
        if pairs.len() != n / 2 {
            return Err(Error::InvalidParameter(format!(
                "expected {} pairs, got {}",
                n / 2,
                pairs.len()
            )));
        }
        let mut seen = vec![false; n];
        let mut norm: Vec<(usize, usize)> = Vec::with_capacity(n / 2);
        for &(a, b) in &pairs {
            if a >= n || b >= n || a == b {
                return Err(Error::InvalidParameter(format!(
                    "invalid pair ({a},{b}) for n={n}"
                )));
            }
            if seen[a] || seen[b] {
                return Err(Error::InvalidParameter(format!(
                    "index repeated in pair ({a},{b})"
                )));
            }
            seen[a] = true;
            seen[b] = true;
            norm.push((a.min(b), a.max(b)));
        }
        norm.sort_unstable();
        Ok(Matching { n, pairs: norm })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Pairs in canonical order (sorted, i < j within each pair).
    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn partner(&self, i: usize) -> Option<usize> {
        self.pairs.iter().find_map(|&(a, b)| {
            if a == i {
                Some(b)
            } else if b == i {
                Some(a)
            } else {
                None
            }
        })
    }

    /// Position of the (unordered) pair {i, j} in canonical order, if present.
    pub fn pair_position(&self, i: usize, j: usize) -> Option<usize> {
        let key = (i.min(j), i.max(j));
        self.pairs.iter().position(|&p| p == key)
    }

    /// The pair containing `i`, with its canonical position.
    pub fn pair_containing(&self, i: usize) -> Option<(usize, (usize, usize))> {
        self.pairs
            .iter()
            .enumerate()
            .find(|(_, &(a, b))| a == i || b == i)
            .map(|(pos, &p)| (pos, p))
    }
}

/// All perfect matchings of {0, .., n-1}, capped at [`FULL_MATCHING_CAP`]
/// because there are (n-1)!! of them.
pub fn full_matchings(n: usize) -> Result<Vec<Matching>> {
    full_matchings_with_cap(n, FULL_MATCHING_CAP)
}

pub fn full_matchings_with_cap(n: usize, cap: usize) -> Result<Vec<Matching>> {
    if n == 0 || n % 2 != 0 {
        return Err(Error::InvalidParameter(format!(
            "matchings need even positive n, got {n}"
        )));
    }
    if n > cap {
        return Err(Error::CapExceeded {
            what: "full matching enumeration",
            requested: n,
            limit: cap,
        });
    }
    let mut out = Vec::new();
    let mut free: Vec<usize> = (0..n).collect();
    let mut current = Vec::with_capacity(n / 2);
    build(&mut free, &mut current, &mut out, n);
    Ok(out)
}

fn build(free: &mut Vec<usize>, current: &mut Vec<(usize, usize)>, out: &mut Vec<Matching>, n: usize) {
    if free.is_empty() {
        out.push(Matching::new(n, current.clone()).expect("constructed pairs are valid"));
        return;
    }
    let first = free[0];
    for k in 1..free.len() {
        let second = free[k];
        let rest: Vec<usize> = free
            .iter()
            .copied()
            .filter(|&x| x != first && x != second)
            .collect();
        current.push((first, second));
        let mut rest = rest;
        build(&mut rest, current, out, n);
        current.pop();
    }
}

/// The reduced family of n/2 matchings M_k: in 1-based terms M_k pairs
/// i <= n/2 with j = n/2 + 1 + (i + k - 1 mod n/2); stored 0-based.
pub fn reduced_matchings(n: usize) -> Result<Vec<Matching>> {
    if n == 0 || n % 2 != 0 {
        return Err(Error::InvalidParameter(format!(
            "matchings need even positive n, got {n}"
        )));
    }
    let half = n / 2;
    (0..half)
        .map(|k| {
            let pairs = (0..half).map(|i| (i, half + (i + k) % half)).collect();
            Matching::new(n, pairs)
        })
        .collect()
}

/// A uniformly random perfect matching (valid for any even n).
pub fn random_matching<R: Rng>(n: usize, rng: &mut R) -> Matching {
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(rng);
    let pairs = idx.chunks(2).map(|c| (c[0], c[1])).collect();
    Matching::new(n, pairs).expect("shuffled pairing is a matching")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn counts_follow_double_factorial() {
        assert_eq!(full_matchings(2).unwrap().len(), 1);
        assert_eq!(full_matchings(4).unwrap().len(), 3);
        assert_eq!(full_matchings(6).unwrap().len(), 15);
        assert_eq!(full_matchings(8).unwrap().len(), 105);
    }

    #[test]
    fn full_matchings_cap() {
        assert!(matches!(
            full_matchings(10),
            Err(Error::CapExceeded { .. })
        ));
        assert_eq!(full_matchings_with_cap(10, 10).unwrap().len(), 945);
    }

    #[test]
    fn full_matchings_are_distinct_and_valid() {
        let ms = full_matchings(6).unwrap();
        let set: std::collections::HashSet<_> = ms.iter().cloned().collect();
        assert_eq!(set.len(), 15);
    }

    #[test]
    fn reduced_matchings_n4() {
        let ms = reduced_matchings(4).unwrap();
        assert_eq!(ms.len(), 2);
        // 1-based {(1,3),(2,4)} and {(1,4),(2,3)}.
        assert_eq!(ms[0].pairs(), &[(0, 2), (1, 3)]);
        assert_eq!(ms[1].pairs(), &[(0, 3), (1, 2)]);
    }

    #[test]
    fn reduced_matchings_are_valid_for_n8() {
        for m in reduced_matchings(8).unwrap() {
            let mut seen = vec![false; 8];
            for &(a, b) in m.pairs() {
                assert!(a < b);
                assert!(!seen[a] && !seen[b]);
                seen[a] = true;
                seen[b] = true;
            }
            assert!(seen.iter().all(|&s| s));
        }
    }

    #[test]
    fn pair_lookup() {
        let m = Matching::new(4, vec![(3, 0), (2, 1)]).unwrap();
        assert_eq!(m.pairs(), &[(0, 3), (1, 2)]);
        assert_eq!(m.partner(3), Some(0));
        assert_eq!(m.pair_position(3, 0), Some(0));
        assert_eq!(m.pair_position(0, 1), None);
        assert_eq!(m.pair_containing(2), Some((1, (1, 2))));
    }

    #[test]
    fn invalid_matchings_rejected() {
        assert!(Matching::new(4, vec![(0, 1), (1, 2)]).is_err());
        assert!(Matching::new(4, vec![(0, 1)]).is_err());
        assert!(Matching::new(3, vec![(0, 1)]).is_err());
        assert!(Matching::new(4, vec![(0, 0), (1, 2)]).is_err());
    }

    #[test]
    fn random_matching_is_valid_and_seeded() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let a = random_matching(16, &mut rng);
        assert_eq!(a.pairs().len(), 8);
        let mut rng2 = ChaCha8Rng::seed_from_u64(7);
        let b = random_matching(16, &mut rng2);
        assert_eq!(a, b);
    }

    #[test]
    fn random_matching_covers_all_of_small_family() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let all = full_matchings(4).unwrap();
        let mut seen = std::collections::HashSet::new();
        for _ in 0..200 {
            seen.insert(random_matching(4, &mut rng));
        }
        assert_eq!(seen.len(), all.len());
    }
}
