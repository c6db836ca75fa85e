use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

use crate::{Error, Result};

/// Fixed-length string over {0,1}.
///
/// Position 0 is the first (leftmost) character of the serialized form, and
/// the most significant bit of the index encoding: the index `i` of a game
/// element corresponds to the big-endian `m`-bit binary of `i`, so the
/// lexicographic order on equal-length bit strings coincides with the integer
/// order of their indices.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitString {
    len: usize,
    words: Vec<u64>,
}

#[inline]
fn word_count(len: usize) -> usize {
    (len + 63) / 64
}

impl BitString {
    pub fn zeros(len: usize) -> Self {
        BitString {
            len,
            words: vec![0; word_count(len)],
        }
    }

    pub fn ones(len: usize) -> Self {
        let mut s = BitString {
            len,
            words: vec![!0u64; word_count(len)],
        };
        s.mask_tail();
        s
    }

    /// Builds from a slice of 0/1 values, position 0 first.
    pub fn from_bits(bits: &[u8]) -> Self {
        let mut s = BitString::zeros(bits.len());
        for (p, &b) in bits.iter().enumerate() {
            if b != 0 {
                s.set(p, true);
            }
        }
        s
    }

    /// The big-endian `len`-bit encoding of `value`.
    ///
    /// Panics if `len > 64` or `value` does not fit in `len` bits.
    pub fn from_index(value: u64, len: usize) -> Self {
        assert!(len <= 64, "index encoding limited to 64 bits");
        if len < 64 {
            assert!(value < (1u64 << len), "index {value} out of range for {len} bits");
        }
        let mut s = BitString::zeros(len);
        for p in 0..len {
            if (value >> (len - 1 - p)) & 1 == 1 {
                s.set(p, true);
            }
        }
        s
    }

    /// Inverse of [`BitString::from_index`]. Panics if `len > 63`.
    pub fn to_index(&self) -> usize {
        assert!(self.len <= 63, "bit string too long for a table index");
        let mut v = 0usize;
        for p in 0..self.len {
            v = (v << 1) | usize::from(self.get(p));
        }
        v
    }

    /// All bit strings of the given length in lexicographic (= index) order.
    pub fn enumerate(len: usize) -> impl Iterator<Item = BitString> {
        assert!(len <= 30, "refusing to enumerate more than 2^30 strings");
        (0..1u64 << len).map(move |v| BitString::from_index(v, len))
    }

    pub fn random<R: Rng>(len: usize, rng: &mut R) -> Self {
        let mut s = BitString {
            len,
            words: (0..word_count(len)).map(|_| rng.gen::<u64>()).collect(),
        };
        s.mask_tail();
        s
    }

    /// Each bit independently set to 1 with probability `eta`.
    pub fn random_biased<R: Rng>(len: usize, eta: f64, rng: &mut R) -> Self {
        let mut s = BitString::zeros(len);
        for p in 0..len {
            if rng.gen_bool(eta) {
                s.set(p, true);
            }
        }
        s
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, p: usize) -> bool {
        assert!(p < self.len, "bit index {p} out of range (len {})", self.len);
        (self.words[p >> 6] >> (p & 63)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, p: usize, v: bool) {
        assert!(p < self.len, "bit index {p} out of range (len {})", self.len);
        if v {
            self.words[p >> 6] |= 1u64 << (p & 63);
        } else {
            self.words[p >> 6] &= !(1u64 << (p & 63));
        }
    }

    /// Number of ones (Hamming weight).
    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Componentwise sum mod 2. Errors on length mismatch.
    pub fn xor(&self, other: &BitString) -> Result<BitString> {
        self.check_len(other)?;
        let words = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| a ^ b)
            .collect();
        Ok(BitString {
            len: self.len,
            words,
        })
    }

    /// Inner product mod 2. Errors on length mismatch.
    pub fn dot(&self, other: &BitString) -> Result<bool> {
        self.check_len(other)?;
        let ones: u32 = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones())
            .sum();
        Ok(ones & 1 == 1)
    }

    /// Hamming distance. Errors on length mismatch.
    pub fn distance(&self, other: &BitString) -> Result<usize> {
        Ok(self.xor(other)?.weight())
    }

    pub fn iter_bits(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |p| self.get(p))
    }

    /// Deterministic 64-bit FNV-1a hash, for deriving per-input seeds.
    pub fn fnv64(&self) -> u64 {
        let mut h = 0xcbf29ce484222325u64;
        h = h.wrapping_mul(0x100000001b3) ^ self.len as u64;
        for w in &self.words {
            for byte in w.to_le_bytes() {
                h ^= byte as u64;
                h = h.wrapping_mul(0x100000001b3);
            }
        }
        h
    }

    fn check_len(&self, other: &BitString) -> Result<()> {
        if self.len != other.len {
            return Err(Error::LengthMismatch(self.len, other.len));
        }
        Ok(())
    }

    fn mask_tail(&mut self) {
        let rem = self.len & 63;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
        if self.len == 0 {
            self.words.clear();
        }
    }
}

impl Ord for BitString {
    /// Lexicographic order on the serialized form (position 0 first).
    fn cmp(&self, other: &Self) -> Ordering {
        match self.len.cmp(&other.len) {
            Ordering::Equal => {}
            ord => return ord,
        }
        for (a, b) in self.words.iter().zip(&other.words) {
            let diff = a ^ b;
            if diff != 0 {
                // Lowest differing word bit is the most significant position.
                let p = diff.trailing_zeros();
                return if (a >> p) & 1 == 0 {
                    Ordering::Less
                } else {
                    Ordering::Greater
                };
            }
        }
        Ordering::Equal
    }
}

impl PartialOrd for BitString {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in 0..self.len {
            f.write_str(if self.get(p) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitString(\"{self}\")")
    }
}

impl FromStr for BitString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut out = BitString::zeros(s.len());
        for (p, c) in s.chars().enumerate() {
            match c {
                '0' => {}
                '1' => out.set(p, true),
                other => {
                    return Err(Error::InvalidParameter(format!(
                        "invalid character '{other}' in bit string"
                    )))
                }
            }
        }
        Ok(out)
    }
}

impl Serialize for BitString {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for BitString {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn bs(s: &str) -> BitString {
        s.parse().unwrap()
    }

    #[test]
    fn xor_examples() {
        assert_eq!(bs("0101").xor(&bs("0011")).unwrap(), bs("0110"));
        let a = bs("10110");
        assert_eq!(a.xor(&a).unwrap(), BitString::zeros(5));
        assert_eq!(a.xor(&BitString::zeros(5)).unwrap(), a);
    }

    #[test]
    fn xor_length_mismatch_is_error() {
        assert!(matches!(
            bs("01").xor(&bs("011")),
            Err(Error::LengthMismatch(2, 3))
        ));
    }

    #[test]
    fn dot_examples() {
        assert!(bs("11").dot(&bs("01")).unwrap());
        assert!(!bs("1011").dot(&bs("0000")).unwrap());
        assert!(bs("10").dot(&bs("11")).unwrap());
    }

    #[test]
    fn weight_examples() {
        assert_eq!(bs("0110").weight(), 2);
        assert_eq!(BitString::zeros(9).weight(), 0);
        assert_eq!(bs("1111").weight(), 4);
    }

    #[test]
    fn index_round_trip_is_big_endian() {
        assert_eq!(BitString::from_index(1, 2), bs("01"));
        assert_eq!(BitString::from_index(2, 2), bs("10"));
        assert_eq!(bs("110").to_index(), 6);
        for v in 0..16u64 {
            assert_eq!(BitString::from_index(v, 4).to_index() as u64, v);
        }
    }

    #[test]
    fn lexicographic_order_matches_index_order() {
        let all: Vec<BitString> = BitString::enumerate(5).collect();
        for w in all.windows(2) {
            assert!(w[0] < w[1]);
        }
    }

    #[test]
    fn display_is_msb_first() {
        assert_eq!(BitString::from_index(4, 3).to_string(), "100");
    }

    #[test]
    fn long_strings_work_across_word_boundaries() {
        let mut s = BitString::zeros(130);
        s.set(0, true);
        s.set(64, true);
        s.set(129, true);
        assert_eq!(s.weight(), 3);
        let t = s.xor(&BitString::ones(130)).unwrap();
        assert_eq!(t.weight(), 127);
        assert!(!s.dot(&t).unwrap());
    }

    proptest! {
        #[test]
        fn xor_group_laws(a in 0u64..256, b in 0u64..256, c in 0u64..256) {
            let (a, b, c) = (
                BitString::from_index(a, 8),
                BitString::from_index(b, 8),
                BitString::from_index(c, 8),
            );
            let ab_c = a.xor(&b).unwrap().xor(&c).unwrap();
            let a_bc = a.xor(&b.xor(&c).unwrap()).unwrap();
            prop_assert_eq!(ab_c, a_bc);
            prop_assert_eq!(a.xor(&a).unwrap(), BitString::zeros(8));
            prop_assert_eq!(a.xor(&BitString::zeros(8)).unwrap(), a.clone());
        }

        #[test]
        fn dot_is_bilinear(a in 0u64..256, b in 0u64..256, c in 0u64..256) {
            let (a, b, c) = (
                BitString::from_index(a, 8),
                BitString::from_index(b, 8),
                BitString::from_index(c, 8),
            );
            let lhs = a.xor(&b).unwrap().dot(&c).unwrap();
            let rhs = a.dot(&c).unwrap() ^ b.dot(&c).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn serde_string_round_trip(v in 0u64..1024) {
            let s = BitString::from_index(v, 10);
            let json = serde_json::to_string(&s).unwrap();
            let back: BitString = serde_json::from_str(&json).unwrap();
            prop_assert_eq!(s, back);
        }
    }

    #[test]
    fn xor_group_laws_exhaustive_small() {
        // Exhaustive on lengths up to 4.
        for m in 0..=4usize {
            let all: Vec<BitString> = BitString::enumerate(m).collect();
            for a in &all {
                assert_eq!(&a.xor(&BitString::zeros(m)).unwrap(), a);
                assert_eq!(a.xor(a).unwrap(), BitString::zeros(m));
                for b in &all {
                    for c in &all {
                        assert_eq!(
                            a.xor(b).unwrap().xor(c).unwrap(),
                            a.xor(&b.xor(c).unwrap()).unwrap()
                        );
                    }
                }
            }
        }
    }
}
