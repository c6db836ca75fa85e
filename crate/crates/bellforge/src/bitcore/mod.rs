//! Bit-level combinatorics: bit strings, the Hadamard-code subgroup and its
//! cosets, perfect matchings, and the fast Walsh-Hadamard transform with the
//! noise operator.
//!
//! Everything here is a pure function on immutable values.

mod bits;
pub mod fourier;
mod hadamard;
mod matching;

pub use bits::BitString;
pub use fourier::{
    fourier_transform, fwht_in_place, noisy_correlation, p_norm, FourierSpectrum, TABLE_LOG_CAP,
};
pub use hadamard::{Coset, HadamardSubgroup, COSET_ENUM_CAP};
pub use matching::{
    full_matchings, full_matchings_with_cap, random_matching, reduced_matchings, Matching,
    FULL_MATCHING_CAP,
};

/// Big-endian index string of length `m` for game index `i`; index 0
/// corresponds to the all-zero string.
pub fn index_string(i: usize, m: usize) -> BitString {
    BitString::from_index(i as u64, m)
}
