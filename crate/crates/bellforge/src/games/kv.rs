use rand_chacha::ChaCha8Rng;

use crate::bitcore::{BitString, Coset, HadamardSubgroup};
use crate::games::{EnumerableGame, NonlocalGame};
use crate::{Error, Result};

/// Largest n for which the exact (coset, z) enumerator is materialized;
/// beyond this only sampling and the Walsh-Hadamard path are available.
pub const KV_ENUM_CAP: usize = 8;

/// The Khot-Vishnoi game. A uniform u in {0,1}^n and an eta-biased z define
/// Alice's coset x = u + H and Bob's coset y = u + z + H of the Hadamard
/// subgroup H; each player outputs one element of its coset and they win iff
/// the outputs differ by exactly z.
#[derive(Clone, Debug)]
pub struct KvGame {
    n: usize,
    eta: f64,
    subgroup: HadamardSubgroup,
}

pub fn kv_game(n: usize, eta: f64) -> Result<KvGame> {
    if !(0.0..=0.5).contains(&eta) {
        return Err(Error::InvalidParameter(format!(
            "noise rate eta must lie in [0, 1/2], got {eta}"
        )));
    }
    let subgroup = HadamardSubgroup::new(n)?;
    Ok(KvGame { n, eta, subgroup })
}

impl KvGame {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn subgroup(&self) -> &HadamardSubgroup {
        &self.subgroup
    }

    pub fn coset_of(&self, u: &BitString) -> Result<Coset> {
        self.subgroup.coset_of(u)
    }

    /// Coset members in lexicographic order (the output index order).
    pub fn members(&self, coset: &Coset) -> Vec<BitString> {
        self.subgroup.members(coset)
    }
}

impl NonlocalGame for KvGame {
    type AliceIn = Coset;
    type BobIn = Coset;
    type AliceOut = BitString;
    type BobOut = BitString;
    type Aux = BitString;

    fn name(&self) -> String {
        format!("kv(n={}, eta={})", self.n, self.eta)
    }

    fn sample_round(&self, rng: &mut ChaCha8Rng) -> (Coset, Coset, BitString) {
        let u = BitString::random(self.n, rng);
        let z = BitString::random_biased(self.n, self.eta, rng);
        let x = self.subgroup.coset_of(&u).expect("lengths match");
        let y = self
            .subgroup
            .coset_of(&u.xor(&z).expect("lengths match"))
            .expect("lengths match");
        (x, y, z)
    }

    fn win_prob(
        &self,
        x: &Coset,
        y: &Coset,
        z: &BitString,
        a: &BitString,
        b: &BitString,
    ) -> Result<f64> {
        if !x.contains(a, &self.subgroup) {
            return Err(Error::InvalidOutput(format!(
                "Alice output {a} lies outside her coset {x}"
            )));
        }
        if !y.contains(b, &self.subgroup) {
            return Err(Error::InvalidOutput(format!(
                "Bob output {b} lies outside his coset {y}"
            )));
        }
        Ok(if a.xor(b)? == *z { 1.0 } else { 0.0 })
    }
}

impl EnumerableGame for KvGame {
    fn alice_inputs(&self) -> Vec<Coset> {
        self.subgroup.cosets().expect("kv games stay under the coset cap")
    }

    fn bob_inputs(&self) -> Vec<Coset> {
        self.alice_inputs()
    }

    fn alice_outputs(&self, x: &Coset) -> Vec<BitString> {
        self.members(x)
    }

    fn bob_outputs(&self, y: &Coset) -> Vec<BitString> {
        self.members(y)
    }

    /// Enumerates (coset of u, z) pairs. A coset has n preimages u, so the
    /// entry probability is n * 2^-n * eta^|z| (1-eta)^(n-|z|); zero-mass
    /// entries are pruned.
    fn rounds(&self) -> Result<Vec<(Coset, Coset, BitString, f64)>> {
        if self.n > KV_ENUM_CAP {
            return Err(Error::CapExceeded {
                what: "khot-vishnoi enumerator",
                requested: self.n,
                limit: KV_ENUM_CAP,
            });
        }
        let cosets = self.subgroup.cosets()?;
        let coset_prob = self.n as f64 / (1u64 << self.n) as f64;
        let mut out = Vec::new();
        for x in &cosets {
            for z in BitString::enumerate(self.n) {
                let w = z.weight() as i32;
                let pz = self.eta.powi(w) * (1.0 - self.eta).powi(self.n as i32 - w);
                if pz == 0.0 {
                    continue;
                }
                let y = self
                    .subgroup
                    .coset_of(&x.representative().xor(&z)?)?;
                out.push((x.clone(), y, z, coset_prob * pz));
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    fn bs(s: &str) -> BitString {
        s.parse().unwrap()
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(kv_game(6, 0.1).is_err());
        assert!(kv_game(4, 0.7).is_err());
        assert!(kv_game(4, -0.1).is_err());
    }

    #[test]
    fn round_example_n2() {
        // u = 10, z = 01: x = {10,11} rep 10; u + z = 11 lies in the same
        // coset, so y = x; win iff a xor b = 01.
        let g = kv_game(2, 0.25).unwrap();
        let x = g.coset_of(&bs("10")).unwrap();
        let y = g.coset_of(&bs("11")).unwrap();
        assert_eq!(x, y);
        let z = bs("01");
        assert_eq!(
            g.win_prob(&x, &y, &z, &bs("10"), &bs("11")).unwrap(),
            1.0
        );
        assert_eq!(
            g.win_prob(&x, &y, &z, &bs("10"), &bs("10")).unwrap(),
            0.0
        );
    }

    #[test]
    fn output_outside_coset_is_structural_error() {
        let g = kv_game(4, 0.25).unwrap();
        let x = g.coset_of(&bs("1000")).unwrap();
        let h_member = bs("0101");
        assert!(matches!(
            g.win_prob(&x, &x, &bs("0000"), &h_member, &bs("1000")),
            Err(Error::InvalidOutput(_))
        ));
    }

    #[test]
    fn enumerator_is_a_distribution() {
        for eta in [0.0, 0.25, 0.5] {
            let g = kv_game(4, eta).unwrap();
            let rounds = g.rounds().unwrap();
            let total: f64 = rounds.iter().map(|r| r.3).sum();
            assert!((total - 1.0).abs() < 1e-12, "eta={eta}");
        }
    }

    #[test]
    fn eta_zero_keeps_cosets_equal() {
        let g = kv_game(4, 0.0).unwrap();
        for (x, y, z, _) in g.rounds().unwrap() {
            assert_eq!(x, y);
            assert_eq!(z.weight(), 0);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let (x, y, z) = g.sample_round(&mut rng);
            assert_eq!(x, y);
            assert_eq!(z.weight(), 0);
        }
    }

    #[test]
    fn enumerator_cap() {
        let g = kv_game(16, 0.25).unwrap();
        assert!(matches!(g.rounds(), Err(Error::CapExceeded { .. })));
        // Sampling still works beyond the cap.
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let (x, _, z) = g.sample_round(&mut rng);
        assert_eq!(x.n(), 16);
        assert_eq!(z.len(), 16);
    }
}
