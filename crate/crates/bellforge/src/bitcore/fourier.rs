//! Fast Walsh-Hadamard transform and the noise operator on dense tables
//! over {0,1}^m. Tables are indexed by the integer value of the big-endian
//! bit string, so index s stands for the subset S with characteristic
//! string `BitString::from_index(s, m)`.

use num_traits::Float;

use crate::{Error, Result};

/// Default cap on log2(table size): dense tables up to 2^24 entries.
pub const TABLE_LOG_CAP: u32 = 24;

fn check_table_len(len: usize) -> Result<u32> {
    if len == 0 || !len.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(len));
    }
    let m = len.trailing_zeros();
    if m > TABLE_LOG_CAP {
        return Err(Error::CapExceeded {
            what: "dense table size",
            requested: m as usize,
            limit: TABLE_LOG_CAP as usize,
        });
    }
    Ok(m)
}

/// In-place unnormalized Walsh-Hadamard butterfly:
/// out[s] = sum_u (-1)^(s . u) in[u]. Self-inverse up to a factor 2^m.
pub fn fwht_in_place<T: Float>(data: &mut [T]) -> Result<()> {
    check_table_len(data.len())?;
    let n = data.len();
    let mut step = 1;
    while step < n {
        for block in (0..n).step_by(2 * step) {
            for k in block..block + step {
                let a = data[k];
                let b = data[k + step];
                data[k] = a + b;
                data[k + step] = a - b;
            }
        }
        step *= 2;
    }
    Ok(())
}

/// Fourier spectrum of a real table: coefficient for subset S is
/// E_u[F(u) (-1)^(S . u)], so that Parseval reads sum_S coeff(S)^2 = E[F^2].
#[derive(Clone, Debug)]
pub struct FourierSpectrum<T> {
    m: u32,
    coeffs: Vec<T>,
}

impl<T: Float> FourierSpectrum<T> {
    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn coeff(&self, s: usize) -> T {
        self.coeffs[s]
    }

    /// sum_S coeff(S)^2, the Parseval energy E[F^2].
    pub fn energy(&self) -> T {
        self.coeffs
            .iter()
            .fold(T::zero(), |acc, &c| acc + c * c)
    }

    /// Reconstructs the table: F(u) = sum_S coeff(S) (-1)^(S . u).
    pub fn inverse(&self) -> Vec<T> {
        let mut table = self.coeffs.clone();
        fwht_in_place(&mut table).expect("spectrum length is a valid table length");
        table
    }
}

/// Expectation-normalized transform of a dense table.
pub fn fourier_transform<T: Float>(table: &[T]) -> Result<FourierSpectrum<T>> {
    let m = check_table_len(table.len())?;
    let mut coeffs = table.to_vec();
    fwht_in_place(&mut coeffs)?;
    let scale = T::one() / T::from(table.len()).expect("table length fits the scalar");
    for c in &mut coeffs {
        *c = *c * scale;
    }
    Ok(FourierSpectrum { m, coeffs })
}

/// E_{u,z}[F(u) G(u + z)] with z eta-biased, computed in the Fourier basis:
/// sum_S Fhat(S) Ghat(S) (1 - 2 eta)^|S|.
pub fn noisy_correlation<T: Float>(f: &[T], g: &[T], eta: T) -> Result<T> {
    if f.len() != g.len() {
        return Err(Error::LengthMismatch(f.len(), g.len()));
    }
    if eta < T::zero() || eta > T::from(0.5).unwrap() {
        return Err(Error::InvalidParameter(
            "noise rate eta must lie in [0, 1/2]".into(),
        ));
    }
    let fh = fourier_transform(f)?;
    let gh = fourier_transform(g)?;
    let rho = T::one() - (T::one() + T::one()) * eta;
    let mut acc = T::zero();
    for s in 0..f.len() {
        let k = s.count_ones() as i32;
        acc = acc + fh.coeff(s) * gh.coeff(s) * rho.powi(k);
    }
    Ok(acc)
}

/// (E|F|^p)^(1/p) under the uniform measure on the table's domain.
pub fn p_norm<T: Float>(table: &[T], p: T) -> T {
    let len = T::from(table.len()).expect("table length fits the scalar");
    let mean = table
        .iter()
        .fold(T::zero(), |acc, &v| acc + v.abs().powf(p))
        / len;
    mean.powf(T::one() / p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bitcore::BitString;
    use proptest::prelude::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Direct O(4^m) definition, the oracle for the fast path.
    fn naive_spectrum(table: &[f64]) -> Vec<f64> {
        let n = table.len();
        (0..n)
            .map(|s| {
                let mut acc = 0.0;
                for (u, &v) in table.iter().enumerate() {
                    let sign = if (s & u).count_ones() & 1 == 1 { -1.0 } else { 1.0 };
                    acc += sign * v;
                }
                acc / n as f64
            })
            .collect()
    }

    #[test]
    fn constant_table_transforms_to_delta() {
        let spec = fourier_transform(&[1.0f64; 8]).unwrap();
        assert!((spec.coeff(0) - 1.0).abs() < 1e-15);
        for s in 1..8 {
            assert!(spec.coeff(s).abs() < 1e-15);
        }
    }

    #[test]
    fn character_transforms_to_unit_coefficient() {
        let m = 4usize;
        for s0 in 0..1usize << m {
            let s0_bits = BitString::from_index(s0 as u64, m);
            let table: Vec<f64> = BitString::enumerate(m)
                .map(|u| if s0_bits.dot(&u).unwrap() { -1.0 } else { 1.0 })
                .collect();
            let spec = fourier_transform(&table).unwrap();
            for s in 0..1 << m {
                let expected = if s == s0 { 1.0 } else { 0.0 };
                assert!((spec.coeff(s) - expected).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn matches_direct_double_sum_on_random_m3() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..20 {
            let table: Vec<f64> = (0..8).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let fast = fourier_transform(&table).unwrap();
            let slow = naive_spectrum(&table);
            for s in 0..8 {
                assert!((fast.coeff(s) - slow[s]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn rejects_bad_sizes() {
        let mut t = vec![0.0f64; 3];
        assert!(fwht_in_place(&mut t).is_err());
        assert!(fourier_transform(&[1.0f64; 6]).is_err());
    }

    #[test]
    fn generic_over_f32() {
        let mut t = vec![1.0f32, -1.0, 2.0, 0.5];
        fwht_in_place(&mut t).unwrap();
        assert_eq!(t[0], 2.5f32);
    }

    proptest! {
        #[test]
        fn parseval_and_involution(values in proptest::collection::vec(-10.0f64..10.0, 1usize..=6)) {
            let m = values.len();
            let mut rng = ChaCha8Rng::seed_from_u64(values.len() as u64);
            let table: Vec<f64> = (0..1usize << m)
                .map(|_| rng.gen_range(-5.0..5.0))
                .collect();
            let spec = fourier_transform(&table).unwrap();
            let mean_sq: f64 = table.iter().map(|v| v * v).sum::<f64>() / table.len() as f64;
            prop_assert!((spec.energy() - mean_sq).abs() < 1e-9);
            let back = spec.inverse();
            for (a, b) in back.iter().zip(&table) {
                prop_assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn noisy_correlation_trivial_cases() {
        let f = vec![1.0f64; 16];
        assert!((noisy_correlation(&f, &f, 0.37).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn noise_operator_eigenvalue_on_characters() {
        let m = 5usize;
        for s0 in [1usize, 3, 7, 21, 31] {
            let s0_bits = BitString::from_index(s0 as u64, m);
            let table: Vec<f64> = BitString::enumerate(m)
                .map(|u| if s0_bits.dot(&u).unwrap() { -1.0 } else { 1.0 })
                .collect();
            for eta in [0.0, 0.1, 0.3, 0.5] {
                let k = s0.count_ones() as i32;
                let expected = (1.0 - 2.0 * eta).powi(k);
                let got = noisy_correlation(&table, &table, eta).unwrap();
                assert!((got - expected).abs() < 1e-12, "s0={s0} eta={eta}");
            }
        }
    }

    #[test]
    fn noisy_correlation_matches_direct_double_sum() {
        // Oracle: E_{u,z} F(u) G(u + z) summed over the whole cube.
        let m = 8usize;
        let size = 1usize << m;
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let f: Vec<f64> = (0..size).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let g: Vec<f64> = (0..size).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let eta = 0.3f64;
        let mut direct = 0.0;
        for u in 0..size {
            for z in 0..size {
                let w = z.count_ones() as i32;
                let pz = eta.powi(w) * (1.0 - eta).powi(m as i32 - w);
                direct += f[u] * g[u ^ z] * pz;
            }
        }
        direct /= size as f64;
        let fast = noisy_correlation(&f, &g, eta).unwrap();
        assert!((fast - direct).abs() < 1e-9);
    }

    #[test]
    fn noise_extremes() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let size = 64;
        let f: Vec<f64> = (0..size).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let g: Vec<f64> = (0..size).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let plain: f64 = f.iter().zip(&g).map(|(a, b)| a * b).sum::<f64>() / size as f64;
        assert!((noisy_correlation(&f, &g, 0.0).unwrap() - plain).abs() < 1e-9);
        let ef: f64 = f.iter().sum::<f64>() / size as f64;
        let eg: f64 = g.iter().sum::<f64>() / size as f64;
        assert!((noisy_correlation(&f, &g, 0.5).unwrap() - ef * eg).abs() < 1e-9);
    }

    #[test]
    fn noisy_correlation_rejects_mismatch_and_bad_eta() {
        assert!(noisy_correlation(&[1.0f64; 4], &[1.0f64; 8], 0.1).is_err());
        assert!(noisy_correlation(&[1.0f64; 4], &[1.0f64; 4], 0.7).is_err());
    }
}
