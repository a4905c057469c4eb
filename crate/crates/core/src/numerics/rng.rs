use nalgebra::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;

use super::CMatrix;
use crate::scalar::Real;

/// Reproducible random substream keyed by `(master_seed, stream_id)`.
///
/// The master seed keys a ChaCha generator and the stream id selects one of
/// its 2⁶⁴ independent streams, so the draw sequence is a pure function of
/// the two integers.
#[derive(Debug, Clone)]
pub struct RngStream {
    master_seed: u64,
    stream_id: u64,
    rng: ChaCha12Rng,
}

pub fn rng_substream(master_seed: u64, stream_id: u64) -> RngStream {
    let mut rng = ChaCha12Rng::seed_from_u64(master_seed);
    rng.set_stream(stream_id);
    RngStream { master_seed, stream_id, rng }
}

impl RngStream {
    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    pub fn standard_normal(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }

    /// Circularly symmetric `CN(0, variance)`: real and imaginary parts each
    /// carry half the variance.
    pub fn complex_gaussian<T: Real>(&mut self, variance: T) -> Complex<T> {
        let scale = (variance * T::lit(0.5)).sqrt();
        let re = T::lit(self.standard_normal());
        let im = T::lit(self.standard_normal());
        Complex::new(re * scale, im * scale)
    }

    /// Matrix of i.i.d. `CN(0, variance)` entries, filled column by column.
    pub fn complex_gaussian_matrix<T: Real>(&mut self, rows: usize, cols: usize, variance: T) -> CMatrix<T> {
        let scale = (variance * T::lit(0.5)).sqrt();
        CMatrix::from_fn(rows, cols, |_, _| {
            let re = T::lit(self.standard_normal());
            let im = T::lit(self.standard_normal());
            Complex::new(re * scale, im * scale)
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_key_same_sequence() {
        let a: Vec<u64> = {
            let mut r = rng_substream(42, 3);
            (0..64).map(|_| r.standard_normal().to_bits()).collect()
        };
        let b: Vec<u64> = {
            let mut r = rng_substream(42, 3);
            (0..64).map(|_| r.standard_normal().to_bits()).collect()
        };
        assert_eq!(a, b);
    }

    #[test]
    fn distinct_streams_differ() {
        let mut r0 = rng_substream(42, 0);
        let mut r1 = rng_substream(42, 1);
        let a: Vec<f64> = (0..16).map(|_| r0.standard_normal()).collect();
        let b: Vec<f64> = (0..16).map(|_| r1.standard_normal()).collect();
        assert_ne!(a, b);
        let mut s1 = rng_substream(43, 0);
        let c: Vec<f64> = (0..16).map(|_| s1.standard_normal()).collect();
        assert_ne!(a, c);
    }

    #[test]
    fn complex_gaussian_moments() {
        let n = 1_000_000;
        let mut r = rng_substream(2024, 9);
        let mut mean = Complex::new(0.0, 0.0);
        let mut power = 0.0;
        for _ in 0..n {
            let z: Complex<f64> = r.complex_gaussian(1.0);
            mean += z;
            power += z.norm_sqr();
        }
        mean /= n as f64;
        let var = power / n as f64 - mean.norm_sqr();
        let bound = 5.0 / (n as f64).sqrt();
        assert!(mean.re.abs() < bound && mean.im.abs() < bound, "mean {mean}");
        assert!((var - 1.0).abs() < 0.01, "variance {var}");
    }

    #[test]
    fn keys_are_reported() {
        let r = rng_substream(5, 11);
        assert_eq!((r.master_seed(), r.stream_id()), (5, 11));
    }
}
