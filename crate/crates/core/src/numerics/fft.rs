use std::sync::Arc;

use rustfft::{Fft, FftPlanner};

use super::Complex;
use crate::error::{Error, Result};

fn check_len(len: usize) -> Result<()> {
    if len < 2 || !len.is_power_of_two() {
        return Err(Error::FftLength { len });
    }
    Ok(())
}

/// Unitary FFT (1/√N scaling in both directions) of a power-of-two length
/// vector.
///
/// `inverse = true` computes `F^H x`, so `fft(&fft(x, false)?, true)? == x`.
pub fn fft(x: &[Complex], inverse: bool) -> Result<Vec<Complex>> {
    let engine = FftEngine::new(x.len())?;
    let mut out = x.to_vec();
    if inverse {
        engine.inverse(&mut out);
    } else {
        engine.forward(&mut out);
    }
    Ok(out)
}

/// Cached forward/inverse plans for one transform length.
#[derive(Clone)]
pub struct FftEngine {
    len: usize,
    scale: f64,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for FftEngine {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FftEngine").field("len", &self.len).finish()
    }
}

impl FftEngine {
    pub fn new(len: usize) -> Result<Self> {
        check_len(len)?;
        let mut planner = FftPlanner::new();
        Ok(Self {
            len,
            scale: 1.0 / (len as f64).sqrt(),
            forward: planner.plan_fft_forward(len),
            inverse: planner.plan_fft_inverse(len),
        })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// In-place unitary forward transform. Panics if `buf.len() != self.len()`.
    pub fn forward(&self, buf: &mut [Complex]) {
        assert_eq!(buf.len(), self.len, "fft buffer length");
        self.forward.process(buf);
        buf.iter_mut().for_each(|z| *z *= self.scale);
    }

    /// In-place unitary inverse transform.
    pub fn inverse(&self, buf: &mut [Complex]) {
        assert_eq!(buf.len(), self.len, "fft buffer length");
        self.inverse.process(buf);
        buf.iter_mut().for_each(|z| *z *= self.scale);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{energy, sample_complex_gaussian, RngStream};
    use proptest::prelude::*;

    #[test]
    fn impulse_maps_to_constant() {
        let mut x = vec![Complex::new(0.0, 0.0); 4];
        x[0] = Complex::new(1.0, 0.0);
        let y = fft(&x, false).unwrap();
        for z in y {
            assert!((z - Complex::new(0.5, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn rejects_bad_lengths() {
        for len in [0usize, 1, 3, 6, 100] {
            let x = vec![Complex::new(1.0, 0.0); len];
            assert_eq!(fft(&x, false), Err(Error::FftLength { len }));
        }
    }

    #[test]
    fn matches_naive_dft() {
        let mut rng = RngStream::new(3, 0).rng();
        let n = 16;
        let x: Vec<Complex> = (0..n).map(|_| sample_complex_gaussian(&mut rng, 1.0).unwrap()).collect();
        let y = fft(&x, false).unwrap();
        for (k, yk) in y.iter().enumerate() {
            let mut acc = Complex::new(0.0, 0.0);
            for (m, xm) in x.iter().enumerate() {
                let ph = -2.0 * std::f64::consts::PI * (k * m) as f64 / n as f64;
                acc += xm * Complex::from_polar(1.0, ph);
            }
            acc /= (n as f64).sqrt();
            assert!((acc - yk).norm() < 1e-12);
        }
    }

    proptest! {
        #[test]
        fn round_trip_and_parseval(seed in any::<u64>(), log_n in 1u32..11) {
            let n = 1usize << log_n;
            let mut rng = RngStream::new(seed, 7).rng();
            let x: Vec<Complex> = (0..n)
                .map(|_| sample_complex_gaussian(&mut rng, 2.0).unwrap())
                .collect();
            let y = fft(&x, false).unwrap();
            prop_assert!((energy(&y) - energy(&x)).abs() < 1e-12 * energy(&x).max(1.0));
            let back = fft(&y, true).unwrap();
            for (a, b) in back.iter().zip(&x) {
                prop_assert!((a - b).norm() < 1e-12);
            }
        }
    }
}
