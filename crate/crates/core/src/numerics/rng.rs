use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::Complex;
use crate::error::{invalid, Result};

/// Generator used throughout the simulator.
pub type SimRng = ChaCha8Rng;

/// Identifies an independent, reproducible random stream.
///
/// The same `(seed, stream_id)` always yields the same sequence; distinct
/// stream ids select non-overlapping ChaCha streams under the same key.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RngStream {
    pub seed: u64,
    pub stream_id: u64,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        Self { seed, stream_id }
    }

    pub fn rng(&self) -> SimRng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream_id);
        rng
    }
}

/// Draws `w ~ CN(0, variance)`: real and imaginary parts are independent
/// with variance `variance / 2` each.
pub fn sample_complex_gaussian(rng: &mut SimRng, variance_per_complex: f64) -> Result<Complex> {
    if !(variance_per_complex > 0.0) || !variance_per_complex.is_finite() {
        return Err(invalid(format!(
            "complex Gaussian variance must be positive and finite, got {variance_per_complex}"
        )));
    }
    let s = (variance_per_complex / 2.0).sqrt();
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Ok(Complex::new(s * re, s * im))
}
