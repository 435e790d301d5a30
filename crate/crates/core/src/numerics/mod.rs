//! Numerical building blocks: complex samples, the unitary FFT, Gaussian
//! sampling with reproducible streams, and special functions.

mod fft;
mod rng;
mod special;

pub use fft::{fft, FftEngine};
pub use rng::{sample_complex_gaussian, RngStream, SimRng};
pub use special::{bessel_j0, exp_integral_e1, q_approx, q_exact, scaled_exp_integral_e1};

/// A complex baseband sample (`re`, `im`), dimensionless amplitude.
pub type Complex = num_complex::Complex64;

/// Squared Euclidean norm of a complex vector.
pub fn energy(x: &[Complex]) -> f64 {
    x.iter().map(|z| z.norm_sqr()).sum()
}
