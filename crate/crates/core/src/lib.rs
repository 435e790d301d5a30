//! Direct data detection (D³) for OFDM receivers.
//!
//! The D³ decides a block of subcarrier symbols by minimising the energy of
//! the differences between channel quotients `r_v / d_v` on adjacent
//! subcarriers. No channel estimate, interpolation or equalisation is needed;
//! pilots only resolve the phase ambiguity of the constellation.
//!
//! The crate bundles everything needed to evaluate the detector at link level:
//!
//! - [`numerics`]: unitary FFT, Gaussian sampling, Q-function, `E1`, `J0`.
//! - [`channel`]: tapped-delay-line Rayleigh channels, Jakes evolution and
//!   correlation statistics.
//! - [`frame`]: constellations, pilot layouts, OFDM modulation and reception.
//! - [`detectors`]: coherent baselines, GLRT sequence detection and the D³
//!   family (exhaustive, Viterbi, 2-D, SIMO, resource block, coded).
//! - [`analysis`]: closed-form and quadrature error-rate predictions.
//! - [`fec`]: (171,131) convolutional code, hard Viterbi decoder, block interleaver.
//! - [`complexity`]: operation-count models and instrumented counters.
//! - [`harness`]: configuration, Monte Carlo runner and CSV output.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod channel;
pub mod complexity;
pub mod detectors;
pub mod error;
pub mod fec;
pub mod frame;
pub mod harness;
pub mod numerics;

pub use error::{Error, Result};
pub use numerics::Complex;
