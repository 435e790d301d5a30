//! Data detectors: coherent baselines with perfect or estimated CSI, the
//! GLRT sequence detector, and the D³ family.
//!
//! Sequence detectors operate on a *line*: received samples `r` plus one
//! anchor per cell (`Some(symbol)` for pinned pilot or previously decided
//! cells, `None` for free data cells). Results cover the free cells only,
//! in line order.

mod coherent;
mod d3;
mod estimate;
mod glrt;
mod rb;

pub use coherent::{coherent_mld, coherent_mrc, slice, zf_equalize, Equalized};
pub use d3::{
    d3_bruteforce, d3_coded, d3_objective, d3_objective_2d, d3_simo_bruteforce, d3_simo_viterbi, d3_viterbi,
    viterbi_trellis, TrellisState,
};
pub use estimate::{ls_estimate_interpolate, rb_ls_estimate, CsiEstimate, Interpolation};
pub use glrt::{glrt_mlsd, glrt_simo_mlsd};
pub use rb::detect_resource_block;

use crate::error::{Error, Result};
use crate::frame::Constellation;
use crate::numerics::Complex;

/// Default cap on exhaustive-search trial evaluations.
pub const DEFAULT_BF_BUDGET: u64 = 1 << 24;

/// Decisions for the free cells of a line.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectionResult {
    pub indices: Vec<usize>,
    pub symbols: Vec<Complex>,
    pub bits: Vec<u8>,
    /// Objective value of the decided sequence (detector specific).
    pub metric: f64,
    /// Cells decided by the tie rule because the channel gave no
    /// information (zero gain).
    pub erasures: usize,
}

impl DetectionResult {
    pub(crate) fn from_indices(indices: Vec<usize>, c: &Constellation, metric: f64, erasures: usize) -> Self {
        let symbols = indices.iter().map(|&i| c.point(i)).collect();
        let bits = c.indices_to_bits(&indices);
        Self { indices, symbols, bits, metric, erasures }
    }
}

pub(crate) fn check_line(r_len: usize, anchors: &[Option<Complex>]) -> Result<()> {
    if r_len != anchors.len() {
        return Err(Error::LengthMismatch { expected: anchors.len(), actual: r_len });
    }
    Ok(())
}

/// Number of exhaustive trials `M^free`, rejected when above `budget`.
pub(crate) fn check_budget(m: usize, free: usize, budget: u64) -> Result<u64> {
    let mut trials: u128 = 1;
    for _ in 0..free {
        trials = trials.saturating_mul(m as u128);
    }
    if trials > budget as u128 {
        return Err(Error::BudgetExceeded { trials, budget });
    }
    Ok(trials as u64)
}

/// Per-cell candidate symbols: the anchor alone, or the full alphabet.
pub(crate) fn candidates(anchors: &[Option<Complex>], c: &Constellation) -> Vec<Vec<Complex>> {
    anchors
        .iter()
        .map(|a| match a {
            Some(p) => vec![*p],
            None => c.points.clone(),
        })
        .collect()
}
