use super::{candidates, check_budget, check_line, DetectionResult};
use crate::error::{Error, Result};
use crate::frame::Constellation;
use crate::numerics::Complex;

/// GLRT sequence detection for a channel that is flat over the line:
/// maximizes `|d̃^H r|² / ‖d̃‖` over sequences with the anchors pinned.
///
/// Enumeration order and tie handling match [`super::d3_bruteforce`].
pub fn glrt_mlsd(
    r: &[Complex],
    anchors: &[Option<Complex>],
    c: &Constellation,
    budget: u64,
) -> Result<DetectionResult> {
    glrt_simo_mlsd(&[r], anchors, c, budget)
}

/// Receive-diversity GLRT with an independent flat gain per branch:
/// maximizes `Σ_b |d̃^H r_b|² / ‖d̃‖`.
pub fn glrt_simo_mlsd(
    branches: &[&[Complex]],
    anchors: &[Option<Complex>],
    c: &Constellation,
    budget: u64,
) -> Result<DetectionResult> {
    if branches.is_empty() {
        return Err(Error::InvalidArgument("at least one receive branch is required".into()));
    }
    for r in branches {
        check_line(r.len(), anchors)?;
    }
    if anchors.iter().all(|a| a.is_none()) {
        return Err(Error::Unanchored);
    }
    let free: Vec<usize> = (0..anchors.len()).filter(|&v| anchors[v].is_none()).collect();
    check_budget(c.size(), free.len(), budget)?;
    let cand = candidates(anchors, c);
    let n = anchors.len();
    let mut sel = vec![0usize; n];
    let mut best = sel.clone();
    let mut best_score = f64::NEG_INFINITY;
    loop {
        let mut energy = 0.0;
        for v in 0..n {
            energy += cand[v][sel[v]].norm_sqr();
        }
        let mut score = 0.0;
        for r in branches {
            let mut corr = Complex::new(0.0, 0.0);
            for v in 0..n {
                corr += cand[v][sel[v]].conj() * r[v];
            }
            score += corr.norm_sqr();
        }
        score /= energy.sqrt();
        if score > best_score {
            best_score = score;
            best.copy_from_slice(&sel);
        }
        let mut carry = true;
        for &v in &free {
            sel[v] += 1;
            if sel[v] < c.size() {
                carry = false;
                break;
            }
            sel[v] = 0;
        }
        if carry {
            break;
        }
    }
    let indices = free.iter().map(|&v| best[v]).collect();
    Ok(DetectionResult::from_indices(indices, c, best_score, 0))
}
