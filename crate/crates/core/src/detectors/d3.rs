use super::{candidates, check_budget, check_line, DetectionResult};
use crate::error::{invalid, Error, Result};
use crate::frame::{Constellation, Grid};
use crate::numerics::Complex;

/// D³ objective `Σ_b Σ_v |r_{b,v}/d_v − r_{b,v+1}/d_{v+1}|²` of a full trial
/// sequence.
pub fn d3_objective(branches: &[&[Complex]], d: &[Complex]) -> Result<f64> {
    if d.iter().any(|z| z.norm_sqr() == 0.0) {
        return Err(invalid("trial sequence contains a zero symbol"));
    }
    let mut j = 0.0;
    for r in branches {
        if r.len() != d.len() {
            return Err(Error::LengthMismatch { expected: d.len(), actual: r.len() });
        }
        for v in 1..d.len() {
            j += (r[v - 1] / d[v - 1] - r[v] / d[v]).norm_sqr();
        }
    }
    Ok(j)
}

/// Two-dimensional objective: quotient differences between every pair of
/// horizontally or vertically adjacent cells.
pub fn d3_objective_2d(trial: &Grid, received: &Grid) -> Result<f64> {
    if trial.rows != received.rows || trial.cols != received.cols {
        return Err(Error::LengthMismatch { expected: trial.rows * trial.cols, actual: received.rows * received.cols });
    }
    let mut q = Grid::zeros(trial.rows, trial.cols);
    for i in 0..trial.rows {
        for k in 0..trial.cols {
            let d = trial.get(i, k);
            if d.norm_sqr() == 0.0 {
                return Err(invalid("trial grid contains a zero symbol"));
            }
            q.set(i, k, received.get(i, k) / d);
        }
    }
    let mut j = 0.0;
    for i in 0..q.rows {
        for k in 0..q.cols {
            if k + 1 < q.cols {
                j += (q.get(i, k) - q.get(i, k + 1)).norm_sqr();
            }
            if i + 1 < q.rows {
                j += (q.get(i, k) - q.get(i + 1, k)).norm_sqr();
            }
        }
    }
    Ok(j)
}

/// Precomputed branch metrics of one line.
///
/// For constant-modulus alphabets `|r_v/d_v|²` does not depend on the
/// choice of `d_v` (a pinned cell has a single candidate), so the metric
/// reduces to `−2 Re{(r_v/d_m)(r_{v+1}/d_n)^*}`; other alphabets use the
/// full squared quotient difference.
struct Metrics {
    /// `q[b][v][i] = r_{b,v} / cand[v][i]`
    q: Vec<Vec<Vec<Complex>>>,
    cm: bool,
}

impl Metrics {
    fn new(branches: &[&[Complex]], cand: &[Vec<Complex>], c: &Constellation) -> Self {
        let q = branches
            .iter()
            .map(|r| r.iter().zip(cand).map(|(rv, cs)| cs.iter().map(|d| rv / d).collect()).collect())
            .collect();
        Self { q, cm: c.is_constant_modulus() }
    }

    /// Metric of the transition from candidate `i` at cell `v` to candidate
    /// `j` at cell `v + 1`, summed over branches.
    #[inline]
    fn branch(&self, v: usize, i: usize, j: usize) -> f64 {
        let mut acc = 0.0;
        for qb in &self.q {
            let a = qb[v][i];
            let b = qb[v + 1][j];
            acc += if self.cm { -2.0 * (a.re * b.re + a.im * b.im) } else { (a - b).norm_sqr() };
        }
        acc
    }
}

fn check_branches(branches: &[&[Complex]], anchors: &[Option<Complex>]) -> Result<()> {
    if branches.is_empty() {
        return Err(invalid("at least one receive branch is required"));
    }
    for r in branches {
        check_line(r.len(), anchors)?;
    }
    if !anchors.is_empty() && anchors.iter().all(|a| a.is_none()) {
        return Err(Error::Unanchored);
    }
    Ok(())
}

fn finish(
    branches: &[&[Complex]],
    cand: &[Vec<Complex>],
    sel: &[usize],
    anchors: &[Option<Complex>],
    c: &Constellation,
) -> Result<DetectionResult> {
    let d: Vec<Complex> = cand.iter().zip(sel).map(|(cs, &i)| cs[i]).collect();
    let metric = d3_objective(branches, &d)?;
    let indices = anchors.iter().zip(sel).filter(|(a, _)| a.is_none()).map(|(_, &i)| i).collect();
    Ok(DetectionResult::from_indices(indices, c, metric, 0))
}

/// Exhaustive D³ over the free cells of a line.
///
/// Ties resolve to the sequence that is smallest when compared from the
/// last cell backwards, which is the sequence the Viterbi detector keeps.
pub fn d3_bruteforce(
    r: &[Complex],
    anchors: &[Option<Complex>],
    c: &Constellation,
    budget: u64,
) -> Result<DetectionResult> {
    d3_simo_bruteforce(&[r], anchors, c, budget)
}

/// Exhaustive D³ with branch metrics summed over receive antennas.
pub fn d3_simo_bruteforce(
    branches: &[&[Complex]],
    anchors: &[Option<Complex>],
    c: &Constellation,
    budget: u64,
) -> Result<DetectionResult> {
    check_branches(branches, anchors)?;
    let free: Vec<usize> = (0..anchors.len()).filter(|&v| anchors[v].is_none()).collect();
    check_budget(c.size(), free.len(), budget)?;
    let cand = candidates(anchors, c);
    let metrics = Metrics::new(branches, &cand, c);
    let n = anchors.len();
    let mut sel = vec![0usize; n];
    let mut best = sel.clone();
    let mut best_j = f64::INFINITY;
    loop {
        let mut j = 0.0;
        for v in 1..n {
            j += metrics.branch(v - 1, sel[v - 1], sel[v]);
        }
        if j < best_j {
            best_j = j;
            best.copy_from_slice(&sel);
        }
        // Odometer with the first free cell turning fastest.
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
    finish(branches, &cand, &best, anchors, c)
}

/// Path metrics and survivor pointers after one trellis step.
#[derive(Debug, Clone, PartialEq)]
pub struct TrellisState {
    pub step: usize,
    pub path_metrics: Vec<f64>,
    /// Predecessor state of each surviving path.
    pub survivors: Vec<usize>,
}

fn viterbi_states(metrics: &Metrics, cand: &[Vec<Complex>]) -> Vec<TrellisState> {
    let n = cand.len();
    let mut states = Vec::with_capacity(n);
    states.push(TrellisState { step: 0, path_metrics: vec![0.0; cand[0].len()], survivors: vec![0; cand[0].len()] });
    for v in 1..n {
        let prev = &states[v - 1].path_metrics;
        let width = cand[v].len();
        let mut pm = vec![f64::INFINITY; width];
        let mut surv = vec![0usize; width];
        for jdx in 0..width {
            for (idx, &p) in prev.iter().enumerate() {
                let m = p + metrics.branch(v - 1, idx, jdx);
                if m < pm[jdx] {
                    pm[jdx] = m;
                    surv[jdx] = idx;
                }
            }
        }
        states.push(TrellisState { step: v, path_metrics: pm, survivors: surv });
    }
    states
}

fn traceback(states: &[TrellisState]) -> Vec<usize> {
    let n = states.len();
    let mut sel = vec![0usize; n];
    let last = &states[n - 1].path_metrics;
    let mut s = 0;
    for (i, &m) in last.iter().enumerate() {
        if m < last[s] {
            s = i;
        }
    }
    for v in (0..n).rev() {
        sel[v] = s;
        s = states[v].survivors[s];
    }
    sel
}

/// Viterbi search of the D³ objective: one state per candidate symbol of
/// each cell, so free cells carry M states and pinned cells collapse the
/// trellis to a single state.
pub fn d3_viterbi(r: &[Complex], anchors: &[Option<Complex>], c: &Constellation) -> Result<DetectionResult> {
    d3_simo_viterbi(&[r], anchors, c)
}

/// Viterbi D³ with branch metrics summed over receive antennas.
pub fn d3_simo_viterbi(
    branches: &[&[Complex]],
    anchors: &[Option<Complex>],
    c: &Constellation,
) -> Result<DetectionResult> {
    check_branches(branches, anchors)?;
    if anchors.is_empty() {
        return Ok(DetectionResult::from_indices(Vec::new(), c, 0.0, 0));
    }
    let cand = candidates(anchors, c);
    let metrics = Metrics::new(branches, &cand, c);
    let states = viterbi_states(&metrics, &cand);
    let sel = traceback(&states);
    finish(branches, &cand, &sel, anchors, c)
}

/// Per-step trellis record of a single-branch Viterbi run.
pub fn viterbi_trellis(r: &[Complex], anchors: &[Option<Complex>], c: &Constellation) -> Result<Vec<TrellisState>> {
    check_branches(&[r], anchors)?;
    let cand = candidates(anchors, c);
    Ok(viterbi_states(&Metrics::new(&[r], &cand, c), &cand))
}

/// D³ restricted to a codebook: each codeword fills the free cells in
/// order and the codeword with the smallest objective wins (lowest index on
/// ties).
pub fn d3_coded(
    r: &[Complex],
    anchors: &[Option<Complex>],
    codebook: &[Vec<Complex>],
    c: &Constellation,
    budget: u64,
) -> Result<(usize, DetectionResult)> {
    check_branches(&[r], anchors)?;
    if codebook.is_empty() {
        return Err(invalid("empty codebook"));
    }
    if codebook.len() as u64 > budget {
        return Err(Error::BudgetExceeded { trials: codebook.len() as u128, budget });
    }
    let free = anchors.iter().filter(|a| a.is_none()).count();
    let mut best = 0;
    let mut best_j = f64::INFINITY;
    for (w, cw) in codebook.iter().enumerate() {
        if cw.len() != free {
            return Err(Error::LengthMismatch { expected: free, actual: cw.len() });
        }
        let mut it = cw.iter();
        let d: Vec<Complex> = anchors.iter().map(|a| a.unwrap_or_else(|| *it.next().expect("counted"))).collect();
        let j = d3_objective(&[r], &d)?;
        if j < best_j {
            best_j = j;
            best = w;
        }
    }
    let indices = codebook[best].iter().map(|&z| c.nearest(z)).collect();
    Ok((best, DetectionResult::from_indices(indices, c, best_j, 0)))
}
