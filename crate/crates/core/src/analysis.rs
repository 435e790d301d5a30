//! Sequence- and bit-error predictions for D³ segments: conditional SEP
//! from Gaussian pair statistics, flat-fading closed forms, and adaptive
//! quadrature over the fading distribution.

use std::f64::consts::{PI, SQRT_2};

use serde::Serialize;

use crate::error::{invalid, Result};
use crate::frame::SegmentMode;
use crate::numerics::{exp_integral_e1, q_approx, q_exact, scaled_exp_integral_e1, Complex};

/// Average SNR `γ̄ = E|d|² E|H|² / (2σ_w²)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnrPoint {
    pub gamma_bar: f64,
    pub db: f64,
}

impl SnrPoint {
    pub fn from_db(db: f64) -> Self {
        Self { gamma_bar: 10f64.powf(db / 10.0), db }
    }

    pub fn from_linear(gamma_bar: f64) -> Result<Self> {
        if !(gamma_bar > 0.0) || !gamma_bar.is_finite() {
            return Err(invalid(format!("average SNR must be positive, got {gamma_bar}")));
        }
        Ok(Self { gamma_bar, db: 10.0 * gamma_bar.log10() })
    }

    /// Per-component noise variance for unit signal and channel power.
    pub fn sigma_w2(&self) -> f64 {
        1.0 / (2.0 * self.gamma_bar)
    }
}

/// How a prediction was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    ClosedForm,
    Quadrature,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::ClosedForm => "closed-form",
            Method::Quadrature => "quadrature",
        }
    }
}

/// Which Gaussian tail function a quadrature uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QFunction {
    Exact,
    Approx,
}

impl QFunction {
    /// Tail probability; the approximation is applied to `|x|` and
    /// reflected for negative arguments.
    pub fn eval(self, x: f64) -> f64 {
        match self {
            QFunction::Exact => q_exact(x),
            QFunction::Approx => {
                let t = q_approx(x.abs()).expect("finite argument");
                if x >= 0.0 {
                    t
                } else {
                    1.0 - t
                }
            }
        }
    }
}

/// Sequence error probability with the derived bit-error figures.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SepPrediction {
    pub p_s: f64,
    pub p_b_mid: f64,
    pub p_b_lower: f64,
    pub p_b_upper: f64,
    pub method: Method,
}

/// BER bounds `P_S/K_D ≤ P_B ≤ P_S` and midpoint `P_S / (0.5 (1 + K_D))`.
pub fn ber_from_sep(p_s: f64, k_d: usize, method: Method) -> Result<SepPrediction> {
    if !(0.0..=1.0).contains(&p_s) {
        return Err(invalid(format!("sequence error probability {p_s} outside [0, 1]")));
    }
    if k_d == 0 {
        return Err(invalid("a segment needs at least one data symbol"));
    }
    Ok(unchecked_prediction(p_s, k_d, method))
}

fn unchecked_prediction(p_s: f64, k_d: usize, method: Method) -> SepPrediction {
    SepPrediction {
        p_s,
        p_b_mid: p_s / (0.5 * (1.0 + k_d as f64)),
        p_b_lower: p_s / k_d as f64,
        p_b_upper: p_s,
        method,
    }
}

/// Gaussian statistics of `Re{r_v r_w^*}` for the all-ones sequence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairStats {
    pub mu_sp: f64,
    pub sigma_sp_sq: f64,
}

/// `μ = Re{H_v H_w^*}` and `σ² = σ_w²(|H_v|² + |H_w|² + σ_w²)`.
pub fn pair_stats(h_v: Complex, h_w: Complex, sigma_w2: f64) -> PairStats {
    PairStats {
        mu_sp: h_v.re * h_w.re + h_v.im * h_w.im,
        sigma_sp_sq: sigma_w2 * (h_v.norm_sqr() + h_w.norm_sqr() + sigma_w2),
    }
}

// Q(√(2μ/σ²)) extended to negative μ as Q(−√(2|μ|/σ²)).
fn pair_error(ratio: f64, q: QFunction) -> f64 {
    let x = (2.0 * ratio.abs()).sqrt();
    q.eval(if ratio >= 0.0 { x } else { -x })
}

/// Conditional SEP of one segment with known gains `h`, treating the
/// adjacent-pair decisions as independent.
///
/// Single-sided: `1 − Π_{v=0}^{K−2} [1 − Q(√(2μ_v/σ_v²))]`. Double-sided:
/// the two pilot-edge pairs merge into one factor with argument
/// `√(2√2 μ/σ²)` (μ/σ² averaged over the two edge pairs), times the
/// `K − 3` interior factors.
pub fn sep_conditional(h: &[Complex], sigma_w2: f64, mode: SegmentMode, q: QFunction) -> Result<f64> {
    if !(sigma_w2 > 0.0) {
        return Err(invalid("conditional SEP needs a positive noise variance"));
    }
    let k = h.len();
    let ratio = |v: usize| {
        let s = pair_stats(h[v], h[v + 1], sigma_w2);
        s.mu_sp / s.sigma_sp_sq
    };
    let mut pc = 1.0;
    match mode {
        SegmentMode::Single => {
            if k < 2 {
                return Err(invalid("single-sided segment needs K >= 2"));
            }
            for v in 0..k - 1 {
                pc *= 1.0 - pair_error(ratio(v), q);
            }
        }
        SegmentMode::Double => {
            if k < 3 {
                return Err(invalid("double-sided segment needs K >= 3"));
            }
            let edge = 0.5 * (ratio(0) + ratio(k - 2));
            pc *= 1.0 - pair_error(SQRT_2 * edge, q);
            for v in 1..k - 2 {
                pc *= 1.0 - pair_error(ratio(v), q);
            }
        }
    }
    Ok(1.0 - pc)
}

/// Exact error probability of a K = 2 single-sided segment with a fixed
/// flat gain `|H|² = alpha2`: the DBPSK-style `½ exp(−|H|²/(2σ_w²))`.
pub fn dbpsk_conditional(alpha2: f64, sigma_w2: f64) -> f64 {
    0.5 * (-alpha2 / (2.0 * sigma_w2)).exp()
}

/// Adaptive Simpson quadrature with absolute tolerance `tol`.
///
/// The interval is first split geometrically towards `a` (pieces
/// `[a + w/2^{j+1}, a + w/2^j]`), so integrands concentrated near the lower
/// limit, as fading averages are at high SNR, are resolved.
pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    #[allow(clippy::too_many_arguments)]
    fn rec(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let flm = f(0.5 * (a + m));
        let frm = f(0.5 * (m + b));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) + rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
    let piece = |lo: f64, hi: f64, tol: f64| {
        // Four fixed sub-panels before adapting.
        let h = (hi - lo) / 4.0;
        (0..4)
            .map(|i| {
                let x0 = lo + i as f64 * h;
                let x1 = x0 + h;
                let (f0, fm, f1) = (f(x0), f(0.5 * (x0 + x1)), f(x1));
                rec(f, x0, x1, f0, fm, f1, h / 6.0 * (f0 + 4.0 * fm + f1), tol / 4.0, 40)
            })
            .sum::<f64>()
    };
    let levels = 60;
    let w = b - a;
    let mut total = piece(a, a + w * 0.5f64.powi(levels), tol / (levels + 1) as f64);
    for j in (0..levels).rev() {
        let lo = a + w * 0.5f64.powi(j + 1);
        let hi = a + w * 0.5f64.powi(j);
        total += piece(lo, hi, tol / (levels + 1) as f64);
    }
    total
}

const QUAD_TOL: f64 = 1e-13;

// Flat-fading conditional argument x² = a / (σ²(n σ² + a)) for combined
// power a over n branches.
fn flat_x(a: f64, sigma_w2: f64, n: f64) -> f64 {
    (a / (sigma_w2 * (n * sigma_w2 + a))).sqrt()
}

fn flat_conditional(x: f64, k: usize, mode: SegmentMode, q: QFunction) -> f64 {
    match mode {
        SegmentMode::Single => 1.0 - (1.0 - q.eval(x)).powi(k as i32 - 1),
        SegmentMode::Double => {
            let edge = 1.0 - q.eval(2f64.powf(0.25) * x);
            1.0 - edge * (1.0 - q.eval(x)).powi(k as i32 - 3)
        }
    }
}

/// Average of the flat-fading conditional SEP over Rayleigh fading with
/// `E|H|² = 1`, i.e. `f(α) = 2α e^{−α²}` on `(0, 8σ_H√K]`.
pub fn flat_quadrature(k: usize, mode: SegmentMode, snr: SnrPoint, q: QFunction) -> Result<f64> {
    check_k(k, mode)?;
    let s2 = snr.sigma_w2();
    let upper = 8.0 * std::f64::consts::FRAC_1_SQRT_2 * (k as f64).sqrt();
    let f = |alpha: f64| {
        let x = flat_x(alpha * alpha, s2, 1.0);
        flat_conditional(x, k, mode, q) * 2.0 * alpha * (-alpha * alpha).exp()
    };
    Ok(adaptive_simpson(&f, 0.0, upper, QUAD_TOL))
}

/// Average of the SIMO conditional SEP over the combined power
/// `a ~ Gamma(n, 1)` on `(0, 80]`.
pub fn simo_quadrature(n_branches: usize, k: usize, snr: SnrPoint, q: QFunction) -> Result<f64> {
    if n_branches == 0 {
        return Err(invalid("at least one receive branch is required"));
    }
    check_k(k, SegmentMode::Single)?;
    let s2 = snr.sigma_w2();
    let n = n_branches as f64;
    let log_gamma_n: f64 = (1..n_branches).map(|i| (i as f64).ln()).sum();
    let f = |a: f64| {
        if a <= 0.0 {
            return 0.0;
        }
        let x = flat_x(a, s2, n);
        let density = ((n - 1.0) * a.ln() - a - log_gamma_n).exp();
        flat_conditional(x, k, SegmentMode::Single, q) * density
    };
    Ok(adaptive_simpson(&f, 0.0, 80.0, QUAD_TOL))
}

fn check_k(k: usize, mode: SegmentMode) -> Result<()> {
    let min = match mode {
        SegmentMode::Single => 2,
        SegmentMode::Double => 3,
    };
    if k < min {
        return Err(invalid(format!("segment length {k} below {min} for {mode:?}")));
    }
    Ok(())
}

/// Flat-fading closed forms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClosedForm {
    /// Single-sided K = 2: `1 / (2(γ̄ + 1))`.
    SsK2,
    /// Single-sided K = 3, in terms of ζ₁.
    SsK3,
    /// Single-sided K = 7, in terms of ζ₂.
    SsK7,
    /// Double-sided K = 3, in terms of Υ.
    DsK3,
    /// Double-sided K = 4, in terms of Ω₁.
    DsK4,
    /// Double-sided K = 6, in terms of Ω₁ and Ω₂.
    DsK6,
    /// Two receive branches, K = 2, in terms of ϰ.
    SimoN2K2,
}

impl ClosedForm {
    pub const ALL: [ClosedForm; 7] = [
        ClosedForm::SsK2,
        ClosedForm::SsK3,
        ClosedForm::SsK7,
        ClosedForm::DsK3,
        ClosedForm::DsK4,
        ClosedForm::DsK6,
        ClosedForm::SimoN2K2,
    ];

    pub fn k(self) -> usize {
        match self {
            ClosedForm::SsK2 | ClosedForm::SimoN2K2 => 2,
            ClosedForm::SsK3 | ClosedForm::DsK3 => 3,
            ClosedForm::DsK4 => 4,
            ClosedForm::DsK6 => 6,
            ClosedForm::SsK7 => 7,
        }
    }

    pub fn mode(self) -> SegmentMode {
        match self {
            ClosedForm::DsK3 | ClosedForm::DsK4 | ClosedForm::DsK6 => SegmentMode::Double,
            _ => SegmentMode::Single,
        }
    }

    pub fn n_branches(self) -> usize {
        if self == ClosedForm::SimoN2K2 {
            2
        } else {
            1
        }
    }

    /// Evaluates the expression exactly as written.
    pub fn eval(self, snr: SnrPoint) -> f64 {
        let g = snr.gamma_bar;
        match self {
            ClosedForm::SsK2 => 1.0 / (2.0 * (g + 1.0)),
            ClosedForm::SsK3 => {
                let z = 1.0 / (2.0 * g) * (1.0 / g + 1.0);
                z / PI * scaled_e1(z + 1.0)
            }
            ClosedForm::SsK7 => {
                let z = 1.0 / (2.0 * g) * (1.0 / (4.0 * g) + 1.0);
                let t = 2.0 * z + 6.0;
                z / (64.0 * PI.powi(3)) * (t * t * scaled_e1(z + 3.0) - 4.0 * (z + 1.0))
            }
            ClosedForm::DsK3 => {
                let u = (8.0 * g + SQRT_2 * (4.0 + 1.0 / g)).sqrt();
                (u / 2.0 - SQRT_2) / u
            }
            ClosedForm::DsK4 => {
                let o1 = omega1(g);
                (o1 - 1.0) * scaled_e1(o1) / (8.0 * PI * g)
            }
            ClosedForm::DsK6 => {
                let o1 = omega1(g);
                let o2 = 2.0 + SQRT_2 / g * (8.0 + 1.0 / (32.0 * g));
                let e1 = exp_integral_e1(o2).expect("positive argument");
                (o1 - 1.0) / (4.0 * PI * PI) * (1.0 - ((o1 - 1.0) * scaled_e1(o2) + 2.0 * e1))
            }
            ClosedForm::SimoN2K2 => {
                let kappa = (2.0 + g).sqrt();
                // e^{ϰ²} overflows for large γ̄; the printed expression is kept.
                0.5 + q_exact(kappa / g.sqrt()) * (2.0 * g * (g / SQRT_2 + 2.0) - (kappa * kappa).exp())
                    - g * kappa / (2.0 * PI).sqrt()
            }
        }
    }

    /// Quadrature of the conditional expression the closed form is derived
    /// from, with the chosen Q function.
    pub fn reference(self, snr: SnrPoint, q: QFunction) -> f64 {
        let r = if self == ClosedForm::SimoN2K2 {
            simo_quadrature(2, 2, snr, q)
        } else {
            flat_quadrature(self.k(), self.mode(), snr, q)
        };
        r.expect("valid closed-form parameters")
    }
}

fn omega1(g: f64) -> f64 {
    1.0 + SQRT_2 / (4.0 * g) * (1.0 + 1.0 / (4.0 * g))
}

fn scaled_e1(x: f64) -> f64 {
    scaled_exp_integral_e1(x).expect("positive argument")
}

fn data_count(k: usize, mode: SegmentMode) -> usize {
    match mode {
        SegmentMode::Single => k - 1,
        SegmentMode::Double => k - 2,
    }
}

fn closed_form_for(k: usize, mode: SegmentMode, n_branches: usize) -> Option<ClosedForm> {
    ClosedForm::ALL.into_iter().find(|c| c.k() == k && c.mode() == mode && c.n_branches() == n_branches)
}

fn predict(k: usize, mode: SegmentMode, n_branches: usize, snr: SnrPoint) -> Result<SepPrediction> {
    check_k(k, mode)?;
    let k_d = data_count(k, mode);
    if let Some(cf) = closed_form_for(k, mode, n_branches) {
        // Closed forms are reported as evaluated even where they leave [0, 1].
        return Ok(unchecked_prediction(cf.eval(snr), k_d, Method::ClosedForm));
    }
    let p = if n_branches == 1 {
        flat_quadrature(k, mode, snr, QFunction::Exact)?
    } else {
        simo_quadrature(n_branches, k, snr, QFunction::Exact)?
    };
    ber_from_sep(p.clamp(0.0, 1.0), k_d, Method::Quadrature)
}

/// Single-sided flat-fading SEP: closed form for K ∈ {2, 3, 7}, exact-Q
/// quadrature otherwise.
pub fn sep_ss_flat(k: usize, snr: SnrPoint) -> Result<SepPrediction> {
    predict(k, SegmentMode::Single, 1, snr)
}

/// Double-sided flat-fading SEP: closed form for K ∈ {3, 4, 6}, exact-Q
/// quadrature otherwise. For K = 3 the BER equals the SEP.
pub fn sep_ds_flat(k: usize, snr: SnrPoint) -> Result<SepPrediction> {
    predict(k, SegmentMode::Double, 1, snr)
}

/// SIMO flat-fading SEP with single-sided segments: the two-branch K = 2
/// closed form, Gamma-density quadrature otherwise; one branch is the SISO
/// case.
pub fn sep_simo_flat(n_branches: usize, k: usize, snr: SnrPoint) -> Result<SepPrediction> {
    if n_branches == 0 {
        return Err(invalid("at least one receive branch is required"));
    }
    if n_branches == 1 {
        return sep_ss_flat(k, snr);
    }
    predict(k, SegmentMode::Single, n_branches, snr)
}

/// Coherent BPSK over Rayleigh fading: `½(1 − √(γ̄/(1+γ̄)))`.
pub fn coherent_bpsk_rayleigh(snr: SnrPoint) -> f64 {
    let g = snr.gamma_bar;
    0.5 * (1.0 - (g / (1.0 + g)).sqrt())
}

/// Coherent BPSK with `n`-branch maximal-ratio combining, `γ̄` per branch.
pub fn mrc_bpsk_rayleigh(n_branches: usize, snr: SnrPoint) -> f64 {
    let mu = (snr.gamma_bar / (1.0 + snr.gamma_bar)).sqrt();
    let p = 0.5 * (1.0 - mu);
    let q = 0.5 * (1.0 + mu);
    let mut sum = 0.0;
    let mut binom = 1.0;
    for k in 0..n_branches {
        if k > 0 {
            binom *= (n_branches - 1 + k) as f64 / k as f64;
        }
        sum += binom * q.powi(k as i32);
    }
    p.powi(n_branches as i32) * sum
}

/// DBPSK over Rayleigh fading: `1 / (2(1 + γ̄))`.
pub fn dbpsk_rayleigh(snr: SnrPoint) -> f64 {
    1.0 / (2.0 * (1.0 + snr.gamma_bar))
}

/// DBPSK with two-branch post-detection combining: `(2 + μ) / (4(1+γ̄)²)`,
/// `μ = γ̄/(1+γ̄)`.
pub fn dbpsk_two_branch(snr: SnrPoint) -> f64 {
    let g = snr.gamma_bar;
    let mu = g / (1.0 + g);
    (2.0 + mu) / (4.0 * (1.0 + g) * (1.0 + g))
}
