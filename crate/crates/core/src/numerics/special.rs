use std::f64::consts::{FRAC_PI_4, PI};

use crate::error::{invalid, Result};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Gaussian tail probability `Q(x) = 0.5 erfc(x/√2)`.
pub fn q_exact(x: f64) -> f64 {
    0.5 * libm::erfc(x / std::f64::consts::SQRT_2)
}

/// Closed-form approximation `exp(−x²/2) / √(2π(x²+1))`, defined for x ≥ 0.
pub fn q_approx(x: f64) -> Result<f64> {
    if !(x >= 0.0) || !x.is_finite() {
        return Err(invalid(format!("q_approx requires finite x >= 0, got {x}")));
    }
    Ok((-0.5 * x * x).exp() / (2.0 * PI * (x * x + 1.0)).sqrt())
}

/// Exponential integral `E₁(x) = ∫ₓ^∞ e^{−t}/t dt` for x > 0.
pub fn exp_integral_e1(x: f64) -> Result<f64> {
    check_e1(x)?;
    if x <= 1.0 {
        Ok(e1_series(x))
    } else {
        Ok(e1_cf_scaled(x) * (-x).exp())
    }
}

/// `e^x E₁(x)`, which stays finite where `E₁` underflows.
pub fn scaled_exp_integral_e1(x: f64) -> Result<f64> {
    check_e1(x)?;
    if x <= 1.0 {
        Ok(e1_series(x) * x.exp())
    } else {
        Ok(e1_cf_scaled(x))
    }
}

fn check_e1(x: f64) -> Result<()> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(invalid(format!("E1 requires finite x > 0, got {x}")));
    }
    Ok(())
}

// E1(x) = -γ - ln x - Σ_{k≥1} (-x)^k / (k k!)
fn e1_series(x: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 0.0;
    for k in 1..200 {
        term *= -x / k as f64;
        let add = term / k as f64;
        sum += add;
        if add.abs() < 1e-18 * sum.abs().max(1e-300) {
            break;
        }
    }
    -EULER_GAMMA - x.ln() - sum
}

// Modified Lentz evaluation of the continued fraction for e^x E1(x).
fn e1_cf_scaled(x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut b = x + 1.0;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..10_000 {
        let an = -((i * i) as f64);
        b += 2.0;
        d = 1.0 / (an * d + b);
        c = b + an / c;
        let del = c * d;
        h *= del;
        if (del - 1.0).abs() < 1e-16 {
            break;
        }
    }
    h
}

/// Bessel function of the first kind, order zero.
///
/// Power series for |x| ≤ 12 (absolute rounding error about 1e-12), Hankel
/// asymptotic expansion beyond.
pub fn bessel_j0(x: f64) -> f64 {
    let x = x.abs();
    if x <= 12.0 {
        let q = 0.25 * x * x;
        let mut term = 1.0;
        let mut sum = 1.0;
        for k in 1..100 {
            term *= -q / (k * k) as f64;
            sum += term;
            if term.abs() < 1e-17 {
                break;
            }
        }
        sum
    } else {
        // a_k = Π_{j=1..k} (−(2j−1)²) / (k! 8^k); P uses even k, Q odd k.
        let mut a = 1.0;
        let mut p = 1.0;
        let mut q = 0.0;
        let mut xp = 1.0;
        let mut prev = f64::INFINITY;
        for k in 1..60 {
            let odd = (2 * k - 1) as f64;
            a *= -(odd * odd) / (k as f64 * 8.0);
            xp /= x;
            let t = a * xp;
            if t.abs() > prev || t.abs() < 1e-18 {
                break;
            }
            prev = t.abs();
            // (−1)^{⌊k/2⌋} sign pattern of the alternating Hankel series.
            let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
            if k % 2 == 0 {
                p += sign * t;
            } else {
                q += sign * t;
            }
        }
        let chi = x - FRAC_PI_4;
        (2.0 / (PI * x)).sqrt() * (p * chi.cos() - q * chi.sin())
    }
}
