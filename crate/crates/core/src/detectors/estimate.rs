use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::frame::{Grid, ResourceBlockLayout};
use crate::numerics::Complex;

/// How the channel estimate was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Interpolation {
    Perfect,
    LsLinear,
    LsSpline,
}

/// Per-subcarrier channel estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct CsiEstimate {
    pub h_hat: Vec<Complex>,
    pub method: Interpolation,
}

/// Least-squares estimates `r_p / d_p` at the pilots, interpolated over all
/// `n` positions. Outside the pilot span the nearest interval's line (or
/// cubic) is extended; a single pilot yields a constant estimate.
pub fn ls_estimate_interpolate(r: &[Complex], pilots: &[(usize, Complex)], kind: Interpolation) -> Result<CsiEstimate> {
    if pilots.is_empty() {
        return Err(invalid("channel estimation needs at least one pilot"));
    }
    if pilots.windows(2).any(|w| w[0].0 >= w[1].0) {
        return Err(invalid("pilot positions must be strictly increasing"));
    }
    if let Some(&(p, _)) = pilots.iter().find(|(p, _)| *p >= r.len()) {
        return Err(Error::LengthMismatch { expected: r.len(), actual: p + 1 });
    }
    let xs: Vec<f64> = pilots.iter().map(|&(p, _)| p as f64).collect();
    let ys: Vec<Complex> = pilots.iter().map(|&(p, d)| r[p] / d).collect();
    let h_hat = match kind {
        Interpolation::Perfect => return Err(invalid("perfect CSI is not an estimator")),
        Interpolation::LsLinear => (0..r.len()).map(|v| linear_at(&xs, &ys, v as f64)).collect(),
        Interpolation::LsSpline => {
            let spline = NaturalSpline::new(&xs, &ys);
            (0..r.len()).map(|v| spline.at(v as f64)).collect()
        }
    };
    Ok(CsiEstimate { h_hat, method: kind })
}

fn interval(xs: &[f64], x: f64) -> usize {
    // Index i of the interval [xs[i], xs[i+1]] used at x, clamped to the ends.
    match xs.partition_point(|&p| p <= x) {
        0 => 0,
        i => (i - 1).min(xs.len() - 2),
    }
}

fn linear_at(xs: &[f64], ys: &[Complex], x: f64) -> Complex {
    if xs.len() == 1 {
        return ys[0];
    }
    let i = interval(xs, x);
    let t = (x - xs[i]) / (xs[i + 1] - xs[i]);
    ys[i] + (ys[i + 1] - ys[i]) * t
}

/// Natural cubic spline through complex samples (real and imaginary parts
/// interpolated independently).
struct NaturalSpline<'a> {
    xs: &'a [f64],
    ys: &'a [Complex],
    m: Vec<Complex>,
}

impl<'a> NaturalSpline<'a> {
    fn new(xs: &'a [f64], ys: &'a [Complex]) -> Self {
        let n = xs.len();
        let mut m = vec![Complex::new(0.0, 0.0); n];
        if n >= 3 {
            // Thomas algorithm on the interior second derivatives.
            let k = n - 2;
            let mut diag = vec![0.0; k];
            let mut upper = vec![0.0; k];
            let mut rhs = vec![Complex::new(0.0, 0.0); k];
            for i in 1..n - 1 {
                let h0 = xs[i] - xs[i - 1];
                let h1 = xs[i + 1] - xs[i];
                diag[i - 1] = 2.0 * (h0 + h1);
                upper[i - 1] = h1;
                rhs[i - 1] = 6.0 * ((ys[i + 1] - ys[i]) / h1 - (ys[i] - ys[i - 1]) / h0);
            }
            for i in 1..k {
                let l = xs[i + 1] - xs[i];
                let w = l / diag[i - 1];
                diag[i] -= w * upper[i - 1];
                let prev = rhs[i - 1];
                rhs[i] -= prev * w;
            }
            let mut sol = vec![Complex::new(0.0, 0.0); k];
            sol[k - 1] = rhs[k - 1] / diag[k - 1];
            for i in (0..k - 1).rev() {
                sol[i] = (rhs[i] - sol[i + 1] * upper[i]) / diag[i];
            }
            m[1..n - 1].copy_from_slice(&sol);
        }
        Self { xs, ys, m }
    }

    fn at(&self, x: f64) -> Complex {
        let (xs, ys, m) = (self.xs, self.ys, &self.m);
        if xs.len() == 1 {
            return ys[0];
        }
        let i = interval(xs, x);
        let h = xs[i + 1] - xs[i];
        let a = (xs[i + 1] - x) / h;
        let b = (x - xs[i]) / h;
        ys[i] * a + ys[i + 1] * b + (m[i] * (a * a * a - a) + m[i + 1] * (b * b * b - b)) * (h * h / 6.0)
    }
}

/// Cascaded estimate over a resource block: pilot rows are interpolated
/// along time first, then every column along frequency from the pilot rows.
pub fn rb_ls_estimate(rx: &Grid, layout: &ResourceBlockLayout, kind: Interpolation) -> Result<Grid> {
    layout.validate()?;
    let rows = layout.pilot_rows();
    let mut est = Grid::zeros(rx.rows, rx.cols);
    let mut row_est = Vec::with_capacity(rows.len());
    for &row in &rows {
        let mut pilots: Vec<(usize, Complex)> =
            layout.pilot_cells.iter().filter(|&&(r, _)| r == row).map(|&(_, c)| (c, layout.pilot())).collect();
        pilots.sort_by_key(|p| p.0);
        row_est.push(ls_estimate_interpolate(&rx.row(row), &pilots, kind)?.h_hat);
    }
    for col in 0..rx.cols {
        // Treat the row estimates as pseudo-pilots with unit symbols.
        let mut line = vec![Complex::new(0.0, 0.0); rx.rows];
        let pilots: Vec<(usize, Complex)> = rows
            .iter()
            .zip(&row_est)
            .map(|(&r, h)| {
                line[r] = h[col];
                (r, Complex::new(1.0, 0.0))
            })
            .collect();
        let h = ls_estimate_interpolate(&line, &pilots, kind)?.h_hat;
        for (r, hv) in h.into_iter().enumerate() {
            est.set(r, col, hv);
        }
    }
    Ok(est)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pilots_at(pos: &[usize], value: Complex) -> Vec<(usize, Complex)> {
        pos.iter().map(|&p| (p, value)).collect()
    }

    #[test]
    fn constant_channel_two_pilots() {
        let h = Complex::new(0.3, -0.8);
        let p = Complex::new(-1.0, 0.0);
        let r: Vec<Complex> = (0..10).map(|v| if v == 2 || v == 6 { h * p } else { Complex::new(9.0, 9.0) }).collect();
        for kind in [Interpolation::LsLinear, Interpolation::LsSpline] {
            let est = ls_estimate_interpolate(&r, &pilots_at(&[2, 6], p), kind).unwrap();
            for hv in &est.h_hat {
                assert!((hv - h).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn affine_channel_exact() {
        let a = Complex::new(0.5, 0.1);
        let b = Complex::new(-0.02, 0.03);
        let r: Vec<Complex> = (0..32).map(|v| a + b * v as f64).collect();
        let pilots = pilots_at(&[0, 7, 13, 31], Complex::new(1.0, 0.0));
        for kind in [Interpolation::LsLinear, Interpolation::LsSpline] {
            let est = ls_estimate_interpolate(&r, &pilots, kind).unwrap();
            for (v, hv) in est.h_hat.iter().enumerate() {
                assert!((hv - r[v]).norm() < 1e-12, "{kind:?} v={v}");
            }
        }
    }

    #[test]
    fn spline_reproduces_cubic_interior_shape() {
        // Oracle: the natural spline second derivatives satisfy the
        // continuity equations; check C1 continuity numerically at knots.
        let xs = [0usize, 3, 8, 12, 20];
        let ys = [1.0, -0.5, 2.0, 0.3, 1.1];
        let mut r = vec![Complex::new(0.0, 0.0); 21];
        for (&x, &y) in xs.iter().zip(&ys) {
            r[x] = Complex::new(y, -y);
        }
        let pilots = pilots_at(&xs, Complex::new(1.0, 0.0));
        let xf: Vec<f64> = xs.iter().map(|&x| x as f64).collect();
        let yc: Vec<Complex> = pilots.iter().map(|&(p, _)| r[p]).collect();
        let s = NaturalSpline::new(&xf, &yc);
        let eps = 1e-6;
        for &k in &xf[1..4] {
            let left = (s.at(k) - s.at(k - eps)) / eps;
            let right = (s.at(k + eps) - s.at(k)) / eps;
            assert!((left - right).norm() < 1e-4);
            assert!((s.at(k) - yc[xf.iter().position(|&x| x == k).unwrap()]).norm() < 1e-12);
        }
        // Natural end condition: zero curvature at the first knot.
        let c2 = (s.at(2.0 * eps) - 2.0 * s.at(eps) + s.at(0.0)) / (eps * eps);
        assert!(c2.norm() < 1e-2);
        let est = ls_estimate_interpolate(&r, &pilots, Interpolation::LsSpline).unwrap();
        assert!((est.h_hat[5] - s.at(5.0)).norm() < 1e-15);
    }

    #[test]
    fn rejects_missing_pilots() {
        let r = vec![Complex::new(1.0, 0.0); 4];
        assert!(ls_estimate_interpolate(&r, &[], Interpolation::LsLinear).is_err());
        let one = ls_estimate_interpolate(&r, &[(1, Complex::new(2.0, 0.0))], Interpolation::LsSpline).unwrap();
        assert!(one.h_hat.iter().all(|h| (h - Complex::new(0.5, 0.0)).norm() < 1e-15));
    }

    #[test]
    fn rb_estimate_of_static_channel() {
        let layout = ResourceBlockLayout::default();
        let h = Complex::new(-0.6, 0.4);
        let mut rx = Grid::zeros(12, 14);
        for r in 0..12 {
            for c in 0..14 {
                rx.set(r, c, if layout.is_pilot(r, c) { h * layout.pilot() } else { Complex::new(5.0, 5.0) });
            }
        }
        for kind in [Interpolation::LsLinear, Interpolation::LsSpline] {
            let est = rb_ls_estimate(&rx, &layout, kind).unwrap();
            for r in 0..12 {
                for c in 0..14 {
                    assert!((est.get(r, c) - h).norm() < 1e-12);
                }
            }
        }
    }
}
