use super::{CsiEstimate, DetectionResult};
use crate::error::{Error, Result};
use crate::frame::Constellation;
use crate::numerics::Complex;

/// Symbol-by-symbol ML detection with known gains:
/// `argmin_d |r_v − H_v d|²` on every cell.
pub fn coherent_mld(r: &[Complex], h: &[Complex], c: &Constellation) -> Result<DetectionResult> {
    coherent_mrc(&[r], &[h], c)
}

/// Maximal-ratio combining over receive branches:
/// `argmin_d Σ_b |r_{b,v} − H_{b,v} d|²`.
pub fn coherent_mrc(r: &[&[Complex]], h: &[&[Complex]], c: &Constellation) -> Result<DetectionResult> {
    if r.is_empty() || r.len() != h.len() {
        return Err(Error::LengthMismatch { expected: h.len().max(1), actual: r.len() });
    }
    let n = r[0].len();
    for (rb, hb) in r.iter().zip(h) {
        if rb.len() != n || hb.len() != n {
            return Err(Error::LengthMismatch { expected: n, actual: rb.len().max(hb.len()) });
        }
    }
    let mut indices = Vec::with_capacity(n);
    let mut erasures = 0;
    let mut metric = 0.0;
    for v in 0..n {
        if h.iter().all(|hb| hb[v].norm_sqr() == 0.0) {
            erasures += 1;
        }
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for (i, p) in c.points.iter().enumerate() {
            let d: f64 = r.iter().zip(h).map(|(rb, hb)| (rb[v] - hb[v] * p).norm_sqr()).sum();
            if d < best_d {
                best_d = d;
                best = i;
            }
        }
        metric += best_d;
        indices.push(best);
    }
    Ok(DetectionResult::from_indices(indices, c, metric, erasures))
}

/// Zero-forced samples and the number of bins with a zero estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct Equalized {
    pub samples: Vec<Complex>,
    pub erasures: Vec<bool>,
}

/// Single-tap equalizer `ř_v = r_v / Ĥ_v`; zero estimates are flagged as
/// erasures and their output set to zero.
pub fn zf_equalize(r: &[Complex], est: &CsiEstimate) -> Result<Equalized> {
    if r.len() != est.h_hat.len() {
        return Err(Error::LengthMismatch { expected: est.h_hat.len(), actual: r.len() });
    }
    let mut erasures = vec![false; r.len()];
    let samples = r
        .iter()
        .zip(&est.h_hat)
        .enumerate()
        .map(|(v, (rv, hv))| {
            if hv.norm_sqr() == 0.0 {
                erasures[v] = true;
                Complex::new(0.0, 0.0)
            } else {
                rv / hv
            }
        })
        .collect();
    Ok(Equalized { samples, erasures })
}

/// Nearest-point decisions on the selected positions of an equalized
/// vector; erased bins take index 0.
pub fn slice(eq: &Equalized, positions: &[usize], c: &Constellation) -> DetectionResult {
    let mut erasures = 0;
    let indices = positions
        .iter()
        .map(|&v| {
            if eq.erasures[v] {
                erasures += 1;
                0
            } else {
                c.nearest(eq.samples[v])
            }
        })
        .collect();
    DetectionResult::from_indices(indices, c, 0.0, erasures)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::detectors::Interpolation;
    use crate::frame::Modulation;

    #[test]
    fn noiseless_recovery() {
        let c = Constellation::new(Modulation::Qam16);
        let h: Vec<Complex> = (0..16).map(|i| Complex::from_polar(0.2 + i as f64 * 0.1, i as f64)).collect();
        let r: Vec<Complex> = (0..16).map(|i| h[i] * c.point(i)).collect();
        let out = coherent_mld(&r, &h, &c).unwrap();
        assert_eq!(out.indices, (0..16).collect::<Vec<_>>());
        assert_eq!(out.erasures, 0);
    }

    #[test]
    fn zero_gain_is_flagged() {
        let c = Constellation::new(Modulation::Qpsk);
        let out = coherent_mld(&[Complex::new(1.0, 1.0)], &[Complex::new(0.0, 0.0)], &c).unwrap();
        assert_eq!(out.indices, vec![0]);
        assert_eq!(out.erasures, 1);
    }

    #[test]
    fn zf_scaling_and_erasure() {
        let d = [Complex::new(1.0, 0.0), Complex::new(0.0, -1.0), Complex::new(-1.0, 0.0)];
        let h = vec![Complex::new(0.5, 0.5), Complex::new(2.0, 0.0), Complex::new(0.0, 0.0)];
        let r: Vec<Complex> = d.iter().zip(&h).map(|(a, b)| a * b).collect();
        let est = CsiEstimate { h_hat: h.iter().map(|z| z * 2.0).collect(), method: Interpolation::Perfect };
        let eq = zf_equalize(&r, &est).unwrap();
        assert!((eq.samples[0] - d[0] / 2.0).norm() < 1e-15);
        assert!((eq.samples[1] - d[1] / 2.0).norm() < 1e-15);
        assert_eq!(eq.erasures, vec![false, false, true]);
        let c = Constellation::new(Modulation::Bpsk);
        let out = slice(&eq, &[0, 2], &c);
        assert_eq!(out.erasures, 1);
        assert_eq!(out.indices, vec![0, 0]);
    }
}
