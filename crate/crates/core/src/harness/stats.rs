use serde::Serialize;

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

/// Wilson score interval for `k` successes in `n` trials.
pub fn wilson_interval(k: u64, n: u64, z: f64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let n_f = n as f64;
    let p = k as f64 / n_f;
    let z2 = z * z;
    let den = 1.0 + z2 / n_f;
    let centre = (p + z2 / (2.0 * n_f)) / den;
    let half = z * (p * (1.0 - p) / n_f + z2 / (4.0 * n_f * n_f)).sqrt() / den;
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

/// Error tallies of one detector.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Tally {
    pub bits: u64,
    pub bit_errors: u64,
    pub seqs: u64,
    pub seq_errors: u64,
}

impl Tally {
    pub fn merge(&mut self, o: &Tally) {
        self.bits += o.bits;
        self.bit_errors += o.bit_errors;
        self.seqs += o.seqs;
        self.seq_errors += o.seq_errors;
    }
}

/// Error statistics of one detector at one SNR.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BerRecord {
    pub detector: String,
    pub snr_db: f64,
    pub bits: u64,
    pub bit_errors: u64,
    pub ber: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub seq_errors: u64,
    pub seqs: u64,
    pub ser: f64,
    /// Fewer errors than the configured minimum were observed.
    pub unsaturated: bool,
    /// OFDM symbols simulated for this SNR point.
    pub symbols: u64,
}

impl BerRecord {
    pub fn new(detector: &str, snr_db: f64, t: &Tally, min_errors: u64, symbols: u64) -> Self {
        let ratio = |k: u64, n: u64| if n == 0 { 0.0 } else { k as f64 / n as f64 };
        let (ci_low, ci_high) = wilson_interval(t.bit_errors, t.bits, Z95);
        Self {
            detector: detector.to_string(),
            snr_db,
            bits: t.bits,
            bit_errors: t.bit_errors,
            ber: ratio(t.bit_errors, t.bits),
            ci_low,
            ci_high,
            seq_errors: t.seq_errors,
            seqs: t.seqs,
            ser: ratio(t.seq_errors, t.seqs),
            unsaturated: t.bit_errors < min_errors,
            symbols,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wilson_brackets_and_matches_reference() {
        // Reference: 10 successes in 100 at 95% gives (0.05523, 0.17437).
        let (lo, hi) = wilson_interval(10, 100, Z95);
        assert!((lo - 0.055_229).abs() < 1e-5 && (hi - 0.174_366).abs() < 1e-5, "{lo} {hi}");
        for (k, n) in [(0, 10), (3, 7), (1000, 1_000_000), (50, 50)] {
            let (lo, hi) = wilson_interval(k, n, Z95);
            let p = k as f64 / n as f64;
            assert!(lo <= p && p <= hi);
        }
    }

    #[test]
    fn record_flags_low_error_counts() {
        let t = Tally { bits: 20_000, bit_errors: 40, seqs: 10_000, seq_errors: 39 };
        let r = BerRecord::new("d3", 10.0, &t, 100, 40);
        assert!(r.unsaturated);
        assert_eq!(r.ber, 0.002);
        assert!(r.ci_low < r.ber && r.ber < r.ci_high);
    }
}
