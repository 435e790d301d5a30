//! Operation counts of the conventional pilot-aided receiver and of the
//! D³ Viterbi detector, relative computational power, and instrumented
//! counting implementations that measure the counts on real data.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::numerics::Complex;

/// Real additions, multiplications and divisions.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct OpCounts {
    pub r_a: u64,
    pub r_m: u64,
    pub r_d: u64,
}

impl std::ops::Add for OpCounts {
    type Output = OpCounts;
    fn add(self, o: OpCounts) -> OpCounts {
        OpCounts { r_a: self.r_a + o.r_a, r_m: self.r_m + o.r_m, r_d: self.r_d + o.r_d }
    }
}

impl std::iter::Sum for OpCounts {
    fn sum<I: Iterator<Item = OpCounts>>(iter: I) -> OpCounts {
        iter.fold(OpCounts::default(), |a, b| a + b)
    }
}

fn counts(r_a: i128, r_m: i128, r_d: i128) -> Result<OpCounts> {
    let conv = |x: i128, what: &str| {
        u64::try_from(x).map_err(|_| invalid(format!("{what} count {x} is negative or too large")))
    };
    Ok(OpCounts { r_a: conv(r_a, "addition")?, r_m: conv(r_m, "multiplication")?, r_d: conv(r_d, "division")? })
}

/// Signal-set class for the complexity formulas.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Modulus {
    /// Constant modulus (PSK).
    Cm,
    Qam,
}

impl std::str::FromStr for Modulus {
    type Err = crate::Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "cm" => Ok(Modulus::Cm),
            "qam" => Ok(Modulus::Qam),
            other => Err(invalid(format!("unknown modulus '{other}' (cm or qam)"))),
        }
    }
}

fn check_sizes(n: u64, n_p: u64, m: u64) -> Result<()> {
    if n_p >= n {
        return Err(invalid(format!("need N > N_P, got N = {n}, N_P = {n_p}")));
    }
    if m < 1 {
        return Err(invalid("M must be positive"));
    }
    Ok(())
}

/// Conventional receiver totals: LS at pilots, linear interpolation,
/// zero-forcing and minimum-distance slicing.
pub fn conventional_ops(n: u64, n_p: u64, m: u64, modulus: Modulus) -> Result<OpCounts> {
    check_sizes(n, n_p, m)?;
    let (n, p, m) = (n as i128, n_p as i128, m as i128);
    match modulus {
        Modulus::Cm => counts((13 + m) * n - (10 + m) * p, 2 * n * (6 + m) - 2 * p * (4 + m), n - p),
        Modulus::Qam => counts(6 * p + (13 + 2 * m) * (n - p), 8 * p + (12 + 4 * m) * (n - p), p + 2 * m * (n - p)),
    }
}

/// Per-step CM counts of the conventional receiver (estimation,
/// interpolation, equalization, detection) with one complex multiplication
/// costing 4 multiplications and 3 additions.
pub fn conventional_step_ops(n: u64, n_p: u64, m: u64) -> Result<[OpCounts; 4]> {
    check_sizes(n, n_p, m)?;
    let d = n - n_p;
    Ok([
        OpCounts { r_a: 3 * n_p, r_m: 4 * n_p, r_d: 0 },
        OpCounts { r_a: 7 * d, r_m: 4 * d, r_d: 0 },
        OpCounts { r_a: 6 * d, r_m: 8 * d, r_d: d },
        OpCounts { r_a: m * d, r_m: 2 * m * d, r_d: 0 },
    ])
}

/// D³ Viterbi totals.
pub fn d3_ops(n: u64, n_p: u64, m: u64, modulus: Modulus) -> Result<OpCounts> {
    check_sizes(n, n_p, m)?;
    if n <= 2 * n_p || n_p == 0 {
        return Err(invalid(format!("D³ counts need N > 2 N_P > 0, got N = {n}, N_P = {n_p}")));
    }
    let (n, p, m) = (n as i128, n_p as i128, m as i128);
    match modulus {
        Modulus::Cm => {
            let full = n - 2 * p - 1;
            let pow = 1i128 << m;
            counts(full * 5 * pow + 7 * m * (p - 1), full * (4 + 2 * pow) + 2 * (p - 1) * (4 + 2 * m), 0)
        }
        Modulus::Qam => counts(5 * m * p + 10 * m * (n - p), 4 * m * p + 8 * m * (n - p), 2 * m * p + 4 * m * (n - p)),
    }
}

/// The CM D³ count split into branch-metric and path-metric parts, as
/// itemized before the totals.
pub fn d3_cm_parts(n: u64, n_p: u64, m: u64) -> Result<(OpCounts, OpCounts)> {
    d3_ops(n, n_p, m, Modulus::Cm)?;
    let (n, p, m) = (n as i128, n_p as i128, m as i128);
    let full = n - 2 * p - 1;
    let pow = 1i128 << m;
    let bm = counts(3 * pow * full + 6 * m * (p - 1), (4 + 2 * pow) * full + 2 * (p - 1) * (4 + 2 * m), 0)?;
    let pm = counts(full + m * (p - 1), 0, 0)?;
    Ok((bm, pm))
}

/// Decision type of the channel decoder.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Decision {
    Soft,
    Hard,
}

/// Rate-1/2 Viterbi decoding per OFDM symbol of `n` coded bits: soft
/// `R_A = R_M = N 2^K`; hard `R_A ≈ N (2^K + 2^{K−2})` with XORs weighted
/// as one eighth of an addition.
pub fn coded_va_ops(n: u64, constraint_k: u32, decision: Decision) -> Result<OpCounts> {
    if !(3..=9).contains(&constraint_k) {
        return Err(invalid(format!("constraint length {constraint_k} outside [3, 9]")));
    }
    let pow = 1u64 << constraint_k;
    Ok(match decision {
        Decision::Soft => OpCounts { r_a: n * pow, r_m: n * pow, r_d: 0 },
        Decision::Hard => OpCounts { r_a: n * (pow + pow / 4), r_m: 0, r_d: 0 },
    })
}

/// Relative energy per operation type.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PowerWeights {
    pub w_add: f64,
    pub w_mul: f64,
    pub w_div: f64,
}

impl Default for PowerWeights {
    /// Project defaults: one addition, three for a multiplication, 24 for a
    /// division.
    fn default() -> Self {
        Self { w_add: 1.0, w_mul: 3.0, w_div: 24.0 }
    }
}

impl PowerWeights {
    pub fn validate(&self) -> Result<()> {
        if [self.w_add, self.w_mul, self.w_div].iter().any(|w| !(*w > 0.0) || !w.is_finite()) {
            return Err(invalid("power weights must be positive and finite"));
        }
        Ok(())
    }

    pub fn weighted(&self, c: &OpCounts) -> f64 {
        self.w_add * c.r_a as f64 + self.w_mul * c.r_m as f64 + self.w_div * c.r_d as f64
    }
}

/// `η_P = weighted(a) / weighted(b)`.
pub fn relative_power(a: &OpCounts, b: &OpCounts, w: &PowerWeights) -> Result<f64> {
    w.validate()?;
    let den = w.weighted(b);
    if den <= 0.0 {
        return Err(invalid("relative power needs a non-zero reference"));
    }
    Ok(w.weighted(a) / den)
}

/// One row of a complexity comparison table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ComplexityRow {
    pub n: u64,
    pub n_p: u64,
    pub m: u64,
    pub eta_ra: f64,
    pub eta_rm: f64,
    /// Conventional division count for CM, division ratio for QAM.
    pub r_d_or_eta_rd: f64,
    pub eta_p: f64,
}

pub fn complexity_row(n: u64, n_p: u64, m: u64, modulus: Modulus, w: &PowerWeights) -> Result<ComplexityRow> {
    let conv = conventional_ops(n, n_p, m, modulus)?;
    let d3 = d3_ops(n, n_p, m, modulus)?;
    let ratio = |a: u64, b: u64| if b == 0 { f64::NAN } else { a as f64 / b as f64 };
    Ok(ComplexityRow {
        n,
        n_p,
        m,
        eta_ra: ratio(d3.r_a, conv.r_a),
        eta_rm: ratio(d3.r_m, conv.r_m),
        r_d_or_eta_rd: match modulus {
            Modulus::Cm => conv.r_d as f64,
            Modulus::Qam => ratio(d3.r_d, conv.r_d),
        },
        eta_p: relative_power(&d3, &conv, w)?,
    })
}

/// Relative power of coded BPSK reception, `(D³ + VA) / (conventional + VA)`.
/// Soft decoding charges D³ with the `N − N_P` divisions needed for the
/// reliability values.
pub fn coded_relative_power(
    n: u64,
    n_p: u64,
    m: u64,
    constraint_k: u32,
    decision: Decision,
    w: &PowerWeights,
) -> Result<f64> {
    let va = coded_va_ops(n, constraint_k, decision)?;
    let mut d3 = d3_ops(n, n_p, m, Modulus::Cm)? + va;
    if decision == Decision::Soft {
        d3.r_d += n - n_p;
    }
    let conv = conventional_ops(n, n_p, m, Modulus::Cm)? + va;
    relative_power(&d3, &conv, w)
}

/// Computed ratios next to published reference values
/// `[η_RA, η_RM, R_D or η_RD, η_P]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TableEntry {
    pub computed: ComplexityRow,
    pub reference: [f64; 4],
}

const TABLE_BPSK_N: [u64; 5] = [128, 256, 512, 1024, 2048];
const TABLE_BPSK_REF: [[f64; 4]; 5] = [
    [0.58, 0.77, 96.0, 0.20],
    [1.07, 0.72, 192.0, 0.21],
    [1.21, 0.68, 384.0, 0.22],
    [1.27, 0.64, 768.0, 0.26],
    [1.31, 0.61, 1536.0, 0.31],
];
const TABLE_QAM: [(u64, u64, [f64; 4]); 4] = [
    (16, 512, [1.25, 0.52, 0.98, 0.94]),
    (16, 2048, [1.25, 0.47, 0.98, 0.84]),
    (64, 512, [1.64, 0.64, 0.99, 0.91]),
    (64, 2048, [1.64, 0.62, 0.99, 0.80]),
];
/// Coded reference `(K, soft, hard)` at N = 2048.
pub const TABLE_CODED_REF: [(u32, f64, f64); 5] =
    [(3, 0.96, 0.24), (4, 0.97, 0.26), (5, 0.97, 0.28), (6, 0.98, 0.33), (7, 0.99, 0.41)];

/// BPSK comparison over N = 128 … 2048 with `N_P = N/4`; `m` is the value
/// substituted for M in the CM formulas.
pub fn table_bpsk(m: u64, w: &PowerWeights) -> Result<Vec<TableEntry>> {
    TABLE_BPSK_N
        .iter()
        .zip(TABLE_BPSK_REF)
        .map(|(&n, reference)| Ok(TableEntry { computed: complexity_row(n, n / 4, m, Modulus::Cm, w)?, reference }))
        .collect()
}

/// 16- and 64-QAM comparison at N ∈ {512, 2048} with `N_P = N/4`.
pub fn table_qam(w: &PowerWeights) -> Result<Vec<TableEntry>> {
    TABLE_QAM
        .iter()
        .map(|&(m, n, reference)| Ok(TableEntry { computed: complexity_row(n, n / 4, m, Modulus::Qam, w)?, reference }))
        .collect()
}

/// `(K, soft, hard, soft reference, hard reference)`.
pub type CodedRow = (u32, f64, f64, f64, f64);

/// Coded BPSK relative power at N = 2048, `N_P = N/4`, K = 3 … 7.
pub fn table_coded(m: u64, w: &PowerWeights) -> Result<Vec<CodedRow>> {
    TABLE_CODED_REF
        .iter()
        .map(|&(k, rs, rh)| {
            Ok((
                k,
                coded_relative_power(2048, 512, m, k, Decision::Soft, w)?,
                coded_relative_power(2048, 512, m, k, Decision::Hard, w)?,
                rs,
                rh,
            ))
        })
        .collect()
}

/// Arithmetic that tallies the primitive operations it performs.
#[derive(Debug, Default, Clone)]
pub struct Counter {
    pub ops: OpCounts,
}

impl Counter {
    pub fn add(&mut self, a: f64, b: f64) -> f64 {
        self.ops.r_a += 1;
        a + b
    }

    pub fn sub(&mut self, a: f64, b: f64) -> f64 {
        self.ops.r_a += 1;
        a - b
    }

    pub fn mul(&mut self, a: f64, b: f64) -> f64 {
        self.ops.r_m += 1;
        a * b
    }

    pub fn div(&mut self, a: f64, b: f64) -> f64 {
        self.ops.r_d += 1;
        a / b
    }

    /// Complex product charged as 4 multiplications and 3 additions.
    pub fn c_mul(&mut self, a: Complex, b: Complex) -> Complex {
        self.ops.r_m += 4;
        self.ops.r_a += 3;
        a * b
    }

    pub fn c_add(&mut self, a: Complex, b: Complex) -> Complex {
        self.ops.r_a += 2;
        a + b
    }

    /// `a / b = a b^* / |b|²`: two complex products and one real division.
    pub fn c_div(&mut self, a: Complex, b: Complex) -> Complex {
        let num = self.c_mul(a, b.conj());
        let den = self.c_mul(b, b.conj()).re;
        self.ops.r_d += 1;
        num / den
    }
}

/// Counting run of the conventional CM receiver on one symbol: pilot LS
/// estimates, linear interpolation (one complex multiply and two complex
/// adds per data cell), zero-forcing, and correlation slicing against the
/// `points`. Returns the decided point indices at the data cells.
pub fn instrumented_conventional(
    r: &[Complex],
    pilot_mask: &[bool],
    pilot: Complex,
    points: &[Complex],
    counter: &mut Counter,
) -> Result<Vec<usize>> {
    let n = r.len();
    let pilots: Vec<usize> = (0..n).filter(|&v| pilot_mask[v]).collect();
    if pilots.len() < 2 || pilots[0] != 0 || *pilots.last().unwrap() != n - 1 {
        return Err(invalid("instrumented receiver needs pilots on both band edges"));
    }
    let mut h = vec![Complex::new(0.0, 0.0); n];
    for &p in &pilots {
        h[p] = counter.c_mul(r[p], pilot.conj());
    }
    for w in pilots.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b - a < 2 {
            continue;
        }
        // Ĥ_v = Ĥ_a + (v − a)·s with the slope s = (Ĥ_b − Ĥ_a)/(b − a) held
        // as a precomputed complex coefficient per data cell.
        for v in a + 1..b {
            let t = (v - a) as f64 / (b - a) as f64;
            let diff = counter.c_add(h[b], -h[a]);
            let step = counter.c_mul(diff, Complex::new(t, 0.0));
            h[v] = counter.c_add(h[a], step);
        }
    }
    let mut out = Vec::new();
    for v in 0..n {
        if pilot_mask[v] {
            continue;
        }
        let eq = counter.c_div(r[v], h[v]);
        let mut best = 0;
        let mut best_score = f64::NEG_INFINITY;
        for (i, d) in points.iter().enumerate() {
            let a = counter.mul(eq.re, d.re);
            let b = counter.mul(eq.im, d.im);
            let s = counter.add(a, b);
            if s > best_score {
                best_score = s;
                best = i;
            }
        }
        out.push(best);
    }
    Ok(out)
}

/// Counting run of the division-free CM D³ Viterbi detector on one symbol.
///
/// Per trellis step the products `A = Re{r_c r_ć^*}` and `B = Im{r_c r_ć^*}`
/// are formed once (4 multiplications, 2 additions); each branch then costs
/// `A Re{u} + B Im{u}` with the precomputed `u = d_m^* d_n` (2
/// multiplications, 1 addition) plus one path-metric addition. Steps
/// between two pinned cells carry no decision and are skipped.
pub fn instrumented_d3_cm(
    r: &[Complex],
    anchors: &[Option<Complex>],
    points: &[Complex],
    counter: &mut Counter,
) -> Result<Vec<usize>> {
    let n = r.len();
    if anchors.iter().all(|a| a.is_none()) {
        return Err(crate::Error::Unanchored);
    }
    let cand: Vec<Vec<Complex>> = anchors.iter().map(|a| a.map_or_else(|| points.to_vec(), |p| vec![p])).collect();
    let mut pm: Vec<f64> = vec![0.0; cand[0].len()];
    let mut back: Vec<Vec<usize>> = vec![vec![0; cand[0].len()]];
    for c in 0..n - 1 {
        let next = &cand[c + 1];
        if cand[c].len() == 1 && next.len() == 1 {
            pm = vec![pm[0]];
            back.push(vec![0]);
            continue;
        }
        let a_re = counter.mul(r[c].re, r[c + 1].re);
        let a_im = counter.mul(r[c].im, r[c + 1].im);
        let a = counter.add(a_re, a_im);
        let b_1 = counter.mul(r[c].im, r[c + 1].re);
        let b_2 = counter.mul(r[c].re, r[c + 1].im);
        let b = counter.sub(b_1, b_2);
        let mut new_pm = vec![f64::NEG_INFINITY; next.len()];
        let mut surv = vec![0usize; next.len()];
        for (j, dn) in next.iter().enumerate() {
            for (i, dm) in cand[c].iter().enumerate() {
                // Maximize Re{r_c r_ć^* / (d_m d_n^*)} = Re{r_c r_ć^* d_m^* d_n}.
                let u = dm.conj() * dn;
                let t1 = counter.mul(a, u.re);
                let t2 = counter.mul(b, u.im);
                let j_mn = counter.sub(t1, t2);
                let m = counter.add(pm[i], j_mn);
                if m > new_pm[j] {
                    new_pm[j] = m;
                    surv[j] = i;
                }
            }
        }
        pm = new_pm;
        back.push(surv);
    }
    let mut s = 0;
    for (i, &m) in pm.iter().enumerate() {
        if m > pm[s] {
            s = i;
        }
    }
    let mut sel = vec![0usize; n];
    for v in (0..n).rev() {
        sel[v] = s;
        s = back[v][s];
    }
    Ok((0..n).filter(|&v| anchors[v].is_none()).map(|v| sel[v]).collect())
}

/// Evenly spread pilot mask with pilots on both band edges.
pub fn edge_pilot_mask(n: usize, n_p: usize) -> Result<Vec<bool>> {
    if n_p < 2 || n_p > n {
        return Err(invalid(format!("need 2 <= N_P <= N, got N_P = {n_p}")));
    }
    let mut mask = vec![false; n];
    for i in 0..n_p {
        let pos = ((i as f64) * (n - 1) as f64 / (n_p - 1) as f64).round() as usize;
        mask[pos] = true;
    }
    Ok(mask)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::detectors::d3_viterbi;
    use crate::frame::{Constellation, Modulation};
    use crate::numerics::{sample_complex_gaussian, RngStream};
    use rand::Rng;

    #[test]
    fn table_division_anchors() {
        assert_eq!(conventional_ops(128, 32, 2, Modulus::Cm).unwrap().r_d, 96);
        assert_eq!(conventional_ops(2048, 512, 2, Modulus::Cm).unwrap().r_d, 1536);
        for (n, p) in [(128, 32), (512, 128), (2048, 512)] {
            for m in [1, 2, 4] {
                assert_eq!(d3_ops(n, p, m, Modulus::Cm).unwrap().r_d, 0);
            }
        }
        assert_eq!(d3_ops(512, 128, 16, Modulus::Qam).unwrap().r_d, 2 * 16 * 128 + 4 * 16 * 384);
        assert_eq!(d3_ops(512, 128, 16, Modulus::Qam).unwrap().r_d, 28672);
    }

    #[test]
    fn steps_sum_to_totals() {
        let mut rng = RngStream::new(12, 0).rng();
        for _ in 0..5 {
            let n = rng.random_range(16..5000u64);
            let p = rng.random_range(1..n);
            let m = rng.random_range(2..64u64);
            let total: OpCounts = conventional_step_ops(n, p, m).unwrap().into_iter().sum();
            assert_eq!(total, conventional_ops(n, p, m, Modulus::Cm).unwrap());
        }
    }

    #[test]
    fn coded_formulas() {
        let s = coded_va_ops(2048, 7, Decision::Soft).unwrap();
        assert_eq!((s.r_a, s.r_m), (262_144, 262_144));
        assert_eq!(coded_va_ops(2048, 3, Decision::Hard).unwrap().r_a, 20_480);
        assert!(coded_va_ops(2048, 2, Decision::Hard).is_err());
        // hard/soft addition ratio is constant in K.
        for k in 3..=9 {
            let h = coded_va_ops(2048, k, Decision::Hard).unwrap().r_a as f64;
            let s = coded_va_ops(2048, k, Decision::Soft).unwrap().r_a as f64;
            assert!((h / s - 1.25).abs() < 1e-12);
        }
        // The decoder share grows with K, so the coded D³ advantage shrinks.
        let w = PowerWeights::default();
        for decision in [Decision::Soft, Decision::Hard] {
            let mut prev = 0.0;
            for k in 3..=7 {
                let eta = coded_relative_power(2048, 512, 2, k, decision, &w).unwrap();
                assert!(eta > prev);
                prev = eta;
            }
        }
    }

    #[test]
    fn relative_power_properties() {
        let w = PowerWeights::default();
        let a = OpCounts { r_a: 10, r_m: 7, r_d: 2 };
        let b = OpCounts { r_a: 3, r_m: 1, r_d: 9 };
        assert_eq!(relative_power(&a, &a, &w).unwrap(), 1.0);
        let w2 = PowerWeights { w_add: 2.0, w_mul: 6.0, w_div: 48.0 };
        assert!((relative_power(&a, &b, &w).unwrap() - relative_power(&a, &b, &w2).unwrap()).abs() < 1e-15);
        assert!(relative_power(&a, &OpCounts::default(), &w).is_err());
        assert!(relative_power(&a, &b, &PowerWeights { w_add: 0.0, ..w }).is_err());
    }

    #[test]
    fn counts_are_affine_in_n() {
        for modulus in [Modulus::Cm, Modulus::Qam] {
            type F = fn(u64, u64, u64, Modulus) -> Result<OpCounts>;
            for op in [d3_ops as F, conventional_ops as F] {
                let h = |n: u64| op(n, n / 4, 2, modulus).unwrap();
                let (a, b, c) = (h(256), h(512), h(768));
                assert_eq!(b.r_a * 2, a.r_a + c.r_a);
                assert_eq!(b.r_m * 2, a.r_m + c.r_m);
                assert_eq!(b.r_d * 2, a.r_d + c.r_d);
            }
        }
    }

    #[test]
    fn instrumented_conventional_matches_formula() {
        let c = Constellation::new(Modulation::Bpsk);
        for (n, p) in [(128usize, 32usize), (512, 128), (2048, 512)] {
            let mask = edge_pilot_mask(n, p).unwrap();
            let mut rng = RngStream::new(n as u64, 0).rng();
            let r: Vec<Complex> = (0..n).map(|_| sample_complex_gaussian(&mut rng, 1.0).unwrap()).collect();
            let mut counter = Counter::default();
            instrumented_conventional(&r, &mask, Complex::new(1.0, 0.0), &c.points, &mut counter).unwrap();
            assert_eq!(counter.ops, conventional_ops(n as u64, p as u64, 2, Modulus::Cm).unwrap());
        }
    }

    #[test]
    fn instrumented_d3_decides_like_viterbi() {
        for m in [Modulation::Bpsk, Modulation::Qpsk] {
            let c = Constellation::new(m);
            let mask = edge_pilot_mask(64, 9).unwrap();
            let anchors: Vec<Option<Complex>> = mask.iter().map(|&p| p.then_some(Complex::new(1.0, 0.0))).collect();
            let mut rng = RngStream::new(13, 0).rng();
            for _ in 0..50 {
                let r: Vec<Complex> = (0..64).map(|_| sample_complex_gaussian(&mut rng, 1.0).unwrap()).collect();
                let mut counter = Counter::default();
                let got = instrumented_d3_cm(&r, &anchors, &c.points, &mut counter).unwrap();
                assert_eq!(got, d3_viterbi(&r, &anchors, &c).unwrap().indices);
                assert_eq!(counter.ops.r_d, 0);
            }
        }
    }
}
