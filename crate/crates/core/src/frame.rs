//! Constellations, pilot layouts, and the OFDM transmit/receive chain.

use serde::{Deserialize, Serialize};

use crate::channel::ChannelRealization;
use crate::error::{invalid, Error, Result};
use crate::numerics::{sample_complex_gaussian, Complex, FftEngine, SimRng};

/// Supported signal sets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Modulation {
    #[serde(rename = "bpsk")]
    Bpsk,
    #[serde(rename = "qpsk")]
    Qpsk,
    #[serde(rename = "16qam")]
    Qam16,
    #[serde(rename = "64qam")]
    Qam64,
}

impl Modulation {
    pub fn name(self) -> &'static str {
        match self {
            Modulation::Bpsk => "bpsk",
            Modulation::Qpsk => "qpsk",
            Modulation::Qam16 => "16qam",
            Modulation::Qam64 => "64qam",
        }
    }
}

/// Gray-mapped, unit-average-power constellation.
///
/// `points[i]` is the symbol carrying the bit pattern `i` (first bit most
/// significant), so the Gray map is the identity on indices.
#[derive(Debug, Clone, PartialEq)]
pub struct Constellation {
    pub modulation: Modulation,
    pub points: Vec<Complex>,
    pub bits_per_symbol: usize,
}

// Gray-coded PAM levels: 2 bits → {-3,-1,+1,+3}, 3 bits → {-7..+7}.
fn gray_pam(bits: usize, value: usize) -> f64 {
    let mut idx = value;
    let mut shift = value >> 1;
    while shift > 0 {
        idx ^= shift;
        shift >>= 1;
    }
    let levels = 1usize << bits;
    (2 * idx) as f64 - (levels - 1) as f64
}

impl Constellation {
    pub fn new(modulation: Modulation) -> Self {
        let (points, bps) = match modulation {
            Modulation::Bpsk => (vec![Complex::new(1.0, 0.0), Complex::new(-1.0, 0.0)], 1),
            Modulation::Qpsk => {
                let s = std::f64::consts::FRAC_1_SQRT_2;
                let pts = (0..4)
                    .map(|i| {
                        let re = if i & 2 == 0 { s } else { -s };
                        let im = if i & 1 == 0 { s } else { -s };
                        Complex::new(re, im)
                    })
                    .collect();
                (pts, 2)
            }
            Modulation::Qam16 | Modulation::Qam64 => {
                let half = if modulation == Modulation::Qam16 { 2 } else { 3 };
                let norm = if half == 2 { 10.0f64 } else { 42.0 }.sqrt();
                let pts = (0..1usize << (2 * half))
                    .map(|i| {
                        let re = gray_pam(half, i >> half);
                        let im = gray_pam(half, i & ((1 << half) - 1));
                        Complex::new(re, im) / norm
                    })
                    .collect();
                (pts, 2 * half)
            }
        };
        Self { modulation, points, bits_per_symbol: bps }
    }

    pub fn size(&self) -> usize {
        self.points.len()
    }

    /// True when every point has the same magnitude (PSK alphabets).
    pub fn is_constant_modulus(&self) -> bool {
        matches!(self.modulation, Modulation::Bpsk | Modulation::Qpsk)
    }

    pub fn point(&self, index: usize) -> Complex {
        self.points[index]
    }

    /// Index of the nearest point; ties go to the lowest index.
    pub fn nearest(&self, z: Complex) -> usize {
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for (i, p) in self.points.iter().enumerate() {
            let d = (z - p).norm_sqr();
            if d < best_d {
                best_d = d;
                best = i;
            }
        }
        best
    }

    /// Maps bits (values 0/1) to symbol indices.
    pub fn bits_to_indices(&self, bits: &[u8]) -> Result<Vec<usize>> {
        let b = self.bits_per_symbol;
        if !bits.len().is_multiple_of(b) {
            return Err(invalid(format!("{} bits is not a multiple of {} bits per symbol", bits.len(), b)));
        }
        Ok(bits.chunks(b).map(|c| c.iter().fold(0usize, |acc, &bit| (acc << 1) | (bit & 1) as usize)).collect())
    }

    pub fn map_bits(&self, bits: &[u8]) -> Result<Vec<Complex>> {
        Ok(self.bits_to_indices(bits)?.into_iter().map(|i| self.points[i]).collect())
    }

    pub fn indices_to_bits(&self, indices: &[usize]) -> Vec<u8> {
        let b = self.bits_per_symbol;
        let mut out = Vec::with_capacity(indices.len() * b);
        for &i in indices {
            for k in (0..b).rev() {
                out.push(((i >> k) & 1) as u8);
            }
        }
        out
    }

    /// Hard decision of arbitrary samples back to bits.
    pub fn demap(&self, symbols: &[Complex]) -> Vec<u8> {
        let idx: Vec<usize> = symbols.iter().map(|&z| self.nearest(z)).collect();
        self.indices_to_bits(&idx)
    }
}

/// Pilot placement of a segment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SegmentMode {
    /// Pilot on the first subcarrier only.
    #[serde(rename = "ss")]
    Single,
    /// Pilots on the first and last subcarriers.
    #[serde(rename = "ds")]
    Double,
}

/// A run of `k` adjacent subcarriers anchored by one or two pilots.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SegmentLayout {
    pub k: usize,
    pub mode: SegmentMode,
    pub pilot_value: Complex,
}

impl SegmentLayout {
    pub fn new(k: usize, mode: SegmentMode, pilot_value: Complex) -> Result<Self> {
        let min = match mode {
            SegmentMode::Single => 2,
            SegmentMode::Double => 3,
        };
        if k < min {
            return Err(invalid(format!("segment length {k} below minimum {min} for {mode:?}")));
        }
        if pilot_value.norm() == 0.0 || !pilot_value.re.is_finite() || !pilot_value.im.is_finite() {
            return Err(invalid("pilot value must be finite and nonzero"));
        }
        Ok(Self { k, mode, pilot_value })
    }

    pub fn single(k: usize) -> Result<Self> {
        Self::new(k, SegmentMode::Single, Complex::new(1.0, 0.0))
    }

    pub fn double(k: usize) -> Result<Self> {
        Self::new(k, SegmentMode::Double, Complex::new(1.0, 0.0))
    }

    pub fn pilot_positions(&self) -> Vec<usize> {
        match self.mode {
            SegmentMode::Single => vec![0],
            SegmentMode::Double => vec![0, self.k - 1],
        }
    }

    pub fn data_count(&self) -> usize {
        match self.mode {
            SegmentMode::Single => self.k - 1,
            SegmentMode::Double => self.k - 2,
        }
    }

    pub fn is_pilot(&self, v: usize) -> bool {
        v == 0 || (self.mode == SegmentMode::Double && v == self.k - 1)
    }

    /// Pinned cells: `Some(pilot)` at pilots, `None` at data cells.
    pub fn anchors(&self) -> Vec<Option<Complex>> {
        (0..self.k).map(|v| self.is_pilot(v).then_some(self.pilot_value)).collect()
    }
}

/// Places `data` into the non-pilot cells of one segment.
pub fn build_segment(data: &[Complex], layout: &SegmentLayout) -> Result<Vec<Complex>> {
    fill_anchors(data, &layout.anchors())
}

fn fill_anchors(data: &[Complex], anchors: &[Option<Complex>]) -> Result<Vec<Complex>> {
    let free = anchors.iter().filter(|a| a.is_none()).count();
    if data.len() != free {
        return Err(Error::LengthMismatch { expected: free, actual: data.len() });
    }
    let mut it = data.iter();
    Ok(anchors.iter().map(|a| a.unwrap_or_else(|| *it.next().expect("counted"))).collect())
}

/// Segmentation of a full OFDM symbol.
///
/// Single-sided: segments of length `k` tile the band from subcarrier 0, the
/// last one possibly shorter. Double-sided: pilots every `k − 1` subcarriers
/// are shared by neighbouring segments and subcarrier `N − 1` always carries
/// a pilot, so the last segment may be shorter.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolPlan {
    pub n: usize,
    pub layout: SegmentLayout,
    /// `(start, len)` of each segment, pilots included.
    pub segments: Vec<(usize, usize)>,
    pub pilot_mask: Vec<bool>,
}

impl SymbolPlan {
    pub fn new(n: usize, layout: SegmentLayout) -> Result<Self> {
        if n < layout.k {
            return Err(invalid(format!("segment length {} exceeds N = {n}", layout.k)));
        }
        let mut segments = Vec::new();
        let mut pilot_mask = vec![false; n];
        match layout.mode {
            SegmentMode::Single => {
                let mut s = 0;
                while s < n {
                    let len = layout.k.min(n - s);
                    segments.push((s, len));
                    pilot_mask[s] = true;
                    s += len;
                }
            }
            SegmentMode::Double => {
                let step = layout.k - 1;
                let mut s = 0;
                pilot_mask[0] = true;
                while s < n - 1 {
                    let end = (s + step).min(n - 1);
                    segments.push((s, end - s + 1));
                    pilot_mask[end] = true;
                    s = end;
                }
            }
        }
        Ok(Self { n, layout, segments, pilot_mask })
    }

    pub fn pilot_count(&self) -> usize {
        self.pilot_mask.iter().filter(|&&p| p).count()
    }

    pub fn data_count(&self) -> usize {
        self.n - self.pilot_count()
    }

    pub fn data_positions(&self) -> Vec<usize> {
        (0..self.n).filter(|&v| !self.pilot_mask[v]).collect()
    }

    pub fn pilot_positions(&self) -> Vec<usize> {
        (0..self.n).filter(|&v| self.pilot_mask[v]).collect()
    }

    pub fn anchors(&self) -> Vec<Option<Complex>> {
        self.pilot_mask.iter().map(|&p| p.then_some(self.layout.pilot_value)).collect()
    }

    /// Full frequency-domain symbol with data in ascending subcarrier order.
    pub fn build(&self, data: &[Complex]) -> Result<Vec<Complex>> {
        fill_anchors(data, &self.anchors())
    }
}

/// LTE-style 12 × 14 resource block; rows are subcarriers, columns are
/// OFDM symbols. Cells are 0-indexed `(row, col)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResourceBlockLayout {
    pub rows: usize,
    pub cols: usize,
    pub pilot_cells: Vec<(usize, usize)>,
    #[serde(default = "unit_pilot")]
    pub pilot_value: (f64, f64),
}

fn unit_pilot() -> (f64, f64) {
    (1.0, 0.0)
}

impl Default for ResourceBlockLayout {
    fn default() -> Self {
        // Two staggered pilots in each of rows {1,5,8,12} within columns
        // {1,4,7,10} (1-indexed).
        let cells = [(1, 1), (1, 7), (5, 4), (5, 10), (8, 1), (8, 7), (12, 4), (12, 10)];
        Self {
            rows: 12,
            cols: 14,
            pilot_cells: cells.iter().map(|&(r, c)| (r - 1, c - 1)).collect(),
            pilot_value: unit_pilot(),
        }
    }
}

impl ResourceBlockLayout {
    pub fn validate(&self) -> Result<()> {
        if self.rows < 2 || self.cols < 2 {
            return Err(invalid("resource block needs at least 2 rows and 2 columns"));
        }
        if self.pilot_cells.is_empty() {
            return Err(invalid("resource block needs at least one pilot"));
        }
        let mut seen = std::collections::HashSet::new();
        for &(r, c) in &self.pilot_cells {
            if r >= self.rows || c >= self.cols {
                return Err(invalid(format!("pilot cell ({r},{c}) outside the block")));
            }
            if !seen.insert((r, c)) {
                return Err(invalid(format!("duplicate pilot cell ({r},{c})")));
            }
        }
        Ok(())
    }

    pub fn pilot(&self) -> Complex {
        Complex::new(self.pilot_value.0, self.pilot_value.1)
    }

    pub fn is_pilot(&self, row: usize, col: usize) -> bool {
        self.pilot_cells.contains(&(row, col))
    }

    /// Rows carrying at least one pilot, ascending.
    pub fn pilot_rows(&self) -> Vec<usize> {
        let mut rows: Vec<usize> = self.pilot_cells.iter().map(|&(r, _)| r).collect();
        rows.sort_unstable();
        rows.dedup();
        rows
    }

    pub fn data_count(&self) -> usize {
        self.rows * self.cols - self.pilot_cells.len()
    }

    /// Data cells in fill order: column by column, subcarrier fastest.
    pub fn data_cells(&self) -> Vec<(usize, usize)> {
        let mut cells = Vec::with_capacity(self.data_count());
        for c in 0..self.cols {
            for r in 0..self.rows {
                if !self.is_pilot(r, c) {
                    cells.push((r, c));
                }
            }
        }
        cells
    }
}

/// Dense `rows × cols` grid of complex values.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub rows: usize,
    pub cols: usize,
    cells: Vec<Complex>,
}

impl Grid {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, cells: vec![Complex::new(0.0, 0.0); rows * cols] }
    }

    /// Builds a grid from row vectors.
    pub fn from_rows(rows: &[Vec<Complex>]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != cols) {
            return Err(invalid("ragged grid rows"));
        }
        let mut g = Self::zeros(rows.len(), cols);
        for (i, row) in rows.iter().enumerate() {
            for (j, &z) in row.iter().enumerate() {
                g.set(i, j, z);
            }
        }
        Ok(g)
    }

    pub fn get(&self, row: usize, col: usize) -> Complex {
        self.cells[row * self.cols + col]
    }

    pub fn set(&mut self, row: usize, col: usize, z: Complex) {
        self.cells[row * self.cols + col] = z;
    }

    pub fn row(&self, row: usize) -> Vec<Complex> {
        (0..self.cols).map(|c| self.get(row, c)).collect()
    }

    pub fn col(&self, col: usize) -> Vec<Complex> {
        (0..self.rows).map(|r| self.get(r, col)).collect()
    }
}

/// Fills one resource block: pilots at the layout cells, data in
/// [`ResourceBlockLayout::data_cells`] order.
pub fn build_resource_block(data: &[Complex], layout: &ResourceBlockLayout) -> Result<Grid> {
    layout.validate()?;
    let cells = layout.data_cells();
    if data.len() != cells.len() {
        return Err(Error::LengthMismatch { expected: cells.len(), actual: data.len() });
    }
    let mut g = Grid::zeros(layout.rows, layout.cols);
    for &(r, c) in &layout.pilot_cells {
        g.set(r, c, layout.pilot());
    }
    for (&(r, c), &z) in cells.iter().zip(data) {
        g.set(r, c, z);
    }
    Ok(g)
}

/// OFDM numerology.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OfdmParams {
    pub n: usize,
    pub n_cp: usize,
    #[serde(default = "default_fs")]
    pub sample_rate_hz: f64,
    #[serde(default = "default_spacing")]
    pub subcarrier_spacing_hz: f64,
}

fn default_fs() -> f64 {
    7.68e6
}

fn default_spacing() -> f64 {
    15e3
}

impl Default for OfdmParams {
    fn default() -> Self {
        Self { n: 512, n_cp: 64, sample_rate_hz: default_fs(), subcarrier_spacing_hz: default_spacing() }
    }
}

impl OfdmParams {
    pub fn validate(&self) -> Result<()> {
        if self.n < 2 || !self.n.is_power_of_two() {
            return Err(Error::FftLength { len: self.n });
        }
        if self.n_cp >= self.n {
            return Err(invalid("cyclic prefix must be shorter than the symbol"));
        }
        if !(self.sample_rate_hz > 0.0) {
            return Err(invalid("sample rate must be positive"));
        }
        Ok(())
    }

    /// Samples per OFDM symbol including the cyclic prefix.
    pub fn n_total(&self) -> usize {
        self.n + self.n_cp
    }

    /// Duration of one OFDM symbol with its prefix, seconds.
    pub fn symbol_period_s(&self) -> f64 {
        self.n_total() as f64 / self.sample_rate_hz
    }
}

/// IFFT of `d` followed by cyclic-prefix insertion.
pub fn transmit(d: &[Complex], params: &OfdmParams, engine: &FftEngine) -> Result<Vec<Complex>> {
    if d.len() != params.n || engine.len() != params.n {
        return Err(Error::LengthMismatch { expected: params.n, actual: d.len() });
    }
    let mut body = d.to_vec();
    engine.inverse(&mut body);
    let mut x = Vec::with_capacity(params.n_total());
    x.extend_from_slice(&body[params.n - params.n_cp..]);
    x.extend_from_slice(&body);
    Ok(x)
}

/// Linear convolution with the channel taps, truncated to the input
/// length, plus AWGN with per-component variance `sigma_w2`.
///
/// `n_cp` bounds the admissible delay spread.
pub fn propagate(
    x: &[Complex],
    channel: &ChannelRealization,
    n_cp: usize,
    sigma_w2: f64,
    rng: &mut SimRng,
) -> Result<Vec<Complex>> {
    if let Some(&d) = channel.delays.iter().max() {
        if d > n_cp {
            return Err(Error::DelaySpread { delay: d, n_cp });
        }
    }
    let mut y = vec![Complex::new(0.0, 0.0); x.len()];
    for (&m, &h) in channel.delays.iter().zip(&channel.taps) {
        for t in m..x.len() {
            y[t] += h * x[t - m];
        }
    }
    add_noise(&mut y, sigma_w2, rng)?;
    Ok(y)
}

fn add_noise(y: &mut [Complex], sigma_w2: f64, rng: &mut SimRng) -> Result<()> {
    if sigma_w2 < 0.0 || !sigma_w2.is_finite() {
        return Err(invalid(format!("noise variance must be finite and non-negative, got {sigma_w2}")));
    }
    if sigma_w2 > 0.0 {
        for z in y.iter_mut() {
            *z += sample_complex_gaussian(rng, 2.0 * sigma_w2)?;
        }
    }
    Ok(())
}

/// Drops the cyclic prefix and applies the forward FFT.
pub fn receive(y: &[Complex], params: &OfdmParams, engine: &FftEngine) -> Result<Vec<Complex>> {
    if y.len() != params.n_total() {
        return Err(Error::LengthMismatch { expected: params.n_total(), actual: y.len() });
    }
    let mut r = y[params.n_cp..].to_vec();
    engine.forward(&mut r);
    Ok(r)
}

/// Frequency-domain shortcut `r_v = H_v d_v + w_v`.
pub fn apply_channel_freq(d: &[Complex], h: &[Complex], sigma_w2: f64, rng: &mut SimRng) -> Result<Vec<Complex>> {
    if d.len() != h.len() {
        return Err(Error::LengthMismatch { expected: h.len(), actual: d.len() });
    }
    let mut r: Vec<Complex> = d.iter().zip(h).map(|(a, b)| a * b).collect();
    add_noise(&mut r, sigma_w2, rng)?;
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{sample_realization, TapProfile};
    use crate::numerics::{energy, RngStream};
    use proptest::prelude::*;

    const ALL: [Modulation; 4] = [Modulation::Bpsk, Modulation::Qpsk, Modulation::Qam16, Modulation::Qam64];

    #[test]
    fn bpsk_convention() {
        let c = Constellation::new(Modulation::Bpsk);
        assert_eq!(c.map_bits(&[0, 1]).unwrap(), vec![Complex::new(1.0, 0.0), Complex::new(-1.0, 0.0)]);
    }

    #[test]
    fn unit_power_and_exhaustive_round_trip() {
        for m in ALL {
            let c = Constellation::new(m);
            let p: f64 = c.points.iter().map(|z| z.norm_sqr()).sum::<f64>() / c.size() as f64;
            assert!((p - 1.0).abs() < 1e-12, "{m:?}");
            let idx: Vec<usize> = (0..c.size()).collect();
            let bits = c.indices_to_bits(&idx);
            let syms = c.map_bits(&bits).unwrap();
            assert_eq!(c.demap(&syms), bits);
            let mut distinct = c.points.clone();
            distinct.dedup_by(|a, b| (*a - *b).norm() < 1e-9);
            assert_eq!(distinct.len(), c.size());
        }
    }

    #[test]
    fn qam_is_gray_mapped() {
        // Nearest neighbours (distance 2/√10 or 2/√42) differ in exactly one bit.
        for (m, dmin) in [
            (Modulation::Qam16, 2.0 / 10f64.sqrt()),
            (Modulation::Qam64, 2.0 / 42f64.sqrt()),
            (Modulation::Qpsk, 2f64.sqrt()),
        ] {
            let c = Constellation::new(m);
            for i in 0..c.size() {
                for j in 0..c.size() {
                    if ((c.points[i] - c.points[j]).norm() - dmin).abs() < 1e-9 {
                        assert_eq!((i ^ j).count_ones(), 1, "{m:?} {i} {j}");
                    }
                }
            }
        }
    }

    #[test]
    fn map_rejects_partial_symbols() {
        let c = Constellation::new(Modulation::Qam16);
        assert!(c.map_bits(&[0, 1, 1]).is_err());
    }

    #[test]
    fn segment_frames() {
        let x = Complex::new(0.0, 1.0);
        let p = Complex::new(1.0, 0.0);
        assert_eq!(build_segment(&[x], &SegmentLayout::single(2).unwrap()).unwrap(), vec![p, x]);
        assert_eq!(build_segment(&[x], &SegmentLayout::double(3).unwrap()).unwrap(), vec![p, x, p]);
        assert!(build_segment(&[x, x], &SegmentLayout::double(3).unwrap()).is_err());
        assert!(SegmentLayout::single(1).is_err());
        assert!(SegmentLayout::double(2).is_err());
    }

    #[test]
    fn symbol_plans() {
        let ss = SymbolPlan::new(512, SegmentLayout::single(2).unwrap()).unwrap();
        assert_eq!(ss.segments.len(), 256);
        assert_eq!(ss.data_count(), 256);
        let ss7 = SymbolPlan::new(512, SegmentLayout::single(7).unwrap()).unwrap();
        assert_eq!(ss7.segments.last(), Some(&(511, 1)));
        let ds3 = SymbolPlan::new(512, SegmentLayout::double(3).unwrap()).unwrap();
        assert!(ds3.pilot_mask[0] && ds3.pilot_mask[511]);
        for &(s, len) in &ds3.segments {
            assert!(ds3.pilot_mask[s] && ds3.pilot_mask[s + len - 1]);
        }
        assert_eq!(ds3.segments.iter().map(|&(_, l)| l - 1).sum::<usize>(), 511);
        let data: Vec<Complex> = (0..ds3.data_count()).map(|i| Complex::new(i as f64, 0.0)).collect();
        let d = ds3.build(&data).unwrap();
        let back: Vec<Complex> = ds3.data_positions().iter().map(|&v| d[v]).collect();
        assert_eq!(back, data);
    }

    #[test]
    fn resource_block_frame() {
        let layout = ResourceBlockLayout::default();
        layout.validate().unwrap();
        assert_eq!(layout.pilot_cells.len(), 8);
        assert_eq!(layout.pilot_rows(), vec![0, 4, 7, 11]);
        for &(_, c) in &layout.pilot_cells {
            assert!([0, 3, 6, 9].contains(&c));
        }
        assert_eq!(layout.data_count(), 160);
        let data: Vec<Complex> = (0..160).map(|i| Complex::new(i as f64 + 2.0, 0.0)).collect();
        let g = build_resource_block(&data, &layout).unwrap();
        let mut pilots = 0;
        for r in 0..12 {
            for c in 0..14 {
                if layout.is_pilot(r, c) {
                    assert_eq!(g.get(r, c), layout.pilot());
                    pilots += 1;
                }
            }
        }
        assert_eq!(pilots, 8);
        // Fill order is subcarrier-fastest: cell (1, 0) holds the first datum.
        assert_eq!(g.get(1, 0), data[0]);
        let back: Vec<Complex> = layout.data_cells().iter().map(|&(r, c)| g.get(r, c)).collect();
        assert_eq!(back, data);
    }

    #[test]
    fn transmit_structure_and_energy() {
        let params = OfdmParams::default();
        let engine = FftEngine::new(params.n).unwrap();
        let c = Constellation::new(Modulation::Qpsk);
        let mut rng = RngStream::new(9, 0).rng();
        let bits: Vec<u8> = (0..1024).map(|_| rand::Rng::random::<bool>(&mut rng) as u8).collect();
        let d = c.map_bits(&bits).unwrap();
        let x = transmit(&d, &params, &engine).unwrap();
        assert_eq!(x.len(), 576);
        assert_eq!(&x[..64], &x[512..]);
        // Exactly: body energy equals ‖d‖² and the prefix repeats the tail.
        assert!((energy(&x) - energy(&d) - energy(&x[512..])).abs() < 1e-9);
        // On average the prefix adds the fraction N_CP/N.
        let mut ratio = 0.0;
        let reps = 400;
        for _ in 0..reps {
            let bits: Vec<u8> = (0..1024).map(|_| rand::Rng::random::<bool>(&mut rng) as u8).collect();
            let d = c.map_bits(&bits).unwrap();
            ratio += energy(&transmit(&d, &params, &engine).unwrap()) / energy(&d);
        }
        assert!((ratio / reps as f64 - (1.0 + 64.0 / 512.0)).abs() < 0.005);
        assert!((params.symbol_period_s() - 75e-6).abs() < 1e-12);
    }

    #[test]
    fn propagate_simple_channels() {
        let engine = FftEngine::new(8).unwrap();
        let mut rng = RngStream::new(0, 0).rng();
        let x: Vec<Complex> = (0..10).map(|i| Complex::new(i as f64, -(i as f64))).collect();
        let id = ChannelRealization::from_taps(vec![0], vec![Complex::new(1.0, 0.0)], &engine, 0).unwrap();
        assert_eq!(propagate(&x, &id, 2, 0.0, &mut rng).unwrap(), x);
        let delay = ChannelRealization::from_taps(vec![1], vec![Complex::new(1.0, 0.0)], &engine, 0).unwrap();
        let y = propagate(&x, &delay, 2, 0.0, &mut rng).unwrap();
        assert_eq!(y[0], Complex::new(0.0, 0.0));
        assert_eq!(&y[1..], &x[..9]);
        assert_eq!(propagate(&x, &delay, 0, 0.0, &mut rng), Err(Error::DelaySpread { delay: 1, n_cp: 0 }));
    }

    #[test]
    fn noise_power() {
        let engine = FftEngine::new(8).unwrap();
        let mut rng = RngStream::new(1, 0).rng();
        let id = ChannelRealization::from_taps(vec![0], vec![Complex::new(1.0, 0.0)], &engine, 0).unwrap();
        let x = vec![Complex::new(0.0, 0.0); 200_000];
        let y = propagate(&x, &id, 0, 0.3, &mut rng).unwrap();
        let p = energy(&y) / y.len() as f64;
        // 3 sigma of the mean of an exponential with mean 0.6 over 2e5 draws.
        assert!((p - 0.6).abs() < 3.0 * 0.6 / (2e5f64).sqrt(), "{p}");
    }

    #[test]
    fn time_and_frequency_paths_agree() {
        let params = OfdmParams::default();
        let engine = FftEngine::new(params.n).unwrap();
        let c = Constellation::new(Modulation::Qam16);
        let mut rng = RngStream::new(2, 0).rng();
        for profile in [TapProfile::flat(), TapProfile::tux6(), TapProfile::tux9()] {
            let ch = sample_realization(&profile, &engine, &mut rng).unwrap();
            let bits: Vec<u8> = (0..2048).map(|_| rand::Rng::random::<bool>(&mut rng) as u8).collect();
            let d = c.map_bits(&bits).unwrap();
            let x = transmit(&d, &params, &engine).unwrap();
            let y = propagate(&x, &ch, params.n_cp, 0.0, &mut rng).unwrap();
            let r = receive(&y, &params, &engine).unwrap();
            let shortcut = apply_channel_freq(&d, &ch.cfr, 0.0, &mut rng).unwrap();
            for v in 0..params.n {
                assert!((r[v] - ch.cfr[v] * d[v]).norm() < 1e-9);
                assert!((r[v] - shortcut[v]).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn received_noise_is_white_with_expected_variance() {
        let params = OfdmParams { n: 64, n_cp: 8, ..OfdmParams::default() };
        let engine = FftEngine::new(64).unwrap();
        let mut rng = RngStream::new(3, 0).rng();
        let id = ChannelRealization::from_taps(vec![0], vec![Complex::new(1.0, 0.0)], &engine, 0).unwrap();
        let zeros = vec![Complex::new(0.0, 0.0); 72];
        let sigma2 = 0.25;
        let mut power = 0.0;
        let mut adj = Complex::new(0.0, 0.0);
        let mut shortcut_power = 0.0;
        let reps = 4000;
        for _ in 0..reps {
            let r = receive(&propagate(&zeros, &id, 8, sigma2, &mut rng).unwrap(), &params, &engine).unwrap();
            power += energy(&r);
            adj += r.windows(2).map(|w| w[0] * w[1].conj()).sum::<Complex>();
            let s = apply_channel_freq(&zeros[..64], &id.cfr, sigma2, &mut rng).unwrap();
            shortcut_power += energy(&s);
        }
        let count = (reps * 64) as f64;
        let p = power / count;
        let sd = 2.0 * sigma2 / count.sqrt();
        assert!((p - 0.5).abs() < 4.0 * sd, "{p}");
        assert!((shortcut_power / count - 0.5).abs() < 4.0 * sd);
        assert!((adj / (reps * 63) as f64).norm() < 4.0 * 0.5 / ((reps * 63) as f64).sqrt());
    }

    proptest! {
        #[test]
        fn round_trip_random_bits(seed in any::<u64>(), which in 0usize..4, n in 1usize..50) {
            let c = Constellation::new(ALL[which]);
            let mut rng = RngStream::new(seed, 0).rng();
            let bits: Vec<u8> = (0..n * c.bits_per_symbol).map(|_| rand::Rng::random::<bool>(&mut rng) as u8).collect();
            let syms = c.map_bits(&bits).unwrap();
            prop_assert_eq!(c.demap(&syms), bits);
        }
    }
}
