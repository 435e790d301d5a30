//! Multipath Rayleigh channels: tap profiles, realizations, Jakes time
//! evolution and the adjacent-subcarrier correlation statistics.

use std::f64::consts::PI;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::numerics::{bessel_j0, sample_complex_gaussian, Complex, FftEngine, SimRng};

/// Speed of light used for Doppler conversion, m/s.
pub const SPEED_OF_LIGHT: f64 = 3.0e8;

/// Power-delay profile with integer sample delays and normalized powers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawProfile", into = "RawProfile")]
pub struct TapProfile {
    delays: Vec<usize>,
    powers: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProfile {
    delays: Vec<usize>,
    powers: Vec<f64>,
}

impl TryFrom<RawProfile> for TapProfile {
    type Error = Error;
    fn try_from(raw: RawProfile) -> Result<Self> {
        TapProfile::new(raw.delays, raw.powers)
    }
}

impl From<TapProfile> for RawProfile {
    fn from(p: TapProfile) -> Self {
        RawProfile { delays: p.delays, powers: p.powers }
    }
}

impl TapProfile {
    /// Validates the profile and rescales the powers to sum to one.
    pub fn new(delays: Vec<usize>, powers: Vec<f64>) -> Result<Self> {
        if delays.is_empty() || delays.len() != powers.len() {
            return Err(invalid(format!(
                "profile needs matching non-empty delay and power lists ({} vs {})",
                delays.len(),
                powers.len()
            )));
        }
        if delays.windows(2).any(|w| w[0] >= w[1]) {
            return Err(invalid("profile delays must be strictly increasing"));
        }
        if powers.iter().any(|p| !(*p > 0.0) || !p.is_finite()) {
            return Err(invalid("profile powers must be positive and finite"));
        }
        let total: f64 = powers.iter().sum();
        let powers = powers.iter().map(|p| p / total).collect();
        Ok(Self { delays, powers })
    }

    /// Single tap at delay zero: frequency-flat Rayleigh fading.
    pub fn flat() -> Self {
        Self { delays: vec![0], powers: vec![1.0] }
    }

    /// Severe six-path typical-urban profile.
    pub fn tux6() -> Self {
        Self::new(vec![0, 2, 3, 9, 13, 29], vec![0.2, 0.398, 0.2, 0.1, 0.063, 0.039]).expect("built-in profile")
    }

    /// Moderate nine-path profile with short delays.
    pub fn tux9() -> Self {
        Self::new((0..9).collect(), vec![0.269, 0.174, 0.289, 0.117, 0.023, 0.058, 0.036, 0.026, 0.008])
            .expect("built-in profile")
    }

    pub fn by_name(name: &str) -> Result<Self> {
        match name {
            "flat" => Ok(Self::flat()),
            "tux6" => Ok(Self::tux6()),
            "tux9" => Ok(Self::tux9()),
            other => Err(Error::Config(format!("unknown channel profile '{other}'"))),
        }
    }

    pub fn delays(&self) -> &[usize] {
        &self.delays
    }

    pub fn powers(&self) -> &[f64] {
        &self.powers
    }

    pub fn max_delay(&self) -> usize {
        *self.delays.last().expect("non-empty profile")
    }

    pub fn is_flat(&self) -> bool {
        self.max_delay() == 0
    }

    /// Rejects profiles whose delay spread exceeds the cyclic prefix.
    pub fn check_cp(&self, n_cp: usize) -> Result<()> {
        if self.max_delay() > n_cp {
            return Err(Error::DelaySpread { delay: self.max_delay(), n_cp });
        }
        Ok(())
    }
}

/// One quasi-static channel draw: taps at the profile delays and the
/// N-point frequency response `H_v = Σ_m h_m e^{−j2πmv/N}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    pub delays: Vec<usize>,
    pub taps: Vec<Complex>,
    pub cfr: Vec<Complex>,
    pub block_index: u64,
}

impl ChannelRealization {
    /// Builds a realization from explicit taps, computing the response with
    /// `engine` (whose length sets N).
    pub fn from_taps(delays: Vec<usize>, taps: Vec<Complex>, engine: &FftEngine, block_index: u64) -> Result<Self> {
        let n = engine.len();
        if delays.len() != taps.len() {
            return Err(Error::LengthMismatch { expected: delays.len(), actual: taps.len() });
        }
        if let Some(&d) = delays.iter().find(|&&d| d >= n) {
            return Err(invalid(format!("tap delay {d} not below N = {n}")));
        }
        let mut cfr = vec![Complex::new(0.0, 0.0); n];
        for (&d, &h) in delays.iter().zip(&taps) {
            cfr[d] += h;
        }
        engine.forward(&mut cfr);
        let scale = (n as f64).sqrt();
        cfr.iter_mut().for_each(|z| *z *= scale);
        Ok(Self { delays, taps, cfr, block_index })
    }

    pub fn n(&self) -> usize {
        self.cfr.len()
    }
}

/// Draws independent taps `h_m ~ CN(0, p_m)` and their frequency response.
pub fn sample_realization(profile: &TapProfile, engine: &FftEngine, rng: &mut SimRng) -> Result<ChannelRealization> {
    let taps = profile.powers.iter().map(|&p| sample_complex_gaussian(rng, p)).collect::<Result<Vec<_>>>()?;
    ChannelRealization::from_taps(profile.delays.clone(), taps, engine, 0)
}

/// Adjacent-subcarrier correlation `ϱ_f = Σ_m p_m e^{j2πm/N}`.
pub fn freq_correlation(profile: &TapProfile, n: usize) -> Complex {
    profile
        .delays
        .iter()
        .zip(&profile.powers)
        .map(|(&m, &p)| Complex::from_polar(p, 2.0 * PI * m as f64 / n as f64))
        .sum()
}

/// Power-weighted adjacent-subcarrier difference `Σ_m p_m (1 − e^{−j2πm/N})`.
///
/// This is `E[H_v^* (H_v − H_{v+1})]`, which equals `1 − conj(ϱ_f)` for a
/// normalized profile and vanishes when all power sits at delay zero.
pub fn freq_difference(profile: &TapProfile, n: usize) -> Complex {
    profile
        .delays
        .iter()
        .zip(&profile.powers)
        .map(|(&m, &p)| p * (Complex::new(1.0, 0.0) - Complex::from_polar(1.0, -2.0 * PI * m as f64 / n as f64)))
        .sum()
}

/// Terminal mobility and the resulting maximum Doppler shift.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MobilityModel {
    pub doppler_hz: f64,
    pub symbol_period_s: f64,
    pub oscillator_count: usize,
    pub carrier_hz: f64,
    pub speed_mps: f64,
}

impl MobilityModel {
    pub const DEFAULT_OSCILLATORS: usize = 32;

    /// `speed_kmh` at carrier `carrier_hz`; the channel is sampled once per
    /// `symbol_period_s`.
    pub fn from_speed_kmh(speed_kmh: f64, carrier_hz: f64, symbol_period_s: f64) -> Result<Self> {
        let speed_mps = speed_kmh / 3.6;
        let m = Self {
            doppler_hz: speed_mps / SPEED_OF_LIGHT * carrier_hz,
            symbol_period_s,
            oscillator_count: Self::DEFAULT_OSCILLATORS,
            carrier_hz,
            speed_mps,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.doppler_hz >= 0.0) || !self.doppler_hz.is_finite() {
            return Err(invalid("Doppler frequency must be finite and non-negative"));
        }
        if !(self.symbol_period_s > 0.0) {
            return Err(invalid("symbol period must be positive"));
        }
        if self.oscillator_count < 8 {
            return Err(invalid("at least 8 oscillators are required"));
        }
        Ok(())
    }
}

/// Lag-one channel autocorrelation `J₀(2π f_d T)`.
pub fn time_correlation(model: &MobilityModel) -> f64 {
    bessel_j0(2.0 * PI * model.doppler_hz * model.symbol_period_s)
}

/// Evolves every tap of `start` as an independent Jakes process sampled once
/// per symbol period.
///
/// Returns `steps + 1` realizations: element 0 is `start` and element `k` is
/// the channel `k` periods later. Each tap is a sum of `oscillator_count`
/// complex sinusoids at Doppler shifts `f_d cos α_i` with stratified random
/// arrival angles; the Gaussian weights are conditioned on the tap value at
/// time zero, so the joint law of the sequence is that of a stationary
/// sum-of-sinusoids process whose autocorrelation averages to `J₀(2π f_d τ)`.
pub fn evolve(
    start: &ChannelRealization,
    powers: &[f64],
    model: &MobilityModel,
    steps: usize,
    engine: &FftEngine,
    rng: &mut SimRng,
) -> Result<Vec<ChannelRealization>> {
    model.validate()?;
    if steps == 0 {
        return Err(invalid("evolve needs at least one step"));
    }
    if powers.len() != start.taps.len() {
        return Err(Error::LengthMismatch { expected: start.taps.len(), actual: powers.len() });
    }
    let mut out = Vec::with_capacity(steps + 1);
    out.push(start.clone());
    if model.doppler_hz == 0.0 {
        for k in 1..=steps {
            let mut next = start.clone();
            next.block_index = start.block_index + k as u64;
            out.push(next);
        }
        return Ok(out);
    }

    let osc = model.oscillator_count;
    let inv_sqrt = 1.0 / (osc as f64).sqrt();
    let mut series: Vec<Vec<Complex>> = Vec::with_capacity(start.taps.len());
    for (&x0, &p) in start.taps.iter().zip(powers) {
        let mut omega = Vec::with_capacity(osc);
        let mut u = Vec::with_capacity(osc);
        for i in 0..osc {
            let alpha = 2.0 * PI * (i as f64 + rng.random::<f64>()) / osc as f64;
            omega.push(2.0 * PI * model.doppler_hz * alpha.cos() * model.symbol_period_s);
            u.push(sample_complex_gaussian(rng, p)?);
        }
        let mean = u.iter().sum::<Complex>() / osc as f64;
        let z: Vec<Complex> = u.iter().map(|ui| ui - mean + x0 * inv_sqrt).collect();
        let tap_series = (1..=steps)
            .map(|k| {
                omega.iter().zip(&z).map(|(&w, zi)| zi * Complex::from_polar(1.0, w * k as f64)).sum::<Complex>()
                    * inv_sqrt
            })
            .collect();
        series.push(tap_series);
    }
    for k in 0..steps {
        let taps = series.iter().map(|s| s[k]).collect();
        out.push(ChannelRealization::from_taps(start.delays.clone(), taps, engine, start.block_index + k as u64 + 1)?);
    }
    Ok(out)
}
