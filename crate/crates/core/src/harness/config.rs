use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::channel::{MobilityModel, TapProfile};
use crate::detectors::{check_budget, DEFAULT_BF_BUDGET};
use crate::error::{Error, Result};
use crate::fec::{BlockInterleaver, ConvCode};
use crate::frame::{
    Constellation, Modulation, OfdmParams, ResourceBlockLayout, SegmentLayout, SegmentMode, SymbolPlan,
};

/// Detectors selectable in an experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DetectorKind {
    /// D³ via the Viterbi algorithm (two-step for resource blocks).
    D3,
    /// D³ via exhaustive search.
    D3Bf,
    /// Perfect-CSI ML detection, MRC over branches.
    Coherent,
    /// LS pilots with linear interpolation and zero forcing.
    CoherentL,
    /// LS pilots with natural cubic spline interpolation.
    CoherentS,
    Glrt,
}

impl DetectorKind {
    pub fn name(self) -> &'static str {
        match self {
            DetectorKind::D3 => "d3",
            DetectorKind::D3Bf => "d3-bf",
            DetectorKind::Coherent => "coherent",
            DetectorKind::CoherentL => "coherent-l",
            DetectorKind::CoherentS => "coherent-s",
            DetectorKind::Glrt => "glrt",
        }
    }
}

/// A named built-in profile or an explicit delay/power list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ChannelSpec {
    Named { name: String },
    Profile(TapProfile),
}

impl ChannelSpec {
    pub fn profile(&self) -> Result<TapProfile> {
        match self {
            ChannelSpec::Named { name } => TapProfile::by_name(name),
            ChannelSpec::Profile(p) => Ok(p.clone()),
        }
    }
}

/// How often flat or selective fading is redrawn.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FadingBlock {
    /// One realization per OFDM symbol, shared by all its segments.
    #[default]
    Symbol,
    /// An independent realization for every segment.
    Segment,
}

/// Propagation model.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Chain {
    /// IFFT, cyclic prefix, tapped-delay line, noise, CP removal, FFT.
    #[default]
    Time,
    /// `r_v = H_v d_v + w_v` directly on the subcarriers.
    Frequency,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MobilitySpec {
    pub speed_kmh: f64,
    #[serde(default = "default_carrier")]
    pub carrier_hz: f64,
    #[serde(default = "default_oscillators")]
    pub oscillators: usize,
}

fn default_carrier() -> f64 {
    1.9e9
}

fn default_oscillators() -> usize {
    MobilityModel::DEFAULT_OSCILLATORS
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum LayoutSpec {
    Segment {
        k: usize,
        mode: SegmentMode,
    },
    ResourceBlock {
        #[serde(default)]
        grid: Option<ResourceBlockLayout>,
    },
}

/// Convolutional coding with optional block interleaving; a trial is one
/// frame of `blocks_per_frame` zero-terminated blocks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FecSpec {
    pub interleaver: bool,
    #[serde(default = "default_block_bits")]
    pub block_bits: usize,
    #[serde(default = "default_blocks")]
    pub blocks_per_frame: usize,
    #[serde(default = "default_dim")]
    pub rows: usize,
    #[serde(default = "default_dim")]
    pub cols: usize,
}

fn default_block_bits() -> usize {
    256
}

fn default_blocks() -> usize {
    500
}

fn default_dim() -> usize {
    512
}

impl FecSpec {
    pub fn code(&self) -> ConvCode {
        ConvCode::default()
    }

    pub fn interleaver(&self) -> BlockInterleaver {
        BlockInterleaver { rows: self.rows, cols: self.cols }
    }

    /// Coded bits per block, tail included.
    pub fn coded_block_len(&self) -> usize {
        2 * (self.block_bits + self.code().tail())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub dir: PathBuf,
}

/// One Monte Carlo experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub scenario: String,
    #[serde(default)]
    pub ofdm: OfdmParams,
    pub channel: ChannelSpec,
    #[serde(default)]
    pub fading_block: FadingBlock,
    #[serde(default)]
    pub chain: Chain,
    #[serde(default)]
    pub mobility: Option<MobilitySpec>,
    pub modulation: Modulation,
    pub layout: LayoutSpec,
    #[serde(default = "one")]
    pub branches: usize,
    pub detectors: Vec<DetectorKind>,
    pub snr_db: Vec<f64>,
    #[serde(default = "default_min_bits")]
    pub min_bits: u64,
    #[serde(default = "default_min_errors")]
    pub min_errors: u64,
    /// Budget per SNR point, in OFDM symbols.
    #[serde(default = "default_max_symbols")]
    pub max_symbols: u64,
    #[serde(default = "default_seed")]
    pub seed: u64,
    /// Drop the receiver noise entirely (smoke tests).
    #[serde(default)]
    pub noiseless: bool,
    #[serde(default)]
    pub fec: Option<FecSpec>,
    #[serde(default)]
    pub output: Option<OutputSpec>,
}

fn one() -> usize {
    1
}

fn default_min_bits() -> u64 {
    100_000
}

fn default_min_errors() -> u64 {
    100
}

fn default_max_symbols() -> u64 {
    100_000
}

fn default_seed() -> u64 {
    1
}

pub const MIN_BITS_FLOOR: u64 = 10_000;

fn bad(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| bad(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io { path: path.display().to_string(), message: e.to_string() })?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn constellation(&self) -> Constellation {
        Constellation::new(self.modulation)
    }

    pub fn mobility_model(&self) -> Result<Option<MobilityModel>> {
        self.mobility
            .map(|m| {
                let mut model = MobilityModel::from_speed_kmh(m.speed_kmh, m.carrier_hz, self.ofdm.symbol_period_s())?;
                model.oscillator_count = m.oscillators;
                model.validate()?;
                Ok(model)
            })
            .transpose()
    }

    pub fn segment_layout(&self) -> Option<SegmentLayout> {
        match self.layout {
            LayoutSpec::Segment { k, mode } => SegmentLayout::new(k, mode, crate::Complex::new(1.0, 0.0)).ok(),
            LayoutSpec::ResourceBlock { .. } => None,
        }
    }

    pub fn rb_layout(&self) -> Option<ResourceBlockLayout> {
        match &self.layout {
            LayoutSpec::ResourceBlock { grid } => Some(grid.clone().unwrap_or_default()),
            LayoutSpec::Segment { .. } => None,
        }
    }

    /// Fail-closed consistency checks; every rejection names the offending
    /// combination.
    pub fn validate(&self) -> Result<()> {
        self.ofdm.validate()?;
        if self.scenario.trim().is_empty() {
            return Err(bad("scenario name must not be empty"));
        }
        if self.snr_db.is_empty() {
            return Err(bad("snr_db grid is empty"));
        }
        if self.snr_db.iter().any(|s| !s.is_finite()) {
            return Err(bad("snr_db values must be finite"));
        }
        if self.min_bits < MIN_BITS_FLOOR {
            return Err(bad(format!("min_bits must be at least {MIN_BITS_FLOOR}, got {}", self.min_bits)));
        }
        if self.max_symbols == 0 {
            return Err(bad("max_symbols must be positive"));
        }
        if self.detectors.is_empty() {
            return Err(bad("detector list is empty"));
        }
        for (i, d) in self.detectors.iter().enumerate() {
            if self.detectors[..i].contains(d) {
                return Err(bad(format!("detector '{}' listed twice", d.name())));
            }
        }
        if self.branches == 0 {
            return Err(bad("branches must be at least 1"));
        }
        let profile = self.channel.profile()?;
        if self.chain == Chain::Time {
            profile.check_cp(self.ofdm.n_cp)?;
        }
        let c = self.constellation();
        let mobility = self.mobility_model()?;

        match &self.layout {
            LayoutSpec::Segment { k, mode } => {
                let layout = SegmentLayout::new(*k, *mode, crate::Complex::new(1.0, 0.0))
                    .map_err(|e| bad(format!("segment layout: {e}")))?;
                SymbolPlan::new(self.ofdm.n, layout)?;
                if mobility.is_some() {
                    return Err(bad("mobility is supported for resource-block layouts only"));
                }
                for d in &self.detectors {
                    if matches!(d, DetectorKind::D3Bf | DetectorKind::Glrt) {
                        check_budget(c.size(), layout.data_count(), DEFAULT_BF_BUDGET)
                            .map_err(|e| bad(format!("detector '{}': {e}", d.name())))?;
                    }
                }
                if self.fading_block == FadingBlock::Segment {
                    if self.chain != Chain::Frequency {
                        return Err(bad("segment fading draws a channel per segment and needs chain = \"frequency\""));
                    }
                    if self.fec.is_some() {
                        return Err(bad("coded experiments need fading_block = \"symbol\""));
                    }
                }
            }
            LayoutSpec::ResourceBlock { .. } => {
                let rb = self.rb_layout().expect("resource block");
                rb.validate()?;
                if self.ofdm.n < rb.rows {
                    return Err(bad("the OFDM symbol is narrower than one resource block"));
                }
                if let Some(d) = self.detectors.iter().find(|d| matches!(d, DetectorKind::D3Bf | DetectorKind::Glrt)) {
                    return Err(bad(format!("detector '{}' is not available for resource blocks", d.name())));
                }
                if self.fading_block == FadingBlock::Segment {
                    return Err(bad("segment fading applies to segment layouts only"));
                }
                if self.branches != 1 {
                    return Err(bad("resource-block experiments are single-branch"));
                }
                if self.fec.is_some() {
                    return Err(bad("coding is supported with segment layouts only"));
                }
            }
        }
        if let Some(f) = &self.fec {
            if self.branches != 1 {
                return Err(bad("coded experiments are single-branch"));
            }
            if f.block_bits == 0 || f.blocks_per_frame == 0 {
                return Err(bad("fec block_bits and blocks_per_frame must be positive"));
            }
            if f.interleaver {
                let need = f.blocks_per_frame * f.coded_block_len();
                if need > f.rows * f.cols {
                    return Err(bad(format!(
                        "{need} coded bits per frame exceed the {}x{} interleaver",
                        f.rows, f.cols
                    )));
                }
            }
        }
        Ok(())
    }
}
