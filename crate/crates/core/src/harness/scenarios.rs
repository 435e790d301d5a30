use super::config::{
    Chain, ChannelSpec, DetectorKind, ExperimentConfig, FadingBlock, FecSpec, LayoutSpec, MobilitySpec,
};
use crate::error::{Error, Result};
use crate::frame::{Modulation, OfdmParams, SegmentMode};

use DetectorKind::*;

/// A built-in experiment.
pub struct Scenario {
    pub name: &'static str,
    pub description: &'static str,
    build: fn() -> ExperimentConfig,
}

impl Scenario {
    pub fn config(&self) -> ExperimentConfig {
        (self.build)()
    }
}

fn base(name: &str, channel: &str, modulation: Modulation, layout: LayoutSpec) -> ExperimentConfig {
    ExperimentConfig {
        scenario: name.to_string(),
        ofdm: OfdmParams::default(),
        channel: ChannelSpec::Named { name: channel.to_string() },
        fading_block: FadingBlock::Symbol,
        chain: Chain::Time,
        mobility: None,
        modulation,
        layout,
        branches: 1,
        detectors: vec![D3, Coherent],
        snr_db: grid(0.0, 40.0, 5.0),
        min_bits: 1_000_000,
        min_errors: 100,
        max_symbols: 100_000,
        seed: 1,
        noiseless: false,
        fec: None,
        output: None,
    }
}

fn grid(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let n = ((hi - lo) / step).round() as usize;
    (0..=n).map(|i| lo + step * i as f64).collect()
}

fn seg(k: usize, mode: SegmentMode) -> LayoutSpec {
    LayoutSpec::Segment { k, mode }
}

fn flat(name: &str, k: usize, mode: SegmentMode, branches: usize, detectors: Vec<DetectorKind>) -> ExperimentConfig {
    ExperimentConfig {
        fading_block: FadingBlock::Segment,
        chain: Chain::Frequency,
        branches,
        detectors,
        snr_db: grid(0.0, 30.0, 5.0),
        ..base(name, "flat", Modulation::Bpsk, seg(k, mode))
    }
}

fn rb(name: &str, speed_kmh: f64) -> ExperimentConfig {
    ExperimentConfig {
        chain: Chain::Frequency,
        mobility: Some(MobilitySpec { speed_kmh, carrier_hz: 1.9e9, oscillators: 32 }),
        detectors: vec![D3, Coherent, CoherentL, CoherentS],
        ..base(name, "tux6", Modulation::Bpsk, LayoutSpec::ResourceBlock { grid: None })
    }
}

fn coded(name: &str, interleaver: bool) -> ExperimentConfig {
    ExperimentConfig {
        detectors: vec![D3, Coherent, CoherentL],
        snr_db: grid(0.0, 14.0, 2.0),
        fec: Some(FecSpec { interleaver, block_bits: 256, blocks_per_frame: 500, rows: 512, cols: 512 }),
        ..base(name, "tux6", Modulation::Bpsk, seg(7, SegmentMode::Double))
    }
}

pub static SCENARIOS: &[Scenario] = &[
    Scenario {
        name: "flat-ss-k2-bpsk",
        description: "flat Rayleigh, single-sided K=2, BPSK; D³ (Viterbi and exhaustive) against coherent",
        build: || flat("flat-ss-k2-bpsk", 2, SegmentMode::Single, 1, vec![D3, D3Bf, Coherent]),
    },
    Scenario {
        name: "flat-ss-k6-bpsk",
        description: "flat Rayleigh, single-sided K=6, BPSK",
        build: || flat("flat-ss-k6-bpsk", 6, SegmentMode::Single, 1, vec![D3, Coherent]),
    },
    Scenario {
        name: "flat-ds-k3-bpsk",
        description: "flat Rayleigh, double-sided K=3, BPSK",
        build: || flat("flat-ds-k3-bpsk", 3, SegmentMode::Double, 1, vec![D3, Coherent]),
    },
    Scenario {
        name: "flat-ds-k7-bpsk",
        description: "flat Rayleigh, double-sided K=7, BPSK",
        build: || flat("flat-ds-k7-bpsk", 7, SegmentMode::Double, 1, vec![D3, Coherent]),
    },
    Scenario {
        name: "selective-ss-k2-bpsk",
        description: "six-path urban channel, single-sided K=2, BPSK; error floor from adjacent-subcarrier differences",
        build: || ExperimentConfig {
            detectors: vec![D3, Coherent, CoherentL],
            ..base("selective-ss-k2-bpsk", "tux6", Modulation::Bpsk, seg(2, SegmentMode::Single))
        },
    },
    Scenario {
        name: "selective-ds-k3-bpsk",
        description: "six-path urban channel, double-sided K=3, BPSK",
        build: || ExperimentConfig {
            detectors: vec![D3, Coherent, CoherentL],
            ..base("selective-ds-k3-bpsk", "tux6", Modulation::Bpsk, seg(3, SegmentMode::Double))
        },
    },
    Scenario {
        name: "simo-ss-k2-bpsk",
        description: "two receive branches, flat Rayleigh, single-sided K=2, BPSK; D³, GLRT and MRC",
        build: || flat("simo-ss-k2-bpsk", 2, SegmentMode::Single, 2, vec![D3, Glrt, Coherent]),
    },
    Scenario {
        name: "simo-ds-k3-bpsk",
        description: "two receive branches, flat Rayleigh, double-sided K=3, BPSK",
        build: || flat("simo-ds-k3-bpsk", 3, SegmentMode::Double, 2, vec![D3, Glrt, Coherent]),
    },
    Scenario {
        name: "fig-freq-selective",
        description: "six-path urban channel, QPSK, double-sided K=3; D³ against GLRT and coherent receivers",
        build: || ExperimentConfig {
            detectors: vec![D3, Coherent, CoherentL, CoherentS, Glrt],
            ..base("fig-freq-selective", "tux6", Modulation::Qpsk, seg(3, SegmentMode::Double))
        },
    },
    Scenario {
        name: "fig-freq-selective-simo",
        description: "as fig-freq-selective with two receive branches",
        build: || ExperimentConfig {
            branches: 2,
            detectors: vec![D3, Coherent, CoherentL, CoherentS, Glrt],
            ..base("fig-freq-selective-simo", "tux6", Modulation::Qpsk, seg(3, SegmentMode::Double))
        },
    },
    Scenario {
        name: "ds-k7-comparison",
        description: "six-path urban channel, BPSK, double-sided K=7; sequence detectors compared",
        build: || ExperimentConfig {
            detectors: vec![D3, D3Bf, Glrt, Coherent, CoherentL],
            ..base("ds-k7-comparison", "tux6", Modulation::Bpsk, seg(7, SegmentMode::Double))
        },
    },
    Scenario {
        name: "qam16-ds-k7",
        description: "six-path urban channel, 16-QAM, double-sided K=7",
        build: || ExperimentConfig {
            detectors: vec![D3, Coherent, CoherentL, CoherentS],
            ..base("qam16-ds-k7", "tux6", Modulation::Qam16, seg(7, SegmentMode::Double))
        },
    },
    Scenario {
        name: "rb-mobility-50",
        description: "full resource blocks, six-path channel, 50 km/h at 1.9 GHz",
        build: || rb("rb-mobility-50", 50.0),
    },
    Scenario {
        name: "rb-mobility-300",
        description: "full resource blocks, six-path channel, 300 km/h at 1.9 GHz",
        build: || rb("rb-mobility-300", 300.0),
    },
    Scenario {
        name: "coded-interleaved",
        description: "(171,131) code, hard decisions, 512x512 interleaver, double-sided K=7, six-path channel",
        build: || coded("coded-interleaved", true),
    },
    Scenario {
        name: "coded-no-interleaver",
        description: "(171,131) code, hard decisions, no interleaver, double-sided K=7, six-path channel",
        build: || coded("coded-no-interleaver", false),
    },
];

pub fn scenario_names() -> Vec<&'static str> {
    SCENARIOS.iter().map(|s| s.name).collect()
}

pub fn scenario(name: &str) -> Result<ExperimentConfig> {
    SCENARIOS
        .iter()
        .find(|s| s.name == name)
        .map(Scenario::config)
        .ok_or_else(|| Error::Config(format!("unknown scenario '{name}'; available: {}", scenario_names().join(", "))))
}
