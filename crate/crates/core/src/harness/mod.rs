//! Monte Carlo experiment harness: configuration, the built-in scenario
//! registry, trial execution, statistics and file outputs.

mod config;
mod output;
mod run;
mod scenarios;
mod stats;

pub use config::{
    Chain, ChannelSpec, DetectorKind, ExperimentConfig, FadingBlock, FecSpec, LayoutSpec, MobilitySpec, OutputSpec,
    MIN_BITS_FLOOR,
};
pub use output::{emit_outputs, plot_data, theory_sweep, write_csv, CSV_HEADER};
pub use run::{run_experiment, trial_stream, Experiment, BATCH_TRIALS};
pub use scenarios::{scenario, scenario_names, Scenario, SCENARIOS};
pub use stats::{wilson_interval, BerRecord, Tally, Z95};
