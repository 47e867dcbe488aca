//! Test functions, noise models and reproducible experiment drivers.

pub mod config;
pub mod functions;
pub mod noise;
pub mod stats;
pub mod sweep;

pub use config::ExperimentConfig;
pub use functions::{oscillator_qoi, synthetic_f, Oscillator, TestFunction};
pub use noise::{apply_noise, draw_noise, NoiseModel};
pub use stats::{box_stats, quantile, BoxStats};
pub use sweep::{reference_for, run_m_sweep, run_parameter_sweep, single_problem, CellSummary, NoiseRecord, SweepOutput, TrialResult};
