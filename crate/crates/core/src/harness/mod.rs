//! Experiment harness: scenario configs and seeded batch runs.

pub mod config;
pub mod run;

pub use config::{ScenarioConfig, PRESETS, PRESET_120GHZ, PRESET_60GHZ};
pub use run::{
    compute_concentration, compute_gainmap, compute_multipath, compute_quantization, compute_sweep,
    ingest_trace, run_concentration, run_gainmap, run_multipath, run_quantization, run_sweep,
    run_trace_stats, single_trajectory, trajectory_draw, ConcentrationResult, GainmapResult,
    MultipathCase, QuantizationRow, RunOptions, RunSummary, SweepResult, TrajectoryDraw,
};
