//! Experiment orchestration: parameter sweeps over `(sigma, gamma)` on
//! replicate overlays, phase scans, and CSV reports comparing simulation to
//! the analytic model.

pub mod config;
pub mod report;
pub mod sweep;

pub use config::{ExperimentConfig, TopologySpec};
pub use report::{emit_report, emit_report_to_path, format_g6, parse_report};
pub use sweep::{phase_scan, run_sweep, AnalyticTransition, PhaseScan, ScanAxis, SweepOutput, SweepRow};
