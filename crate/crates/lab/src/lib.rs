//! Experiment harness: each experiment runs one quantitative claim over a list of
//! degrees, fits a power law where a decay is claimed, and records a verdict.

pub mod config;
pub mod error;
pub mod experiments;
pub mod family;
pub mod fit;
pub mod report;

pub use config::{Experiment, ExperimentConfig};
pub use error::{LabError, LabResult};
pub use experiments::run_experiment;
pub use fit::{fit_power_law, PowerFit};
pub use report::{emit_report, Format, Report};
