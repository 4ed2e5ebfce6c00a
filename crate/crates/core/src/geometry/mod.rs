//! The CP¹ model: grids, potentials, metric quantities, vector fields and automorphisms.

pub mod grid;
pub mod lift;
pub mod metric;
pub mod potential;
pub mod spectral;
pub mod vector_field;

pub use grid::{build_grid, Chart, GridMode, QuadGrid, Spectrum};
pub use lift::{sigma_lift, AutomorphismLift, Twist, C0_CALIBRATED};
pub use metric::{metric_data, MetricData, SBAR};
pub use potential::Potential;
pub use vector_field::{holomorphy_potential, holomorphy_residual, VectorFieldSpec};
