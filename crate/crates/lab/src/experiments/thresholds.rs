//! Acceptance thresholds. Every verdict is computed against these.

pub const BALANCED_RHO: f64 = 1e-8;
pub const BALANCED_FS: f64 = 1e-9;
pub const QUANT_IDENTITY: f64 = 1e-9;
pub const DECAY_EXPONENT: f64 = 0.9;
pub const FIT_RESIDUAL: f64 = 0.1;
/// Final psi error may exceed the fitted prediction at the last k by this factor.
pub const PSI_PREDICTION_FACTOR: f64 = 1.5;
pub const PATH_AGREEMENT: f64 = 1e-6;
pub const HESSIAN_REL: f64 = 1e-4;
/// Finite-difference step along hessian paths.
pub const HESSIAN_STEP: f64 = 1e-3;
pub const CONCAVITY: f64 = 1e-10;
pub const CONCAVITY_K0_MAX: usize = 32;
pub const CONVEXITY: f64 = -1e-8;
/// Finite-difference step for the second derivative of Z along geodesics.
pub const CONVEXITY_STEP: f64 = 1e-2;
pub const MINIMIZATION: f64 = -1e-8;
pub const CRITICAL_SLOPE: f64 = 1e-6;
pub const ZMIN_SLOPE: f64 = -1e-8;
