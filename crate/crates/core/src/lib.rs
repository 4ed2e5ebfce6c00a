//! Kähler quantization on CP¹ with the O(k) family.
//!
//! Conventions: ω₀ = (i/2π)∂∂̄ log(1+|z|²), Vol = 1, S(ω₀) = 2, N_k = k+1.
//! Points are parametrized by x = (r²−1)/(r²+1) ∈ [−1,1] and the angle ϑ,
//! so dμ₀ = dx dϑ/(4π) is the round measure and u = r²/(1+r²) = (1+x)/2.

pub mod error;
pub mod functionals;
pub mod geometry;
pub mod io;
pub mod quantization;

pub use error::{Error, Result};
pub use num_complex::Complex64;
