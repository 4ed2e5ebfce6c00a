use std::sync::Arc;

use kquant_core::geometry::{Potential, QuadGrid};
use kquant_core::io::parse_potential;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::{ExperimentConfig, PotentialChoice};
use crate::error::{LabError, LabResult};

/// φ = 0.05u − 0.04u² + 0.03u³ − 0.02u⁴.
pub const PUBLISHED_BUMP: [f64; 5] = [0.0, 0.05, -0.04, 0.03, -0.02];

const COEFF_RANGE: f64 = 0.05;

pub fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

/// Coefficient lists [0, c₁, …, c₄] with c_m uniform in [−0.05, 0.05].
pub fn seeded_coefficients(seed: u64, stream: u64, count: usize) -> Vec<Vec<f64>> {
    let mut r = rng(seed, stream);
    (0..count)
        .map(|_| {
            let mut c = vec![0.0];
            c.extend((0..4).map(|_| r.gen_range(-COEFF_RANGE..COEFF_RANGE)));
            c
        })
        .collect()
}

pub fn seeded_family(grid: &Arc<QuadGrid>, seed: u64, stream: u64, count: usize) -> Vec<Potential> {
    seeded_coefficients(seed, stream, count)
        .iter()
        .map(|c| Potential::monomial(grid, c))
        .collect()
}

/// The invariant family plus Σ_{j=1,2} (√(u(1−u)))^j (a_j cos jϑ + b_j sin jϑ).
pub fn seeded_nonradial_family(grid: &Arc<QuadGrid>, seed: u64, stream: u64, count: usize) -> LabResult<Vec<Potential>> {
    let radial = seeded_coefficients(seed, stream, count);
    let mut r = rng(seed, stream + 1000);
    radial
        .iter()
        .map(|c| {
            let ab: Vec<f64> = (0..4).map(|_| r.gen_range(-COEFF_RANGE..COEFF_RANGE)).collect();
            let c = c.clone();
            Potential::from_fn(grid, move |x, t| {
                let u = 0.5 * (1.0 + x);
                let rad: f64 = c.iter().enumerate().map(|(m, cm)| cm * u.powi(m as i32)).sum();
                let s = (u * (1.0 - u)).sqrt();
                rad + s * (ab[0] * t.cos() + ab[1] * t.sin()) + s * s * (ab[2] * (2.0 * t).cos() + ab[3] * (2.0 * t).sin())
            })
            .map_err(LabError::from)
        })
        .collect()
}

/// The potential selected by the config, placed on `grid`.
pub fn configured_potential(cfg: &ExperimentConfig, grid: &Arc<QuadGrid>) -> LabResult<Potential> {
    match &cfg.potential {
        PotentialChoice::Published => Ok(Potential::monomial(grid, &PUBLISHED_BUMP)),
        PotentialChoice::Zero => Ok(Potential::zero(grid)),
        PotentialChoice::Coefficients(c) => Ok(Potential::monomial(grid, c)),
        PotentialChoice::File(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| LabError::Io {
                path: p.display().to_string(),
                msg: e.to_string(),
            })?;
            Ok(parse_potential(&text)?.realize(grid)?)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use kquant_core::geometry::{build_grid, metric_data, GridMode};

    #[test]
    fn seeded_is_deterministic_and_admissible() {
        let g = build_grid(GridMode::Radial, 64).unwrap();
        let a = seeded_coefficients(7, 0, 50);
        assert_eq!(a, seeded_coefficients(7, 0, 50));
        assert_ne!(a, seeded_coefficients(8, 0, 50));
        for p in seeded_family(&g, 7, 0, 50) {
            metric_data(&p).unwrap();
        }
        let g2 = build_grid(GridMode::Full2d, 16).unwrap();
        for p in seeded_nonradial_family(&g2, 7, 0, 10).unwrap() {
            metric_data(&p).unwrap();
            assert!(!p.is_invariant());
        }
    }
}
