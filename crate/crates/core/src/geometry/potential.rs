use std::sync::Arc;

use super::grid::{GridMode, QuadGrid, Spectrum};
use crate::error::{Error, Result};

/// Angular spread below which a 2D field counts as circle-invariant.
pub const INVARIANCE_TOL: f64 = 1e-12;

/// Kähler potential φ sampled at the grid nodes, ω_φ = ω₀ + (i/2π)∂∂̄φ.
#[derive(Clone, Debug)]
pub struct Potential {
    grid: Arc<QuadGrid>,
    values: Vec<f64>,
}

impl PartialEq for Potential {
    fn eq(&self, other: &Self) -> bool {
        *self.grid == *other.grid && self.values == other.values
    }
}

impl Potential {
    pub fn new(grid: Arc<QuadGrid>, values: Vec<f64>) -> Result<Self> {
        grid.check_len(&values)?;
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("potential"));
        }
        Ok(Potential { grid, values })
    }

    pub fn zero(grid: &Arc<QuadGrid>) -> Self {
        Potential {
            values: vec![0.0; grid.len()],
            grid: grid.clone(),
        }
    }

    pub fn constant(grid: &Arc<QuadGrid>, c: f64) -> Self {
        Potential {
            values: vec![c; grid.len()],
            grid: grid.clone(),
        }
    }

    /// φ = Σ_m c_m u^m.
    pub fn monomial(grid: &Arc<QuadGrid>, coeffs: &[f64]) -> Self {
        let values = grid.expand_rows(|i| {
            let u = grid.u(i);
            coeffs.iter().rev().fold(0.0, |acc, c| acc * u + c)
        });
        Potential {
            values,
            grid: grid.clone(),
        }
    }

    /// Samples f(x, ϑ) at the nodes.
    pub fn from_fn(grid: &Arc<QuadGrid>, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        let values = (0..grid.len())
            .map(|idx| {
                let (i, j) = grid.row_col(idx);
                f(grid.x()[i], grid.theta(j))
            })
            .collect();
        Potential::new(grid.clone(), values)
    }

    pub fn grid(&self) -> &Arc<QuadGrid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn spectrum(&self) -> Spectrum {
        self.grid.analyze(&self.values)
    }

    /// (1 − x²) ∂_x φ; equals 2 t ∂_t φ with t = |z|².
    pub fn x_derivative(&self) -> Vec<f64> {
        self.grid.synthesize_x_derivative(&self.grid.analyze_smooth(&self.values))
    }

    /// ∂_ϑ φ (zero in radial mode).
    pub fn theta_derivative(&self) -> Vec<f64> {
        match self.grid.mode() {
            GridMode::Radial => vec![0.0; self.values.len()],
            GridMode::Full2d => self.grid.synthesize_theta_derivative(&self.grid.analyze_smooth(&self.values)),
        }
    }

    /// Round Laplacian Lφ; the density of ω_φ against dμ₀ is 1 + Lφ.
    pub fn round_laplacian(&self) -> Vec<f64> {
        self.grid.laplacian(&self.values)
    }

    pub fn is_invariant(&self) -> bool {
        self.grid.mode() == GridMode::Radial
            || self.grid.angular_spread(&self.values) <= INVARIANCE_TOL
    }

    pub fn require_invariant(&self) -> Result<()> {
        if self.is_invariant() {
            Ok(())
        } else {
            Err(Error::NotInvariant(self.grid.angular_spread(&self.values)))
        }
    }

    pub fn add(&self, other: &[f64], scale: f64) -> Self {
        Potential {
            grid: self.grid.clone(),
            values: self
                .values
                .iter()
                .zip(other)
                .map(|(a, b)| a + scale * b)
                .collect(),
        }
    }

    pub fn scaled(&self, s: f64) -> Self {
        Potential {
            grid: self.grid.clone(),
            values: self.values.iter().map(|v| v * s).collect(),
        }
    }

    pub fn shifted(&self, c: f64) -> Self {
        Potential {
            grid: self.grid.clone(),
            values: self.values.iter().map(|v| v + c).collect(),
        }
    }

    /// Subtracts the dμ₀-mean.
    pub fn mean_normalized(&self) -> Self {
        let m = self.grid.integrate(&self.values);
        self.shifted(-m)
    }

    pub fn sup_distance(&self, other: &Potential) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::grid::build_grid;

    #[test]
    fn monomial_matches_direct() {
        let g = build_grid(GridMode::Radial, 16).unwrap();
        let p = Potential::monomial(&g, &[0.1, 0.2, -0.3]);
        for i in 0..16 {
            let u = g.u(i);
            assert!((p.values()[i] - (0.1 + 0.2 * u - 0.3 * u * u)).abs() < 1e-15);
        }
    }

    #[test]
    fn x_derivative_is_dilation_derivative() {
        // φ = u² → 2tφ_t = 2t · 2u/(1+t)² = 4u²(1−u)
        let g = build_grid(GridMode::Radial, 32).unwrap();
        let p = Potential::monomial(&g, &[0.0, 0.0, 1.0]);
        let d = p.x_derivative();
        for i in 0..32 {
            let u = g.u(i);
            assert!((d[i] - 4.0 * u * u * (1.0 - u)).abs() < 1e-12);
        }
    }

    #[test]
    fn invariance_flag() {
        let g = build_grid(GridMode::Full2d, 8).unwrap();
        let inv = Potential::from_fn(&g, |x, _| x * x).unwrap();
        assert!(inv.is_invariant());
        let non = Potential::from_fn(&g, |x, t| 0.01 * (1.0 - x * x) * t.cos()).unwrap();
        assert!(!non.is_invariant());
        assert!(non.require_invariant().is_err());
    }

    #[test]
    fn rejects_wrong_length_and_nan() {
        let g = build_grid(GridMode::Radial, 8).unwrap();
        assert!(Potential::new(g.clone(), vec![0.0; 7]).is_err());
        let mut v = vec![0.0; 8];
        v[3] = f64::NAN;
        assert!(Potential::new(g, v).is_err());
    }
}
