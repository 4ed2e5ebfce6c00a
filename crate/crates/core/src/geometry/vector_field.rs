use std::f64::consts::PI;

use num_complex::Complex64;

use super::grid::{GridMode, QuadGrid};
use super::metric::MetricData;
use super::potential::Potential;
use crate::error::{Error, Result};

/// Relative tolerance for g_φ(V,·) = dθ.
pub const HOLOMORPHY_TOL: f64 = 1e-8;

/// V = a · r∂_r, the gradient of a times the rotation moment u = r²/(1+r²).
/// a = 0 is the extremal field V* of CP¹.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VectorFieldSpec {
    amplitude: f64,
}

impl VectorFieldSpec {
    pub fn zero() -> Self {
        VectorFieldSpec { amplitude: 0.0 }
    }

    pub fn rotation_gradient(amplitude: f64) -> Self {
        VectorFieldSpec { amplitude }
    }

    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    pub fn is_zero(&self) -> bool {
        self.amplitude == 0.0
    }

    /// Moment function μ_V = (a/2π)(u − ½), mean zero against dμ₀.
    pub fn killing_potential(&self, grid: &QuadGrid) -> Vec<f64> {
        let a = self.amplitude;
        grid.expand_rows(|i| a / (2.0 * PI) * (grid.u(i) - 0.5))
    }

    /// Time-t flow z ↦ e^{at} z.
    pub fn flow(&self, t: f64, z: Complex64) -> Complex64 {
        z * (self.amplitude * t).exp()
    }

    /// V as a holomorphic vector field, V = v(z)∂_z with v(z) = a z.
    pub fn at(&self, z: Complex64) -> Complex64 {
        z * self.amplitude
    }
}

/// Normalized holomorphy potential θ(φ) of V: g_φ(V,·) = dθ, ∫θ dμ_φ = 0.
///
/// For V = a r∂_r this is θ = (a/2π)(u + tφ_t) minus its mean, with 2tφ_t = (1−x²)φ_x.
pub fn holomorphy_potential(v: &VectorFieldSpec, phi: &Potential, metric: &MetricData) -> Result<Vec<f64>> {
    let grid = phi.grid();
    let a = v.amplitude();
    if a == 0.0 {
        return Ok(vec![0.0; grid.len()]);
    }
    let dphi = phi.x_derivative();
    let raw: Vec<f64> = (0..grid.len())
        .map(|idx| {
            let (i, _) = grid.row_col(idx);
            a / (2.0 * PI) * (grid.u(i) + 0.5 * dphi[idx])
        })
        .collect();
    let mean = metric.integrate(&raw);
    let theta: Vec<f64> = raw.iter().map(|t| t - mean).collect();
    let res = holomorphy_residual(v, &theta, metric);
    if res > HOLOMORPHY_TOL {
        return Err(Error::NotHolomorphic(res));
    }
    Ok(theta)
}

/// Relative sup-residual of g_φ(V,·) = dθ. In x: ∂_xθ = (a/4π) w, and ∂_ϑθ = 0.
pub fn holomorphy_residual(v: &VectorFieldSpec, theta: &[f64], metric: &MetricData) -> f64 {
    let grid = metric.grid();
    let a = v.amplitude();
    let spec = grid.analyze_smooth(theta);
    let dx = grid.synthesize_x_derivative(&spec);
    let dt = match grid.mode() {
        GridMode::Radial => vec![0.0; grid.len()],
        GridMode::Full2d => grid.synthesize_theta_derivative(&spec),
    };
    let mut worst: f64 = 0.0;
    for idx in 0..grid.len() {
        let (i, _) = grid.row_col(idx);
        let s2 = 1.0 - grid.x()[i] * grid.x()[i];
        let want = a / (4.0 * PI) * metric.density()[idx] * s2;
        worst = worst.max((dx[idx] - want).abs()).max(dt[idx].abs());
    }
    worst / (a.abs() / (4.0 * PI)).max(f64::MIN_POSITIVE)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::grid::build_grid;
    use crate::geometry::metric::metric_data;

    #[test]
    fn theta_at_fubini_study() {
        let g = build_grid(GridMode::Radial, 32).unwrap();
        let phi = Potential::zero(&g);
        let m = metric_data(&phi).unwrap();
        let th = holomorphy_potential(&VectorFieldSpec::rotation_gradient(1.0), &phi, &m).unwrap();
        for i in 0..32 {
            assert!((th[i] - (g.u(i) - 0.5) / (2.0 * PI)).abs() < 1e-14);
        }
    }

    #[test]
    fn zero_field_zero_theta() {
        let g = build_grid(GridMode::Radial, 16).unwrap();
        let phi = Potential::monomial(&g, &[0.0, 0.03, 0.01]);
        let m = metric_data(&phi).unwrap();
        let th = holomorphy_potential(&VectorFieldSpec::zero(), &phi, &m).unwrap();
        assert!(th.iter().all(|&t| t == 0.0));
    }

    #[test]
    fn theta_normalized_and_holomorphic_on_bump() {
        let g = build_grid(GridMode::Full2d, 24).unwrap();
        let phi = Potential::monomial(&g, &[0.0, 0.05, -0.04, 0.03, -0.02]);
        let m = metric_data(&phi).unwrap();
        let v = VectorFieldSpec::rotation_gradient(0.7);
        let th = holomorphy_potential(&v, &phi, &m).unwrap();
        assert!(m.integrate(&th).abs() <= 1e-10);
        assert!(holomorphy_residual(&v, &th, &m) < 1e-10);
    }

    #[test]
    fn non_invariant_potential_is_not_holomorphic() {
        let g = build_grid(GridMode::Full2d, 16).unwrap();
        let phi =
            Potential::from_fn(&g, |x, t| 0.02 * (1.0 - x * x) * (2.0 * t).cos() * x)
                .unwrap();
        let m = metric_data(&phi).unwrap();
        let r = holomorphy_potential(&VectorFieldSpec::rotation_gradient(1.0), &phi, &m);
        assert!(matches!(r, Err(Error::NotHolomorphic(_))));
    }

    #[test]
    fn killing_potential_mean_zero() {
        let g = build_grid(GridMode::Radial, 16).unwrap();
        let mu = VectorFieldSpec::rotation_gradient(2.0).killing_potential(&g);
        assert!(g.integrate(&mu).abs() < 1e-15);
    }
}
