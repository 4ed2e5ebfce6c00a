use std::sync::Arc;

use super::grid::QuadGrid;
use super::potential::Potential;
use crate::error::{Error, Result};

/// Average scalar curvature under Vol = 1 on CP¹.
pub const SBAR: f64 = 2.0;

/// Metric quantities of ω_φ. Everything is expressed through the density ratio
/// w = dμ_φ/dμ₀ = 1 + Lφ, with L the round Laplacian; then Δ_φ = −L/w and
/// S(φ) = (2 − L log w)/w.
#[derive(Clone, Debug)]
pub struct MetricData {
    grid: Arc<QuadGrid>,
    density: Vec<f64>,
    volume_weights: Vec<f64>,
    scalar: Vec<f64>,
}

pub fn metric_data(phi: &Potential) -> Result<MetricData> {
    let grid = phi.grid().clone();
    let density: Vec<f64> = phi.round_laplacian().iter().map(|l| 1.0 + l).collect();
    check_density(&density)?;
    let log_w: Vec<f64> = density.iter().map(|w| w.ln()).collect();
    let lap_log = grid.laplacian(&log_w);
    let scalar = density
        .iter()
        .zip(&lap_log)
        .map(|(w, l)| (SBAR - l) / w)
        .collect();
    let volume_weights = density
        .iter()
        .zip(grid.weights())
        .map(|(w, m)| w * m)
        .collect();
    Ok(MetricData {
        grid,
        density,
        volume_weights,
        scalar,
    })
}

/// Rejects potentials whose form fails to be positive at some node.
pub fn check_density(density: &[f64]) -> Result<()> {
    for (node, &value) in density.iter().enumerate() {
        if !(value > 0.0) {
            return Err(Error::NonKahler { node, value });
        }
    }
    Ok(())
}

impl MetricData {
    pub fn grid(&self) -> &Arc<QuadGrid> {
        &self.grid
    }

    /// dμ_φ/dμ₀.
    pub fn density(&self) -> &[f64] {
        &self.density
    }

    /// dμ_φ at each node.
    pub fn volume_weights(&self) -> &[f64] {
        &self.volume_weights
    }

    pub fn scalar(&self) -> &[f64] {
        &self.scalar
    }

    pub fn sbar(&self) -> f64 {
        SBAR
    }

    /// Coefficient a_φ with ω_φ = a_φ · i dz∧dz̄ in the chart of each node
    /// (z for |z| ≤ 1, 1/z otherwise).
    pub fn a_phi(&self) -> Vec<f64> {
        (0..self.grid.len())
            .map(|idx| {
                let (i, _) = self.grid.row_col(idx);
                let u = self.grid.u(i);
                let c = if u <= 0.5 { 1.0 - u } else { u };
                self.density[idx] * c * c / (2.0 * std::f64::consts::PI)
            })
            .collect()
    }

    pub fn integrate(&self, f: &[f64]) -> f64 {
        f.iter().zip(&self.volume_weights).map(|(f, w)| f * w).sum()
    }

    pub fn volume(&self) -> f64 {
        self.volume_weights.iter().sum()
    }

    /// Δ_φ f = −(1/(2π a_φ)) ∂∂̄ f = −L f / w (nonnegative spectrum).
    pub fn laplace(&self, f: &[f64]) -> Vec<f64> {
        self.grid
            .laplacian(f)
            .iter()
            .zip(&self.density)
            .map(|(l, w)| -l / w)
            .collect()
    }

    /// |∇f|² in g_φ, normalized so that ∫ f Δ_φ f dμ_φ = ∫ |∇f|² dμ_φ.
    pub fn grad_norm_sq(&self, f: &[f64]) -> Vec<f64> {
        self.grid
            .grad_sq(f)
            .iter()
            .zip(&self.density)
            .map(|(g, w)| g / w)
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::grid::{build_grid, GridMode};
    use proptest::prelude::*;

    fn bump(g: &Arc<QuadGrid>) -> Potential {
        Potential::monomial(g, &[0.0, 0.05, -0.04, 0.03, -0.02])
    }

    #[test]
    fn fubini_study_curvature_is_two() {
        for mode in [GridMode::Radial, GridMode::Full2d] {
            let g = build_grid(mode, 32).unwrap();
            let m = metric_data(&Potential::zero(&g)).unwrap();
            assert!(m.scalar().iter().all(|s| (s - 2.0).abs() <= 1e-10));
        }
    }

    #[test]
    fn constant_shift_gives_same_metric() {
        let g = build_grid(GridMode::Radial, 32).unwrap();
        let a = metric_data(&Potential::zero(&g)).unwrap();
        let b = metric_data(&Potential::constant(&g, 0.7)).unwrap();
        // Equal up to roundoff amplified by the spectral Laplacian.
        for (x, y) in a.density().iter().zip(b.density()) {
            assert!((x - y).abs() < 1e-11);
        }
        for (x, y) in a.scalar().iter().zip(b.scalar()) {
            assert!((x - y).abs() < 1e-8, "{}", x - y);
        }
    }

    #[test]
    fn a_phi_at_fs_is_closed_form() {
        let g = build_grid(GridMode::Full2d, 16).unwrap();
        let m = metric_data(&Potential::zero(&g)).unwrap();
        let a = m.a_phi();
        for idx in 0..g.len() {
            let (_, z) = g.chart_point(idx);
            let want = 1.0 / (2.0 * std::f64::consts::PI * (1.0 + z.norm_sqr()).powi(2));
            assert!((a[idx] - want).abs() < 1e-13);
        }
    }

    #[test]
    fn non_kahler_rejected() {
        let g = build_grid(GridMode::Radial, 32).unwrap();
        // Lφ for φ = c·x is −2c x; c = 1 makes 1 + Lφ negative near x = 1.
        let phi = Potential::from_fn(&g, |x, _| x).unwrap();
        assert!(matches!(metric_data(&phi), Err(Error::NonKahler { .. })));
    }

    #[test]
    fn gauss_bonnet_and_volume_on_bump() {
        let g = build_grid(GridMode::Radial, 128).unwrap();
        let m = metric_data(&bump(&g)).unwrap();
        assert!((m.volume() - 1.0).abs() < 1e-12);
        assert!((m.integrate(m.scalar()) - 2.0).abs() < 1e-10);
    }

    #[test]
    fn laplacian_self_adjoint_2d() {
        let g = build_grid(GridMode::Full2d, 32).unwrap();
        let phi = Potential::from_fn(&g, |x, t| {
            0.03 * x * x + 0.02 * (1.0 - x * x) * (t.cos() + 0.5 * (2.0 * t).sin())
        })
        .unwrap();
        let m = metric_data(&phi).unwrap();
        let uf = Potential::from_fn(&g, |x, t| (0.5 * x).sin() + (1.0 - x * x).sqrt() * t.sin())
            .unwrap();
        let vf = Potential::from_fn(&g, |x, t| x.powi(3) + 0.3 * (1.0 - x * x) * (2.0 * t).cos())
            .unwrap();
        let a = m.integrate(
            &uf.values()
                .iter()
                .zip(m.laplace(vf.values()))
                .map(|(u, l)| u * l)
                .collect::<Vec<_>>(),
        );
        let b = m.integrate(
            &vf.values()
                .iter()
                .zip(m.laplace(uf.values()))
                .map(|(v, l)| v * l)
                .collect::<Vec<_>>(),
        );
        assert!((a - b).abs() <= 1e-7 * a.abs().max(b.abs()));
        // and ∫Δu dμ = 0, ∫|∇u|² = ∫ u Δu
        assert!(m.integrate(&m.laplace(uf.values())).abs() < 1e-12);
        let g2 = m.integrate(&m.grad_norm_sq(uf.values()));
        let ul = m.integrate(
            &uf.values()
                .iter()
                .zip(m.laplace(uf.values()))
                .map(|(u, l)| u * l)
                .collect::<Vec<_>>(),
        );
        assert!((g2 - ul).abs() < 1e-8 * ul.abs());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn invariants_on_random_bumps(c in proptest::collection::vec(-0.05f64..0.05, 4)) {
            let g = build_grid(GridMode::Radial, 64).unwrap();
            let phi = Potential::monomial(&g, &[0.0, c[0], c[1], c[2], c[3]]);
            let m = metric_data(&phi).unwrap();
            prop_assert!((m.volume() - 1.0).abs() < 1e-8);
            prop_assert!((m.integrate(m.scalar()) - 2.0).abs() < 1e-8);
            prop_assert!(m.a_phi().iter().all(|&a| a > 0.0));
        }
    }
}
