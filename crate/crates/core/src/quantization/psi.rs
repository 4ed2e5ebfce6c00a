use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geometry::{AutomorphismLift, MetricData, Potential, QuadGrid, VectorFieldSpec};

/// ψ_{σ,φ}: potential of σ*ω_φ − ω_φ, normalized by ∫e^ψ dμ_φ = N_k/k.
#[derive(Clone, Debug, PartialEq)]
pub struct PsiField {
    pub k: usize,
    pub values: Vec<f64>,
    pub lift: AutomorphismLift,
}

/// ψ = c_σ + φ∘σ − φ + C, built from the exact pullback.
pub fn psi_potential(
    lift: &AutomorphismLift,
    phi: &Potential,
    metric: &MetricData,
    k: usize,
) -> Result<PsiField> {
    if k == 0 {
        return Err(Error::Degree(k));
    }
    let grid = phi.grid();
    let raw: Vec<f64> = if lift.is_identity() {
        vec![0.0; grid.len()]
    } else {
        let c = lift.base_potential(grid);
        let pulled = lift.pullback(phi);
        (0..grid.len())
            .map(|i| c[i] + pulled[i] - phi.values()[i])
            .collect()
    };
    let z = metric.integrate(&raw.iter().map(|p| p.exp()).collect::<Vec<_>>());
    if !z.is_finite() || z <= 0.0 {
        return Err(Error::NonFinite("psi normalization"));
    }
    let shift = ((k + 1) as f64 / k as f64).ln() - z.ln();
    Ok(PsiField {
        k,
        values: raw.iter().map(|p| p + shift).collect(),
        lift: *lift,
    })
}

impl PsiField {
    pub fn exp(&self) -> Vec<f64> {
        self.values.iter().map(|p| p.exp()).collect()
    }

    /// |∫e^ψ dμ_φ − N_k/k|.
    pub fn normalization_error(&self, metric: &MetricData) -> f64 {
        let n = (self.k + 1) as f64 / self.k as f64;
        (metric.integrate(&self.exp()) - n).abs()
    }

    /// sup |Lψ − (σ*ω_φ − ω_φ)/dμ₀| relative to sup of the right-hand side (or 1).
    pub fn curvature_residual(&self, phi: &Potential, metric: &MetricData) -> f64 {
        let grid = phi.grid();
        let lpsi = grid.laplacian(&self.values);
        let lphi = grid.analyze_smooth(phi.values()).laplacian();
        let w_mapped: Vec<f64> = grid
            .synthesize_mapped(&lphi, &self.lift.mapped_x(grid), self.lift.scale().arg())
            .iter()
            .map(|l| 1.0 + l)
            .collect();
        let jac = self.lift.jacobian(grid);
        let mut worst: f64 = 0.0;
        let mut scale: f64 = 1.0;
        for i in 0..grid.len() {
            let rhs = w_mapped[i] * jac[i] - metric.density()[i];
            scale = scale.max(rhs.abs());
            worst = worst.max((lpsi[i] - rhs).abs());
        }
        worst / scale
    }
}

/// Numerically calibrates c₀ in σ_k = exp(c₀V/k) so that kψ_k → (θ + 2)/2 at φ = 0.
///
/// Regresses kψ_k on θ(0) for a unit probe constant at two large k and
/// Richardson-extrapolates the slope; the calibrated c₀ makes the slope ½.
pub fn calibrate_c0(grid: &Arc<QuadGrid>) -> Result<f64> {
    let v = VectorFieldSpec::rotation_gradient(1.0);
    let phi = Potential::zero(grid);
    let metric = crate::geometry::metric_data(&phi)?;
    let theta = crate::geometry::holomorphy_potential(&v, &phi, &metric)?;
    let slope = |k: usize| -> Result<f64> {
        let lift = crate::geometry::sigma_lift(&v, k, 1.0, 1.0);
        let psi = psi_potential(&lift, &phi, &metric, k)?;
        let y: Vec<f64> = psi.values.iter().map(|p| k as f64 * p).collect();
        let (my, mt) = (grid.integrate(&y), grid.integrate(&theta));
        let cov: Vec<f64> = y.iter().zip(&theta).map(|(y, t)| (y - my) * (t - mt)).collect();
        let var: Vec<f64> = theta.iter().map(|t| (t - mt) * (t - mt)).collect();
        Ok(grid.integrate(&cov) / grid.integrate(&var))
    };
    let (k1, k2) = (2048, 4096);
    let beta = 2.0 * slope(k2)? - slope(k1)?;
    Ok(1.0 / (2.0 * beta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_grid, holomorphy_potential, metric_data, GridMode, Twist, C0_CALIBRATED};

    #[test]
    fn identity_gives_constant() {
        let g = build_grid(GridMode::Radial, 32).unwrap();
        let phi = Potential::monomial(&g, &[0.0, 0.03, -0.02]);
        let m = metric_data(&phi).unwrap();
        for k in [1, 4, 9] {
            let p = psi_potential(&AutomorphismLift::identity(), &phi, &m, k).unwrap();
            let want = ((k + 1) as f64 / k as f64).ln();
            assert!(p.values.iter().all(|v| (v - want).abs() < 1e-14));
        }
    }

    #[test]
    fn dilation_at_fs_is_pulled_back_potential() {
        let g = build_grid(GridMode::Radial, 64).unwrap();
        let phi = Potential::zero(&g);
        let m = metric_data(&phi).unwrap();
        let s = 0.2;
        let k = 3;
        let p = psi_potential(&AutomorphismLift::dilation(s), &phi, &m, k).unwrap();
        // ψ − log((1+e^{2s}r²)/(1+r²)) must be constant.
        let diffs: Vec<f64> = (0..g.len())
            .map(|i| {
                let u = g.u(i);
                let t = u / (1.0 - u);
                p.values[i] - ((1.0 + (2.0 * s).exp() * t) / (1.0 + t)).ln()
            })
            .collect();
        let spread = diffs.iter().cloned().fold(f64::MIN, f64::max)
            - diffs.iter().cloned().fold(f64::MAX, f64::min);
        assert!(spread < 1e-13);
        assert!(p.normalization_error(&m) < 1e-13);
    }

    #[test]
    fn invariants_on_twisted_bump() {
        for mode in [GridMode::Radial, GridMode::Full2d] {
            let g = build_grid(mode, 64).unwrap();
            let phi = Potential::from_fn(&g, |x, t| {
                let u = 0.5 * (1.0 + x);
                0.05 * u - 0.04 * u * u
                    + if mode == GridMode::Full2d {
                        0.01 * (1.0 - x * x).sqrt() * t.cos()
                    } else {
                        0.0
                    }
            })
            .unwrap();
            let m = metric_data(&phi).unwrap();
            let lift = AutomorphismLift::from_scale(num_complex::Complex64::from_polar(1.3, 0.4));
            let p = psi_potential(&lift, &phi, &m, 6).unwrap();
            assert!(p.normalization_error(&m) <= 1e-8);
            assert!(p.curvature_residual(&phi, &m) <= 1e-8, "{mode:?}");
        }
    }

    #[test]
    fn calibration_constant() {
        let g = build_grid(GridMode::Radial, 64).unwrap();
        let c0 = calibrate_c0(&g).unwrap();
        assert!((c0 - C0_CALIBRATED).abs() < 1e-6 * C0_CALIBRATED, "{c0}");
    }

    #[test]
    fn psi_expansion_decays() {
        let g = build_grid(GridMode::Radial, 128).unwrap();
        let phi = Potential::monomial(&g, &[0.0, 0.05, -0.04, 0.03, -0.02]);
        let m = metric_data(&phi).unwrap();
        let tw = Twist::gradient(1.0);
        let theta = holomorphy_potential(&tw.field, &phi, &m).unwrap();
        let err = |k: usize| {
            let p = psi_potential(&tw.lift(k), &phi, &m, k).unwrap();
            p.values
                .iter()
                .zip(&theta)
                .map(|(p, t)| (k as f64 * p - (t + 2.0) / 2.0).abs())
                .fold(0.0, f64::max)
        };
        let (a, b) = (err(16), err(64));
        assert!(b < a / 3.0, "{a} {b}");
    }
}
