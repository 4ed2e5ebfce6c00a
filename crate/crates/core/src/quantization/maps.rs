use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geometry::{metric_data, MetricData, Potential, QuadGrid};

use super::herm::{Factorization, HermForm};
use super::sections::section_basis;

/// ρ_k(φ) at the nodes.
#[derive(Clone, Debug, PartialEq)]
pub struct BergmanField {
    pub k: usize,
    pub values: Vec<f64>,
}

/// Hilb_k(φ)_{αβ} = ∫ (s_α, s_β)_{h₀^k} e^{−kφ} dμ_φ.
pub fn hilb(phi: &Potential, k: usize) -> Result<HermForm> {
    let metric = metric_data(phi)?;
    hilb_with_metric(phi, &metric, k)
}

pub fn hilb_with_metric(phi: &Potential, metric: &MetricData, k: usize) -> Result<HermForm> {
    let sb = section_basis(phi.grid(), k)?;
    let kf = k as f64;
    let f: Vec<f64> = phi
        .values()
        .iter()
        .zip(metric.density())
        .map(|(p, w)| (-kf * p).exp() * w)
        .collect();
    HermForm::new(k, sb.gram(&f)?)
}

/// Σ|ŝ_α|²_{h₀^k} for an H-orthonormal basis {ŝ_α}.
pub fn orthonormal_density(h: &HermForm, grid: &Arc<QuadGrid>, how: Factorization) -> Result<Vec<f64>> {
    let sb = section_basis(grid, h.k())?;
    let d = sb.contract(&h.inverse(how))?;
    if d.iter().any(|v| !(*v > 0.0) || !v.is_finite()) {
        return Err(Error::NonFinite("orthonormal density"));
    }
    Ok(d)
}

/// FS_k(H) = (1/k) log((1/N_k) Σ|ŝ_α|²_{h₀^k}).
pub fn fs(h: &HermForm, grid: &Arc<QuadGrid>) -> Result<Potential> {
    fs_with(h, grid, Factorization::Cholesky)
}

pub fn fs_with(h: &HermForm, grid: &Arc<QuadGrid>, how: Factorization) -> Result<Potential> {
    let n = h.dim() as f64;
    let k = h.k() as f64;
    let d = orthonormal_density(h, grid, how)?;
    Potential::new(grid.clone(), d.iter().map(|v| (v / n).ln() / k).collect())
}

/// ρ_k(φ) = Σ|ŝ_α|²_{h^k} for a Hilb_k(φ)-orthonormal basis, h = e^{−φ}h₀.
pub fn bergman(phi: &Potential, k: usize) -> Result<BergmanField> {
    let metric = metric_data(phi)?;
    bergman_with_metric(phi, &metric, k, Factorization::Cholesky)
}

pub fn bergman_with_metric(
    phi: &Potential,
    metric: &MetricData,
    k: usize,
    how: Factorization,
) -> Result<BergmanField> {
    let h = hilb_with_metric(phi, metric, k)?;
    let d = orthonormal_density(&h, phi.grid(), how)?;
    let kf = k as f64;
    let values = d
        .iter()
        .zip(phi.values())
        .map(|(d, p)| d * (-kf * p).exp())
        .collect();
    Ok(BergmanField { k, values })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_grid, AutomorphismLift, GridMode};
    use proptest::prelude::*;

    fn nonradial(g: &Arc<QuadGrid>) -> Potential {
        Potential::from_fn(g, |x, t| {
            let u = 0.5 * (1.0 + x);
            0.03 * u - 0.02 * u * u
                + 0.015 * (1.0 - x * x).sqrt() * (t.cos() - 0.5 * t.sin())
                + 0.01 * (1.0 - x * x) * (2.0 * t).cos()
        })
        .unwrap()
    }

    #[test]
    fn hilb_of_zero_is_beta_diagonal() {
        for mode in [GridMode::Radial, GridMode::Full2d] {
            let g = build_grid(mode, 24).unwrap();
            for k in [1, 2, 5, 11] {
                let h = hilb(&Potential::zero(&g), k).unwrap();
                let b = HermForm::base(k);
                let err = (h.entries() - b.entries()).norm();
                assert!(err < 1e-14, "{mode:?} k={k} err={err}");
            }
        }
    }

    #[test]
    fn hilb_constant_scaling() {
        let g = build_grid(GridMode::Radial, 32).unwrap();
        let k = 6;
        let c = 0.3;
        let h = hilb(&Potential::constant(&g, c), k).unwrap();
        let want = HermForm::base(k).scaled((-(k as f64) * c).exp()).unwrap();
        let rel = (h.entries() - want.entries()).norm() / want.entries().norm();
        assert!(rel < 1e-12);
    }

    #[test]
    fn fs_of_base_is_zero() {
        for mode in [GridMode::Radial, GridMode::Full2d] {
            let g = build_grid(mode, 20).unwrap();
            for k in 1..=16 {
                if mode == GridMode::Full2d && k >= 20 {
                    continue;
                }
                let p = fs(&HermForm::base(k), &g).unwrap();
                assert!(p.values().iter().all(|v| v.abs() <= 1e-12), "k={k}");
            }
        }
    }

    #[test]
    fn fs_scaling() {
        let g = build_grid(GridMode::Full2d, 16).unwrap();
        let k = 5;
        let h = hilb(&nonradial(&g), k).unwrap();
        let c: f64 = 2.5;
        let a = fs(&h, &g).unwrap();
        let b = fs(&h.scaled(c).unwrap(), &g).unwrap();
        for (x, y) in a.values().iter().zip(b.values()) {
            assert!((y - (x - c.ln() / k as f64)).abs() < 1e-13);
        }
    }

    #[test]
    fn fs_independent_of_factorization() {
        let g = build_grid(GridMode::Full2d, 16).unwrap();
        let h = hilb(&nonradial(&g), 7).unwrap();
        let a = fs_with(&h, &g, Factorization::Cholesky).unwrap();
        let b = fs_with(&h, &g, Factorization::Eigen).unwrap();
        assert!(a.sup_distance(&b) < 1e-12);
    }

    #[test]
    fn bergman_of_zero_is_constant() {
        let g = build_grid(GridMode::Radial, 64).unwrap();
        for k in 1..=16 {
            let r = bergman(&Potential::zero(&g), k).unwrap();
            assert!(r.values.iter().all(|v| (v - (k + 1) as f64).abs() <= 1e-8));
        }
    }

    #[test]
    fn quantization_identity_2d() {
        let g = build_grid(GridMode::Full2d, 24).unwrap();
        let phi = nonradial(&g);
        let m = metric_data(&phi).unwrap();
        for k in [4, 8] {
            let h = hilb_with_metric(&phi, &m, k).unwrap();
            let lhs = fs_with(&h, &g, Factorization::Cholesky).unwrap();
            let rho = bergman_with_metric(&phi, &m, k, Factorization::Eigen).unwrap();
            let n = (k + 1) as f64;
            for idx in 0..g.len() {
                let rhs = phi.values()[idx] + (rho.values[idx] / n).ln() / k as f64;
                assert!((lhs.values()[idx] - rhs).abs() <= 1e-9);
            }
            assert!((m.integrate(&rho.values) - n).abs() < 1e-8);
        }
    }

    #[test]
    fn rotation_equivariance() {
        let g = build_grid(GridMode::Full2d, 16).unwrap();
        let phi = nonradial(&g);
        let alpha = 2.0 * std::f64::consts::PI * 3.0 / g.n_theta() as f64;
        let r = AutomorphismLift::rotation(alpha);
        let rotated = Potential::new(g.clone(), r.pullback(&phi)).unwrap();
        let k = 5;
        let h = hilb(&phi, k).unwrap();
        let hr = hilb(&rotated, k).unwrap();
        // Hilb(φ∘R) = M† Hilb(φ) M with M = diag(e^{ijα}) the section action of R.
        let want = h.congruence(&r.section_matrix(k)).unwrap();
        assert!((hr.entries() - want.entries()).norm() < 1e-12);
        // Isometric lifts are unitary for Hilb(0).
        let b = HermForm::base(k);
        let m = r.section_matrix(k);
        assert!((b.congruence(&m).unwrap().entries() - b.entries()).norm() < 1e-15);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]
        #[test]
        fn hilb_pd_and_bergman_trace(c in proptest::collection::vec(-0.05f64..0.05, 4), k in 1usize..20) {
            let g = build_grid(GridMode::Radial, 64).unwrap();
            let phi = Potential::monomial(&g, &[0.0, c[0], c[1], c[2], c[3]]);
            let m = metric_data(&phi).unwrap();
            let h = hilb_with_metric(&phi, &m, k).unwrap();
            prop_assert!(h.min_eigenvalue() > 0.0);
            prop_assert!(h.off_diagonal_ratio() == 0.0);
            let rho = bergman_with_metric(&phi, &m, k, Factorization::Cholesky).unwrap();
            prop_assert!(rho.values.iter().all(|&v| v > 0.0));
            prop_assert!((m.integrate(&rho.values) - (k + 1) as f64).abs() <= 1e-8);
        }
    }
}
