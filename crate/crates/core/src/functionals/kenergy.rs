use crate::error::{Error, Result};
use crate::geometry::{holomorphy_potential, metric_data, MetricData, Potential, VectorFieldSpec};

use super::isigma::SRule;

/// Compact group G acting on the model.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GroupSpec {
    Trivial,
    /// The circle generated by JV.
    Circle(VectorFieldSpec),
}

impl GroupSpec {
    pub fn circle() -> Self {
        GroupSpec::Circle(VectorFieldSpec::rotation_gradient(1.0))
    }

    fn check(&self, phi: &Potential) -> Result<()> {
        match self {
            GroupSpec::Trivial => Ok(()),
            GroupSpec::Circle(_) => phi.require_invariant(),
        }
    }
}

/// Ca(φ) = ∫ (S − S̄)² dμ_φ.
pub fn calabi(phi: &Potential) -> Result<f64> {
    let m = metric_data(phi)?;
    let d: Vec<f64> = m.scalar().iter().map(|s| (s - m.sbar()).powi(2)).collect();
    Ok(m.integrate(&d))
}

/// L²(dμ_φ) projection of f onto the Killing potentials of G.
pub fn projection_pi(phi: &Potential, group: &GroupSpec, f: &[f64]) -> Result<Vec<f64>> {
    group.check(phi)?;
    phi.grid().check_len(f)?;
    let m = metric_data(phi)?;
    project_with(&m, phi, group, f)
}

fn project_with(m: &MetricData, phi: &Potential, group: &GroupSpec, f: &[f64]) -> Result<Vec<f64>> {
    match group {
        GroupSpec::Trivial => Ok(vec![0.0; f.len()]),
        GroupSpec::Circle(v) => {
            let theta = holomorphy_potential(v, phi, m)?;
            let tt: Vec<f64> = theta.iter().map(|t| t * t).collect();
            let norm = m.integrate(&tt);
            if norm == 0.0 {
                return Ok(vec![0.0; f.len()]);
            }
            let ft: Vec<f64> = f.iter().zip(&theta).map(|(a, b)| a * b).collect();
            let c = m.integrate(&ft) / norm;
            Ok(theta.iter().map(|t| c * t).collect())
        }
    }
}

fn reduced_with(m: &MetricData, phi: &Potential, group: &GroupSpec) -> Result<Vec<f64>> {
    let s = m.scalar();
    let p = project_with(m, phi, group, s)?;
    Ok(s.iter().zip(&p).map(|(s, p)| s - m.sbar() - p).collect())
}

/// S^G(φ) = S − S̄ − Π^G S.
pub fn reduced_scalar(phi: &Potential, group: &GroupSpec) -> Result<Vec<f64>> {
    group.check(phi)?;
    let m = metric_data(phi)?;
    reduced_with(&m, phi, group)
}

/// E^G(φ) = −∫₀¹ ∫ φ S^G(tφ) dμ_{tφ} dt.
pub fn modified_k_energy(phi: &Potential, group: &GroupSpec) -> Result<f64> {
    group.check(phi)?;
    let rule = SRule::default();
    let mut total = 0.0;
    for (t, w) in rule.nodes.iter().zip(&rule.weights) {
        let p = phi.scaled(*t);
        let m = metric_data(&p)?;
        let sg = reduced_with(&m, &p, group)?;
        let f: Vec<f64> = phi.values().iter().zip(&sg).map(|(a, b)| a * b).collect();
        total -= w * m.integrate(&f);
    }
    if !total.is_finite() {
        return Err(Error::NonFinite("modified K-energy"));
    }
    Ok(total)
}

/// δE^G(φ)(η) = −∫ η S^G(φ) dμ_φ.
pub fn modified_k_energy_differential(phi: &Potential, eta: &[f64], group: &GroupSpec) -> Result<f64> {
    group.check(phi)?;
    phi.grid().check_len(eta)?;
    let m = metric_data(phi)?;
    let sg = reduced_with(&m, phi, group)?;
    let f: Vec<f64> = eta.iter().zip(&sg).map(|(a, b)| a * b).collect();
    Ok(-m.integrate(&f))
}

/// The K-energy, E = E^G for trivial G.
pub fn mabuchi_energy(phi: &Potential) -> Result<f64> {
    modified_k_energy(phi, &GroupSpec::Trivial)
}
