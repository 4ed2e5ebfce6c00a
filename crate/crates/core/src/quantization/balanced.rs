use crate::error::{Error, Result};
use crate::functionals::l_sigma_k;
use crate::geometry::{metric_data, Potential, Twist};

use super::herm::Factorization;
use super::maps::{fs, hilb_with_metric, orthonormal_density};
use super::psi::psi_potential;

/// One line of the iteration log.
#[derive(Clone, Debug, PartialEq)]
pub struct IterationRecord {
    pub iter: usize,
    pub residual: f64,
    pub min_eigenvalue: f64,
    /// L_kσ at the iterate.
    pub energy: f64,
}

#[derive(Clone, Debug)]
pub struct IterationOutcome {
    pub potential: Potential,
    pub log: Vec<IterationRecord>,
    pub converged: bool,
}

impl IterationOutcome {
    pub fn iterations(&self) -> usize {
        self.log.last().map(|r| r.iter).unwrap_or(0)
    }

    /// Iteration log as CSV with header `iter,residual,min_eigenvalue,energy`.
    pub fn log_csv(&self) -> String {
        let mut s = String::from("iter,residual,min_eigenvalue,energy\n");
        for r in &self.log {
            s.push_str(&format!(
                "{},{:e},{:e},{:e}\n",
                r.iter, r.residual, r.min_eigenvalue, r.energy
            ));
        }
        s
    }
}

/// sup |ρ_k(φ) − k e^{ψ_k(φ)}|; zero exactly at σ_k-balanced potentials.
pub fn balanced_residual(phi: &Potential, k: usize, twist: &Twist) -> Result<f64> {
    let metric = metric_data(phi)?;
    let h = hilb_with_metric(phi, &metric, k)?;
    let psi = psi_potential(&twist.lift(k), phi, &metric, k)?;
    residual_from(phi, &h, &psi.values, k)
}

fn residual_from(phi: &Potential, h: &super::HermForm, psi: &[f64], k: usize) -> Result<f64> {
    let d = orthonormal_density(h, phi.grid(), Factorization::Cholesky)?;
    let kf = k as f64;
    Ok((0..d.len())
        .map(|i| (d[i] * (-kf * phi.values()[i]).exp() - kf * psi[i].exp()).abs())
        .fold(0.0, f64::max))
}

/// Fixed-point iteration φ ↦ FS(Hilb φ) − ψ_k(φ)/k, mean-normalized against dμ₀.
///
/// Fixed points satisfy ρ_k(φ) = k e^{ψ_k(φ)}; at σ = id this is Donaldson's T_k map.
/// Running out of iterations is reported through `converged`, not as an error.
pub fn sigma_balanced_iterate(
    phi0: &Potential,
    k: usize,
    twist: &Twist,
    max_iter: usize,
    tol: f64,
) -> Result<IterationOutcome> {
    let lift = twist.lift(k);
    let mut phi = phi0.clone();
    let mut log = Vec::new();
    for iter in 0..=max_iter {
        let abort = |e: Error| Error::Aborted {
            iter,
            reason: e.to_string(),
        };
        let metric = metric_data(&phi).map_err(abort)?;
        let h = hilb_with_metric(&phi, &metric, k).map_err(abort)?;
        let psi = psi_potential(&lift, &phi, &metric, k).map_err(abort)?;
        let residual = residual_from(&phi, &h, &psi.values, k).map_err(abort)?;
        let energy = l_sigma_k(&phi, k, twist).map_err(abort)?;
        log.push(IterationRecord {
            iter,
            residual,
            min_eigenvalue: h.min_eigenvalue(),
            energy,
        });
        if residual <= tol {
            return Ok(IterationOutcome {
                potential: phi,
                log,
                converged: true,
            });
        }
        if iter == max_iter {
            break;
        }
        let next = fs(&h, phi.grid()).map_err(abort)?;
        phi = next.add(&psi.values, -1.0 / k as f64).mean_normalized();
    }
    Ok(IterationOutcome {
        potential: phi,
        log,
        converged: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_grid, GridMode};

    #[test]
    fn fubini_study_is_balanced() {
        let g = build_grid(GridMode::Radial, 32).unwrap();
        for k in [1, 3, 8] {
            let r = balanced_residual(&Potential::zero(&g), k, &Twist::identity()).unwrap();
            assert!(r <= 1e-8);
        }
        let out = sigma_balanced_iterate(&Potential::zero(&g), 8, &Twist::identity(), 10, 1e-8)
            .unwrap();
        assert!(out.converged);
        assert_eq!(out.iterations(), 0);
    }

    #[test]
    fn perturbation_is_not_balanced() {
        let g = build_grid(GridMode::Radial, 32).unwrap();
        let phi = Potential::monomial(&g, &[0.0, 0.0, 0.03, -0.02, 0.01]);
        assert!(balanced_residual(&phi, 8, &Twist::identity()).unwrap() > 1e-4);
    }

    #[test]
    fn small_budget_reports_non_convergence() {
        let g = build_grid(GridMode::Radial, 32).unwrap();
        let phi = Potential::monomial(&g, &[0.0, 0.0, 0.03, -0.02, 0.01]);
        let out = sigma_balanced_iterate(&phi, 8, &Twist::identity(), 2, 1e-8).unwrap();
        assert!(!out.converged);
        assert_eq!(out.log.len(), 3);
        assert!(out.log_csv().starts_with("iter,residual,min_eigenvalue,energy\n"));
    }
}
