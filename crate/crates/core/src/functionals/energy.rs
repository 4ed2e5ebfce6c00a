use std::sync::Arc;

use crate::error::Result;
use crate::geometry::{metric_data, Potential, QuadGrid, Twist};
use crate::quantization::{bergman_with_metric, fs, hilb_with_metric, psi_potential, Factorization, HermForm};

use super::ik::i_k;
use super::isigma::{i_sigma_k, PathChoice, SRule};

/// L_kσ(φ) = I_k(Hilb_k φ) + I_kσ(φ).
pub fn l_sigma_k(phi: &Potential, k: usize, twist: &Twist) -> Result<f64> {
    let h = hilb_with_metric(phi, &metric_data(phi)?, k)?;
    Ok(i_k(&h) + i_sigma_k(phi, k, twist, &PathChoice::Linear, &SRule::default())?)
}

/// Z_kσ(H) = I_kσ(FS_k H) + I_k(H).
///
/// FS_k carries the 1/N_k normalization, so FS_k(Hilb_k 0) = 0 and no further
/// constant is needed for Z_kσ(Hilb_k 0) = 0.
pub fn z_sigma_k(h: &HermForm, grid: &Arc<QuadGrid>, twist: &Twist) -> Result<f64> {
    let phi = fs(h, grid)?;
    Ok(i_sigma_k(&phi, h.k(), twist, &PathChoice::Linear, &SRule::default())? + i_k(h))
}

/// δL_kσ(φ)(η) = ∫ (k e^{ψ_k} − ρ_k)(kη + Δ_φη) dμ_φ.
pub fn delta_l_sigma(phi: &Potential, eta: &[f64], k: usize, twist: &Twist) -> Result<f64> {
    let grid = phi.grid();
    grid.check_len(eta)?;
    let metric = metric_data(phi)?;
    let rho = bergman_with_metric(phi, &metric, k, Factorization::Cholesky)?;
    let psi = psi_potential(&twist.lift(k), phi, &metric, k)?;
    let kf = k as f64;
    let leta = grid.laplacian(eta);
    let w = metric.density();
    let mu0 = grid.weights();
    Ok((0..grid.len())
        .map(|i| mu0[i] * (kf * psi.values[i].exp() - rho.values[i]) * (kf * w[i] * eta[i] - leta[i]))
        .sum())
}
