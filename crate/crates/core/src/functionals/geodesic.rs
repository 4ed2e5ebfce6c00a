use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::{Potential, QuadGrid, Twist};
use crate::quantization::{fs, hilb, section_basis, HermForm};

use super::energy::z_sigma_k;
use super::isigma::delta_i_sigma;

/// H(s) = B diag(e^{2λ_α s}) B†, with H(0) = BB† = H₀ and H(1) = H₁.
#[derive(Clone, Debug)]
pub struct GeodesicInB {
    k: usize,
    b: DMatrix<Complex64>,
    b_inv: DMatrix<Complex64>,
    lambda: Vec<f64>,
    diagonal: bool,
}

/// Geodesic from H₀ to H₁ by whitening with the Cholesky factor of H₀.
pub fn bk_geodesic(h0: &HermForm, h1: &HermForm) -> Result<GeodesicInB> {
    if h0.k() != h1.k() {
        return Err(Error::Shape {
            got: h1.dim(),
            want: h0.dim(),
        });
    }
    let n = h0.dim();
    let (m0, m1) = (h0.entries(), h1.entries());
    let is_diag = |m: &DMatrix<Complex64>| {
        (0..n).all(|a| (0..n).all(|b| a == b || m[(a, b)] == Complex64::new(0.0, 0.0)))
    };
    let diagonal = is_diag(m0) && is_diag(m1);
    let (b, lambda) = if diagonal {
        let b = DMatrix::from_diagonal(&DVector::from_iterator(
            n,
            (0..n).map(|j| Complex64::new(m0[(j, j)].re.sqrt(), 0.0)),
        ));
        let lambda = (0..n).map(|j| 0.5 * (m1[(j, j)].re / m0[(j, j)].re).ln()).collect();
        (b, lambda)
    } else {
        let l0 = h0.cholesky_factor();
        let l0_inv = l0
            .solve_lower_triangular(&DMatrix::identity(n, n))
            .expect("nonsingular factor");
        let m = &l0_inv * m1 * l0_inv.adjoint();
        let m = (&m + m.adjoint()) * Complex64::new(0.5, 0.0);
        let e = m.symmetric_eigen();
        if e.eigenvalues.iter().any(|&l| !(l > 0.0)) {
            return Err(Error::NotPositiveDefinite { k: h0.k() });
        }
        let lambda = e.eigenvalues.iter().map(|l| 0.5 * l.ln()).collect();
        (l0 * e.eigenvectors, lambda)
    };
    let b_inv = b.clone().try_inverse().ok_or(Error::NotPositiveDefinite { k: h0.k() })?;
    Ok(GeodesicInB {
        k: h0.k(),
        b,
        b_inv,
        lambda,
        diagonal,
    })
}

impl GeodesicInB {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn lambdas(&self) -> &[f64] {
        &self.lambda
    }

    pub fn is_diagonal(&self) -> bool {
        self.diagonal
    }

    /// d_k = (Σ(2λ_α)²)^{1/2}.
    pub fn distance(&self) -> f64 {
        self.lambda.iter().map(|l| 4.0 * l * l).sum::<f64>().sqrt()
    }

    pub fn max_abs_lambda(&self) -> f64 {
        self.lambda.iter().fold(0.0, |a, l| a.max(l.abs()))
    }

    fn weighted(&self, d: impl Fn(f64) -> f64) -> DMatrix<Complex64> {
        let n = self.lambda.len();
        let diag = DMatrix::from_diagonal(&DVector::from_iterator(
            n,
            self.lambda.iter().map(|&l| Complex64::new(d(l), 0.0)),
        ));
        &self.b * diag * self.b.adjoint()
    }

    /// Inverse-side counterpart B^{-†} diag(d(λ)) B^{-1}.
    fn inverse_weighted(&self, d: impl Fn(f64) -> f64) -> DMatrix<Complex64> {
        let n = self.lambda.len();
        let diag = DMatrix::from_diagonal(&DVector::from_iterator(
            n,
            self.lambda.iter().map(|&l| Complex64::new(d(l), 0.0)),
        ));
        self.b_inv.adjoint() * diag * &self.b_inv
    }

    pub fn at(&self, s: f64) -> Result<HermForm> {
        let mut m = self.weighted(|l| (2.0 * l * s).exp());
        if self.diagonal {
            let n = m.nrows();
            for a in 0..n {
                for b in 0..n {
                    if a != b {
                        m[(a, b)] = Complex64::new(0.0, 0.0);
                    }
                }
            }
        }
        HermForm::new(self.k, m)
    }

    /// d/ds FS_k(H(s)) = −(1/k) (s†A's)/(s†As), A = H(s)^{-1}, A' = B^{-†}2λe^{−2λs}B^{-1}.
    pub fn fs_velocity(&self, s: f64, grid: &Arc<QuadGrid>) -> Result<Vec<f64>> {
        let sb = section_basis(grid, self.k)?;
        let a = sb.contract(&self.clean(self.inverse_weighted(|l| (-2.0 * l * s).exp())))?;
        let ap = sb.contract(&self.clean(self.inverse_weighted(|l| 2.0 * l * (-2.0 * l * s).exp())))?;
        let kf = self.k as f64;
        Ok(a.iter().zip(&ap).map(|(a, p)| -p / (kf * a)).collect())
    }

    fn clean(&self, mut m: DMatrix<Complex64>) -> DMatrix<Complex64> {
        if self.diagonal {
            let n = m.nrows();
            for a in 0..n {
                for b in 0..n {
                    if a != b {
                        m[(a, b)] = Complex64::new(0.0, 0.0);
                    }
                }
            }
        }
        m
    }
}

/// Z_kσ(H(s)).
pub fn z_along(geo: &GeodesicInB, s: f64, grid: &Arc<QuadGrid>, twist: &Twist) -> Result<f64> {
    z_sigma_k(&geo.at(s)?, grid, twist)
}

/// dZ_kσ(H(s))/ds = δI_kσ(FS H(s))(d/ds FS H(s)) + 2Σλ_α.
pub fn z_first_variation(geo: &GeodesicInB, s: f64, grid: &Arc<QuadGrid>, twist: &Twist) -> Result<f64> {
    let phi = fs(&geo.at(s)?, grid)?;
    let eta = geo.fs_velocity(s, grid)?;
    let di = delta_i_sigma(&phi, &eta, geo.k, twist)?;
    Ok(di + 2.0 * geo.lambda.iter().sum::<f64>())
}

/// Central second difference of s ↦ Z_kσ(H(s)).
pub fn z_second_derivative_fd(
    geo: &GeodesicInB,
    s: f64,
    h: f64,
    grid: &Arc<QuadGrid>,
    twist: &Twist,
) -> Result<f64> {
    let zp = z_along(geo, s + h, grid, twist)?;
    let z0 = z_along(geo, s, grid, twist)?;
    let zm = z_along(geo, s - h, grid, twist)?;
    Ok((zp - 2.0 * z0 + zm) / (h * h))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FkPrime {
    /// f_k'(0), the derivative of Z_kσ at Hilb(φ_*) toward Hilb(φ).
    pub value: f64,
    /// max_α |λ_α| / k.
    pub lambda_bound: f64,
}

/// f_k'(0) along the geodesic Hilb_k(φ_*) → Hilb_k(φ).
pub fn fk_prime(phi: &Potential, phi_star: &Potential, k: usize, twist: &Twist) -> Result<FkPrime> {
    let geo = bk_geodesic(&hilb(phi_star, k)?, &hilb(phi, k)?)?;
    Ok(FkPrime {
        value: z_first_variation(&geo, 0.0, phi.grid(), twist)?,
        lambda_bound: geo.max_abs_lambda() / k as f64,
    })
}
