use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Relative asymmetry tolerated (and then symmetrized away) on input.
const HERMITIAN_TOL: f64 = 1e-10;

/// How an H-orthonormal basis is produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Factorization {
    /// H = LL†, orthonormal sections L^{-1}s.
    Cholesky,
    /// H = UΛU†, orthonormal sections Λ^{-1/2}U†s.
    Eigen,
}

/// Positive-definite Hermitian form on H⁰(O(k)), H_{αβ} = ⟨s_α, s_β⟩.
#[derive(Clone, Debug, PartialEq)]
pub struct HermForm {
    k: usize,
    m: DMatrix<Complex64>,
}

/// log(j!(k−j)!/(k+1)!), the diagonal of Hilb_k(0).
pub fn log_base_entry(k: usize, j: usize) -> f64 {
    let lf = |n: usize| (2..=n).map(|i| (i as f64).ln()).sum::<f64>();
    lf(j) + lf(k - j) - lf(k + 1)
}

impl HermForm {
    pub fn new(k: usize, m: DMatrix<Complex64>) -> Result<Self> {
        if k == 0 {
            return Err(Error::Degree(k));
        }
        let n = k + 1;
        if m.nrows() != n || m.ncols() != n {
            return Err(Error::Shape {
                got: m.nrows() * m.ncols(),
                want: n * n,
            });
        }
        if m.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::NonFinite("hermitian form"));
        }
        let scale = m.iter().map(|c| c.norm()).fold(0.0, f64::max);
        let asym = (&m - m.adjoint()).iter().map(|c| c.norm()).fold(0.0, f64::max);
        if asym > HERMITIAN_TOL * scale {
            return Err(Error::NotHermitian(asym / scale));
        }
        let m = (&m + m.adjoint()) * Complex64::new(0.5, 0.0);
        // Complex Cholesky in nalgebra never fails on a negative pivot, so test the spectrum.
        if m.clone().symmetric_eigenvalues().iter().any(|&l| !(l > 0.0)) {
            return Err(Error::NotPositiveDefinite { k });
        }
        Ok(HermForm { k, m })
    }

    /// Hilb_k(0): diagonal j!(k−j)!/(k+1)!.
    pub fn base(k: usize) -> Self {
        let d = nalgebra::DVector::from_iterator(
            k + 1,
            (0..=k).map(|j| Complex64::new(log_base_entry(k, j).exp(), 0.0)),
        );
        HermForm {
            k,
            m: DMatrix::from_diagonal(&d),
        }
    }

    pub fn from_real_diagonal(k: usize, d: &[f64]) -> Result<Self> {
        let v = nalgebra::DVector::from_iterator(d.len(), d.iter().map(|&x| Complex64::new(x, 0.0)));
        HermForm::new(k, DMatrix::from_diagonal(&v))
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn dim(&self) -> usize {
        self.k + 1
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.m
    }

    pub fn scaled(&self, c: f64) -> Result<Self> {
        HermForm::new(self.k, &self.m * Complex64::new(c, 0.0))
    }

    pub fn cholesky_factor(&self) -> DMatrix<Complex64> {
        self.m
            .clone()
            .cholesky()
            .expect("validated positive definite")
            .l()
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.m.symmetric_eigenvalues().iter().cloned().collect();
        v.sort_by(f64::total_cmp);
        v
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues()[0]
    }

    pub fn log_det(&self) -> f64 {
        let l = self.cholesky_factor();
        (0..self.dim()).map(|j| 2.0 * l[(j, j)].re.ln()).sum()
    }

    /// H^{-1}, computed through the chosen factorization.
    pub fn inverse(&self, how: Factorization) -> DMatrix<Complex64> {
        match how {
            Factorization::Cholesky => {
                let l = self.cholesky_factor();
                let linv = l
                    .solve_lower_triangular(&DMatrix::identity(self.dim(), self.dim()))
                    .expect("nonsingular factor");
                linv.adjoint() * linv
            }
            Factorization::Eigen => {
                let e = self.m.clone().symmetric_eigen();
                let d = nalgebra::DVector::from_iterator(
                    self.dim(),
                    e.eigenvalues.iter().map(|&l| Complex64::new(1.0 / l, 0.0)),
                );
                &e.eigenvectors * DMatrix::from_diagonal(&d) * e.eigenvectors.adjoint()
            }
        }
    }

    /// Largest off-diagonal modulus relative to the largest diagonal entry.
    pub fn off_diagonal_ratio(&self) -> f64 {
        let n = self.dim();
        let diag = (0..n).map(|j| self.m[(j, j)].norm()).fold(0.0, f64::max);
        let mut off: f64 = 0.0;
        for a in 0..n {
            for b in 0..n {
                if a != b {
                    off = off.max(self.m[(a, b)].norm());
                }
            }
        }
        off / diag
    }

    /// M† H M, the form transported by a section action M.
    pub fn congruence(&self, m: &DMatrix<Complex64>) -> Result<Self> {
        HermForm::new(self.k, m.adjoint() * &self.m * m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn base_matches_beta_integrals() {
        let b = HermForm::base(2);
        let want = [1.0 / 3.0, 1.0 / 6.0, 1.0 / 3.0];
        for (j, w) in want.iter().enumerate() {
            assert!((b.entries()[(j, j)].re - w).abs() < 1e-15);
        }
    }

    #[test]
    fn rejects_indefinite_and_non_hermitian() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]).map(|x| Complex64::new(x, 0.0));
        assert!(matches!(
            HermForm::new(1, m),
            Err(Error::NotPositiveDefinite { .. })
        ));
        let mut m = DMatrix::<Complex64>::identity(2, 2);
        m[(0, 1)] = Complex64::new(0.0, 0.1);
        assert!(matches!(HermForm::new(1, m), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn inverses_agree() {
        let mut m = DMatrix::<Complex64>::identity(3, 3) * Complex64::new(2.0, 0.0);
        m[(0, 1)] = Complex64::new(0.3, 0.4);
        m[(1, 0)] = Complex64::new(0.3, -0.4);
        m[(1, 2)] = Complex64::new(-0.2, 0.1);
        m[(2, 1)] = Complex64::new(-0.2, -0.1);
        let h = HermForm::new(2, m.clone()).unwrap();
        let a = h.inverse(Factorization::Cholesky);
        let b = h.inverse(Factorization::Eigen);
        assert!((&a - &b).norm() < 1e-14);
        assert!((a * m - DMatrix::identity(3, 3)).norm() < 1e-14);
    }

    #[test]
    fn log_det_scaling() {
        let h = HermForm::base(5);
        let c: f64 = 3.0;
        let d = h.scaled(c).unwrap().log_det() - h.log_det();
        assert!((d - 6.0 * c.ln()).abs() < 1e-13);
    }
}
