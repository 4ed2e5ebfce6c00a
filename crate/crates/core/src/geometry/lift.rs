use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::grid::QuadGrid;
use super::potential::Potential;
use super::vector_field::VectorFieldSpec;

/// Time normalization c₀ in σ_k(t) = exp(t·c₀V/k) that makes kψ_k → (θ + S̄)/2
/// under the conventions of this crate.
pub const C0_CALIBRATED: f64 = 1.0 / (8.0 * PI);

/// Linear automorphism σ(z) = c·z of CP¹ with its lift to H⁰(O(k)).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AutomorphismLift {
    scale: Complex64,
}

impl AutomorphismLift {
    pub fn identity() -> Self {
        AutomorphismLift {
            scale: Complex64::new(1.0, 0.0),
        }
    }

    pub fn from_scale(scale: Complex64) -> Self {
        assert!(scale.norm() > 0.0, "automorphism scale must be nonzero");
        AutomorphismLift { scale }
    }

    /// z ↦ e^{s} z.
    pub fn dilation(s: f64) -> Self {
        Self::from_scale(Complex64::new(s.exp(), 0.0))
    }

    /// z ↦ e^{iα} z, an isometry of ω₀.
    pub fn rotation(alpha: f64) -> Self {
        Self::from_scale(Complex64::from_polar(1.0, alpha))
    }

    pub fn scale(&self) -> Complex64 {
        self.scale
    }

    pub fn is_identity(&self) -> bool {
        self.scale == Complex64::new(1.0, 0.0)
    }

    pub fn is_isometry(&self) -> bool {
        (self.scale.norm() - 1.0).abs() < 1e-15
    }

    pub fn point_map(&self, z: Complex64) -> Complex64 {
        self.scale * z
    }

    pub fn compose(&self, other: &AutomorphismLift) -> AutomorphismLift {
        AutomorphismLift {
            scale: self.scale * other.scale,
        }
    }

    pub fn inverse(&self) -> AutomorphismLift {
        AutomorphismLift {
            scale: self.scale.inv(),
        }
    }

    /// Pullback on the monomial basis: σ*z^j = c^j z^j.
    pub fn section_matrix(&self, k: usize) -> DMatrix<Complex64> {
        DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            k + 1,
            (0..=k).map(|j| self.scale.powu(j as u32)),
        ))
    }

    /// c_σ with σ*ω₀ = ω₀ + (i/2π)∂∂̄c_σ: log((1+|c|²t)/(1+t)) = log(1 − u + |c|²u).
    pub fn base_potential(&self, grid: &QuadGrid) -> Vec<f64> {
        let c2 = self.scale.norm_sqr();
        grid.expand_rows(|i| {
            let u = grid.u(i);
            (1.0 - u + c2 * u).ln()
        })
    }

    /// x-coordinate of σ(p) for each latitude row.
    pub fn mapped_x(&self, grid: &QuadGrid) -> Vec<f64> {
        let c2 = self.scale.norm_sqr();
        (0..grid.n_x())
            .map(|i| {
                let u = grid.u(i);
                2.0 * c2 * u / (1.0 - u + c2 * u) - 1.0
            })
            .collect()
    }

    /// φ∘σ at the nodes.
    pub fn pullback(&self, phi: &Potential) -> Vec<f64> {
        if self.is_identity() {
            return phi.values().to_vec();
        }
        let grid = phi.grid();
        grid.synthesize_mapped(&phi.spectrum(), &self.mapped_x(grid), self.scale.arg())
    }

    /// σ*dμ₀ / dμ₀ = |c|² / (1 − u + |c|²u)².
    pub fn jacobian(&self, grid: &QuadGrid) -> Vec<f64> {
        let c2 = self.scale.norm_sqr();
        grid.expand_rows(|i| {
            let u = grid.u(i);
            c2 / (1.0 - u + c2 * u).powi(2)
        })
    }
}

/// σ_k(t): the time-t flow of c₀V/k.
pub fn sigma_lift(v: &VectorFieldSpec, k: usize, t: f64, c0: f64) -> AutomorphismLift {
    if v.is_zero() || t == 0.0 {
        return AutomorphismLift::identity();
    }
    AutomorphismLift::dilation(c0 * v.amplitude() * t / k as f64)
}

/// The twist family σ_k = σ_k(1) used by the functionals, one per degree k.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Twist {
    pub field: VectorFieldSpec,
    pub c0: f64,
}

impl Twist {
    pub fn identity() -> Self {
        Twist {
            field: VectorFieldSpec::zero(),
            c0: C0_CALIBRATED,
        }
    }

    pub fn gradient(amplitude: f64) -> Self {
        Twist {
            field: VectorFieldSpec::rotation_gradient(amplitude),
            c0: C0_CALIBRATED,
        }
    }

    pub fn with_c0(self, c0: f64) -> Self {
        Twist { c0, ..self }
    }

    pub fn is_identity(&self) -> bool {
        self.field.is_zero()
    }

    pub fn lift(&self, k: usize) -> AutomorphismLift {
        sigma_lift(&self.field, k, 1.0, self.c0)
    }
}
