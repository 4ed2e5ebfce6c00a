use rayon::prelude::*;

use crate::error::Result;
use crate::geometry::spectral::gauss_legendre;
use crate::geometry::{metric_data, MetricData, Potential, Twist};
use crate::quantization::{psi_potential, PsiField};

/// Quadrature rule on [0, 1].
#[derive(Clone, Debug, PartialEq)]
pub struct SRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl SRule {
    pub fn gauss(n: usize) -> Self {
        Self::composite(1, n)
    }

    /// `panels` equal sub-intervals with an n-point Gauss–Legendre rule each.
    pub fn composite(panels: usize, n: usize) -> Self {
        let (x, w) = gauss_legendre(n);
        let h = 1.0 / panels as f64;
        let mut nodes = Vec::with_capacity(panels * n);
        let mut weights = Vec::with_capacity(panels * n);
        for p in 0..panels {
            let a = p as f64 * h;
            for (xi, wi) in x.iter().zip(&w) {
                nodes.push(a + 0.5 * h * (xi + 1.0));
                weights.push(0.5 * h * wi);
            }
        }
        SRule { nodes, weights }
    }

    /// The rule mapped onto [a, b].
    pub fn on(&self, a: f64, b: f64) -> Vec<(f64, f64)> {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(s, w)| (a + (b - a) * s, (b - a) * w))
            .collect()
    }
}

impl Default for SRule {
    fn default() -> Self {
        SRule::gauss(32)
    }
}

/// Metric and ψ_k at one potential, shared by every twisted integrand.
pub struct TwistedState {
    pub metric: MetricData,
    pub psi: PsiField,
    pub k: usize,
}

impl TwistedState {
    pub fn new(phi: &Potential, k: usize, twist: &Twist) -> Result<Self> {
        let metric = metric_data(phi)?;
        let psi = psi_potential(&twist.lift(k), phi, &metric, k)?;
        Ok(TwistedState { metric, psi, k })
    }

    /// δI_kσ(φ)(η) = k ∫ η (k + Δ_φ) e^{ψ} dμ_φ = k ∫ (kη + Δ_φη) e^{ψ} dμ_φ.
    pub fn delta_i(&self, eta: &[f64]) -> f64 {
        let grid = self.metric.grid();
        let kf = self.k as f64;
        let leta = grid.laplacian(eta);
        let mu0 = grid.weights();
        let w = self.metric.density();
        kf * (0..grid.len())
            .map(|i| mu0[i] * (kf * w[i] * eta[i] - leta[i]) * self.psi.values[i].exp())
            .sum::<f64>()
    }

    /// (k + Δ_φ) e^{ψ} times the density ratio, i.e. k w e^ψ − L e^ψ.
    pub fn weighted_operator_on_exp_psi(&self) -> Vec<f64> {
        let grid = self.metric.grid();
        let kf = self.k as f64;
        let e = self.psi.exp();
        let le = grid.laplacian(&e);
        let w = self.metric.density();
        (0..grid.len()).map(|i| kf * w[i] * e[i] - le[i]).collect()
    }
}

pub fn delta_i_sigma(phi: &Potential, eta: &[f64], k: usize, twist: &Twist) -> Result<f64> {
    phi.grid().check_len(eta)?;
    Ok(TwistedState::new(phi, k, twist)?.delta_i(eta))
}

/// φ_s with its s-derivatives at the nodes.
pub struct PathPoint {
    pub phi: Potential,
    pub d1: Vec<f64>,
    pub d2: Vec<f64>,
}

pub trait PotentialPath: Sync {
    fn point(&self, s: f64) -> PathPoint;
}

/// φ_s = from + s (to − from).
#[derive(Clone, Debug)]
pub struct LinearPath {
    pub from: Potential,
    pub to: Potential,
}

impl LinearPath {
    pub fn new(from: Potential, to: Potential) -> Self {
        LinearPath { from, to }
    }

    fn dir(&self) -> Vec<f64> {
        self.to
            .values()
            .iter()
            .zip(self.from.values())
            .map(|(b, a)| b - a)
            .collect()
    }
}

impl PotentialPath for LinearPath {
    fn point(&self, s: f64) -> PathPoint {
        let d1 = self.dir();
        PathPoint {
            phi: self.from.add(&d1, s),
            d2: vec![0.0; d1.len()],
            d1,
        }
    }
}

/// φ_s = φ + (s/k) log ρ_k(φ).
pub fn bergman_path(phi: &Potential, k: usize) -> Result<LinearPath> {
    let rho = crate::quantization::bergman(phi, k)?;
    let kf = k as f64;
    let step: Vec<f64> = rho.values.iter().map(|r| r.ln() / kf).collect();
    Ok(LinearPath::new(phi.clone(), phi.add(&step, 1.0)))
}

/// s ↦ inner(s²).
pub struct SquaredPath<P: PotentialPath>(pub P);

impl<P: PotentialPath> PotentialPath for SquaredPath<P> {
    fn point(&self, s: f64) -> PathPoint {
        let p = self.0.point(s * s);
        let d1 = p.d1.iter().map(|v| 2.0 * s * v).collect();
        let d2 = p
            .d1
            .iter()
            .zip(&p.d2)
            .map(|(a, b)| 2.0 * a + 4.0 * s * s * b)
            .collect();
        PathPoint { phi: p.phi, d1, d2 }
    }
}

/// φ_s = Σ_j s^j c_j.
#[derive(Clone, Debug)]
pub struct PolynomialPath {
    pub coeffs: Vec<Potential>,
}

impl PotentialPath for PolynomialPath {
    fn point(&self, s: f64) -> PathPoint {
        let grid = self.coeffs[0].grid();
        let n = grid.len();
        let (mut v, mut d1, mut d2) = (vec![0.0; n], vec![0.0; n], vec![0.0; n]);
        for (j, c) in self.coeffs.iter().enumerate() {
            let jf = j as f64;
            let p0 = s.powi(j as i32);
            let p1 = if j >= 1 { jf * s.powi(j as i32 - 1) } else { 0.0 };
            let p2 = if j >= 2 { jf * (jf - 1.0) * s.powi(j as i32 - 2) } else { 0.0 };
            for i in 0..n {
                let ci = c.values()[i];
                v[i] += p0 * ci;
                d1[i] += p1 * ci;
                d2[i] += p2 * ci;
            }
        }
        PathPoint {
            phi: Potential::new(grid.clone(), v).expect("finite path"),
            d1,
            d2,
        }
    }
}

/// ∫_a^b δI_kσ(φ_s)(φ'_s) ds with the given rule.
pub fn path_integral_between(
    path: &dyn PotentialPath,
    a: f64,
    b: f64,
    k: usize,
    twist: &Twist,
    rule: &SRule,
) -> Result<f64> {
    let terms: Vec<Result<f64>> = rule
        .on(a, b)
        .par_iter()
        .map(|&(s, w)| {
            let p = path.point(s);
            Ok(w * TwistedState::new(&p.phi, k, twist)?.delta_i(&p.d1))
        })
        .collect();
    let mut total = 0.0;
    for t in terms {
        total += t?;
    }
    Ok(total)
}

pub fn path_integral(path: &dyn PotentialPath, k: usize, twist: &Twist, rule: &SRule) -> Result<f64> {
    path_integral_between(path, 0.0, 1.0, k, twist, rule)
}

/// Which path from 0 to φ defines I_kσ(φ).
#[derive(Clone, Debug)]
pub enum PathChoice {
    Linear,
    /// The linear path reparameterized by s ↦ s².
    Squared,
    /// 0 → via → φ, both legs linear.
    TwoLeg(Potential),
}

/// I_kσ(φ), normalized by I_kσ(0) = 0.
pub fn i_sigma_k(phi: &Potential, k: usize, twist: &Twist, path: &PathChoice, rule: &SRule) -> Result<f64> {
    let zero = Potential::zero(phi.grid());
    match path {
        PathChoice::Linear => path_integral(&LinearPath::new(zero, phi.clone()), k, twist, rule),
        PathChoice::Squared => path_integral(
            &SquaredPath(LinearPath::new(zero, phi.clone())),
            k,
            twist,
            rule,
        ),
        PathChoice::TwoLeg(via) => {
            let a = path_integral(&LinearPath::new(zero, via.clone()), k, twist, rule)?;
            let b = path_integral(&LinearPath::new(via.clone(), phi.clone()), k, twist, rule)?;
            Ok(a + b)
        }
    }
}

/// I_kσ(φ₁, φ₂): the integral of δI_kσ along the segment φ₁ → φ₂.
pub fn i_sigma_between(a: &Potential, b: &Potential, k: usize, twist: &Twist, rule: &SRule) -> Result<f64> {
    path_integral(&LinearPath::new(a.clone(), b.clone()), k, twist, rule)
}

/// Second derivative of I_kσ along a path:
/// k ∫ (φ'' − |∇φ'|²_φ)(k + Δ_φ) e^{ψ_k} dμ_φ.
///
/// |∇f|²_φ here is normalized so that ∫|∇f|² dμ_φ = ∫ f Δ_φ f dμ_φ; it is the ½|df|² of
/// the Kähler-metric convention.
pub fn i_sigma_hessian(path: &dyn PotentialPath, s: f64, k: usize, twist: &Twist) -> Result<f64> {
    let p = path.point(s);
    let st = TwistedState::new(&p.phi, k, twist)?;
    let grad = st.metric.grad_norm_sq(&p.d1);
    let op = st.weighted_operator_on_exp_psi();
    let mu0 = p.phi.grid().weights();
    let kf = k as f64;
    Ok(kf * (0..mu0.len())
        .map(|i| mu0[i] * (p.d2[i] - grad[i]) * op[i])
        .sum::<f64>())
}

/// Central second difference of s ↦ ∫_0^s δI(φ_r)(φ'_r) dr, formed from the two
/// one-sided integrals so nothing cancels at the level of I itself.
pub fn path_second_derivative_fd(
    path: &dyn PotentialPath,
    s: f64,
    h: f64,
    k: usize,
    twist: &Twist,
) -> Result<f64> {
    let rule = SRule::gauss(16);
    let up = path_integral_between(path, s, s + h, k, twist, &rule)?;
    let down = path_integral_between(path, s - h, s, k, twist, &rule)?;
    Ok((up - down) / (h * h))
}
