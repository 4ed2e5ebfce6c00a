use std::f64::consts::PI;
use std::fmt;
use std::sync::{Arc, OnceLock};

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use super::spectral::{assoc_legendre_column, derivative_coeff, gauss_legendre};
use crate::error::{Error, Result};

pub const MIN_RESOLUTION: usize = 8;
pub const MAX_RADIAL: usize = 4096;
pub const MAX_FULL2D: usize = 256;

/// Relative floor for [`Spectrum::denoised`] before differentiation.
pub const NOISE_FLOOR: f64 = 4.0 * f64::EPSILON;

/// Largest cached Legendre node table, in entries.
const TABLE_LIMIT: usize = 4 << 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GridMode {
    /// Circle-invariant data, one node per latitude.
    Radial,
    /// Gauss–Legendre in x times a uniform angular grid with 2·n_x points.
    Full2d,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Chart {
    /// z = r e^{iϑ}, used for |z| ≤ 1.
    North,
    /// w = 1/z, used for |z| > 1.
    South,
}

/// Quadrature grid for dμ₀ = dx dϑ / 4π. Node index is `i * n_theta + j`.
pub struct QuadGrid {
    mode: GridMode,
    n_x: usize,
    n_theta: usize,
    x: Vec<f64>,
    gl_weights: Vec<f64>,
    weights: Vec<f64>,
    fft_fwd: Arc<dyn Fft<f64>>,
    fft_inv: Arc<dyn Fft<f64>>,
    /// P̄_l^m(x_i) per m, laid out `[i * (n_x − m) + (l − m)]`; None above TABLE_LIMIT.
    legendre: OnceLock<Option<Vec<Vec<f64>>>>,
}

impl fmt::Debug for QuadGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("QuadGrid")
            .field("mode", &self.mode)
            .field("n_x", &self.n_x)
            .field("n_theta", &self.n_theta)
            .finish()
    }
}

impl PartialEq for QuadGrid {
    fn eq(&self, other: &Self) -> bool {
        self.mode == other.mode && self.n_x == other.n_x
    }
}

pub fn build_grid(mode: GridMode, resolution: usize) -> Result<Arc<QuadGrid>> {
    let max = match mode {
        GridMode::Radial => MAX_RADIAL,
        GridMode::Full2d => MAX_FULL2D,
    };
    if !(MIN_RESOLUTION..=max).contains(&resolution) {
        return Err(Error::Resolution {
            got: resolution,
            min: MIN_RESOLUTION,
            max,
        });
    }
    let n_x = resolution;
    let n_theta = match mode {
        GridMode::Radial => 1,
        GridMode::Full2d => 2 * n_x,
    };
    let (x, gl_weights) = gauss_legendre(n_x);
    let scale = 1.0 / (2.0 * n_theta as f64);
    let weights = gl_weights
        .iter()
        .flat_map(|&w| std::iter::repeat_n(w * scale, n_theta))
        .collect();
    let mut planner = FftPlanner::new();
    let fft_fwd = planner.plan_fft_forward(n_theta);
    let fft_inv = planner.plan_fft_inverse(n_theta);
    Ok(Arc::new(QuadGrid {
        mode,
        n_x,
        n_theta,
        x,
        gl_weights,
        weights,
        fft_fwd,
        fft_inv,
        legendre: OnceLock::new(),
    }))
}

/// Spherical-harmonic coefficients: `coeffs[m][l - m]`, 0 ≤ m ≤ mmax, m ≤ l < n_x.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    n_x: usize,
    coeffs: Vec<Vec<Complex64>>,
}

impl Spectrum {
    pub fn mmax(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, l: usize, m: usize) -> Complex64 {
        self.coeffs[m][l - m]
    }

    /// Applies the round Laplacian L (eigenvalues −l(l+1)).
    pub fn laplacian(&self) -> Spectrum {
        self.map_l(|l| -((l * (l + 1)) as f64))
    }

    /// Zeroes coefficient (l, m) when below `rel · (l + 1)` times the largest one.
    /// Analysis leaves rounding noise growing about linearly in l, and
    /// differentiation near the poles amplifies it by roughly n^3.5; dropping it
    /// keeps derivatives of smooth fields accurate.
    pub fn denoised(mut self, rel: f64) -> Spectrum {
        let top = self.coeffs.iter().flatten().map(|c| c.norm()).fold(0.0, f64::max);
        for (m, row) in self.coeffs.iter_mut().enumerate() {
            for (d, c) in row.iter_mut().enumerate() {
                if c.norm() <= rel * (m + d + 1) as f64 * top {
                    *c = Complex64::new(0.0, 0.0);
                }
            }
        }
        self
    }

    pub fn map_l(&self, f: impl Fn(usize) -> f64) -> Spectrum {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(m, row)| {
                row.iter()
                    .enumerate()
                    .map(|(d, c)| c * f(m + d))
                    .collect()
            })
            .collect();
        Spectrum {
            n_x: self.n_x,
            coeffs,
        }
    }

    /// Largest |coefficient| with m > 0.
    pub fn non_invariant_norm(&self) -> f64 {
        self.coeffs
            .iter()
            .skip(1)
            .flatten()
            .map(|c| c.norm())
            .fold(0.0, f64::max)
    }
}

#[derive(Clone, Copy)]
enum Synth {
    Value,
    XDerivative,
}

impl QuadGrid {
    pub fn mode(&self) -> GridMode {
        self.mode
    }

    pub fn resolution(&self) -> usize {
        self.n_x
    }

    pub fn n_x(&self) -> usize {
        self.n_x
    }

    pub fn n_theta(&self) -> usize {
        self.n_theta
    }

    pub fn len(&self) -> usize {
        self.n_x * self.n_theta
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Latitude nodes x_i (ascending).
    pub fn x(&self) -> &[f64] {
        &self.x
    }

    /// Raw Gauss–Legendre weights in x (sum 2).
    pub fn gl_weights(&self) -> &[f64] {
        &self.gl_weights
    }

    /// Weight of each node for dμ₀ (sum 1).
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn theta(&self, j: usize) -> f64 {
        2.0 * PI * j as f64 / self.n_theta as f64
    }

    /// u = r²/(1+r²) at latitude row i.
    pub fn u(&self, i: usize) -> f64 {
        0.5 * (1.0 + self.x[i])
    }

    /// u at every node.
    pub fn u_field(&self) -> Vec<f64> {
        self.expand_rows(|i| self.u(i))
    }

    /// Field that depends only on the latitude row.
    pub fn expand_rows(&self, f: impl Fn(usize) -> f64) -> Vec<f64> {
        (0..self.n_x)
            .flat_map(|i| std::iter::repeat_n(f(i), self.n_theta))
            .collect()
    }

    pub fn row_col(&self, idx: usize) -> (usize, usize) {
        (idx / self.n_theta, idx % self.n_theta)
    }

    /// Chart coordinate of a node; the north chart is used when |z| ≤ 1.
    pub fn chart_point(&self, idx: usize) -> (Chart, Complex64) {
        let (i, j) = self.row_col(idx);
        let u = self.u(i);
        let th = self.theta(j);
        if u <= 0.5 {
            (Chart::North, Complex64::from_polar((u / (1.0 - u)).sqrt(), th))
        } else {
            (Chart::South, Complex64::from_polar(((1.0 - u) / u).sqrt(), -th))
        }
    }

    /// ∫ f dμ₀, summed in node order.
    pub fn integrate(&self, f: &[f64]) -> f64 {
        debug_assert_eq!(f.len(), self.len());
        f.iter().zip(&self.weights).map(|(f, w)| f * w).sum()
    }

    pub fn check_len(&self, f: &[f64]) -> Result<()> {
        if f.len() != self.len() {
            return Err(Error::Shape {
                got: f.len(),
                want: self.len(),
            });
        }
        Ok(())
    }

    fn mmax(&self) -> usize {
        match self.mode {
            GridMode::Radial => 0,
            GridMode::Full2d => self.n_x - 1,
        }
    }

    /// Angular Fourier modes of each latitude row, `F_m = (1/n_θ) Σ_j f_j e^{−imϑ_j}` for m < count.
    pub fn row_modes(&self, f: &[f64], count: usize) -> Vec<Vec<Complex64>> {
        let nt = self.n_theta;
        f.par_chunks(nt)
            .map(|row| {
                if nt == 1 {
                    let mut out = vec![Complex64::new(0.0, 0.0); count];
                    out[0] = Complex64::new(row[0], 0.0);
                    return out;
                }
                let mut buf: Vec<Complex64> =
                    row.iter().map(|&v| Complex64::new(v, 0.0)).collect();
                self.fft_fwd.process(&mut buf);
                buf.truncate(count.min(nt));
                buf.resize(count, Complex64::new(0.0, 0.0));
                for c in buf.iter_mut() {
                    *c /= nt as f64;
                }
                buf
            })
            .collect()
    }

    /// Real field from row modes F_m (m ≤ mmax), optionally rotated: value at ϑ_j + shift.
    fn rows_to_field(&self, rows: &[Vec<Complex64>], shift: f64) -> Vec<f64> {
        let nt = self.n_theta;
        rows.par_iter()
            .flat_map_iter(|modes| {
                if nt == 1 {
                    return vec![modes[0].re];
                }
                let mut buf = vec![Complex64::new(0.0, 0.0); nt];
                for (m, &c) in modes.iter().enumerate() {
                    let c = c * Complex64::from_polar(1.0, m as f64 * shift);
                    if m == 0 {
                        buf[0] = Complex64::new(c.re, 0.0);
                    } else if m < nt - m {
                        buf[m] = c;
                        buf[nt - m] = c.conj();
                    }
                }
                self.fft_inv.process(&mut buf);
                buf.into_iter().map(|c| c.re).collect::<Vec<_>>()
            })
            .collect()
    }

    /// Re F_0 + 2 Re Σ_{m≥1} F_m e^{imϑ_j} from per-row modes.
    pub fn fourier_synthesis(&self, rows: &[Vec<Complex64>]) -> Vec<f64> {
        self.rows_to_field(rows, 0.0)
    }

    fn legendre_table(&self) -> Option<&Vec<Vec<f64>>> {
        self.legendre
            .get_or_init(|| {
                let (n, mmax) = (self.n_x, self.mmax());
                let total: usize = (0..=mmax).map(|m| (n - m) * n).sum();
                if total > TABLE_LIMIT {
                    return None;
                }
                Some(
                    (0..=mmax)
                        .into_par_iter()
                        .map(|m| {
                            let w = n - m;
                            let mut t = vec![0.0; w * n];
                            for (i, chunk) in t.chunks_mut(w).enumerate() {
                                assoc_legendre_column(m, self.x[i], n - 1, chunk);
                            }
                            t
                        })
                        .collect(),
                )
            })
            .as_ref()
    }

    pub fn analyze(&self, f: &[f64]) -> Spectrum {
        let mmax = self.mmax();
        let lmax = self.n_x - 1;
        let rows = self.row_modes(f, mmax + 1);
        let table = self.legendre_table();
        let coeffs = (0..=mmax)
            .into_par_iter()
            .map(|m| {
                let w = lmax - m + 1;
                let mut acc = vec![Complex64::new(0.0, 0.0); w];
                let mut buf = vec![0.0; w];
                for i in 0..self.n_x {
                    let col: &[f64] = match table {
                        Some(t) => &t[m][i * w..(i + 1) * w],
                        None => {
                            assoc_legendre_column(m, self.x[i], lmax, &mut buf);
                            &buf
                        }
                    };
                    let fm = rows[i][m] * self.gl_weights[i];
                    for (a, p) in acc.iter_mut().zip(col) {
                        *a += fm * *p;
                    }
                }
                acc
            })
            .collect();
        Spectrum {
            n_x: self.n_x,
            coeffs,
        }
    }

    /// Synthesis rows at `xs`; `at_nodes` says xs are the grid's own nodes, which
    /// allows the cached table.
    fn synth_rows(&self, spec: &Spectrum, xs: &[f64], kind: Synth, at_nodes: bool) -> Vec<Vec<Complex64>> {
        let lmax = spec.n_x - 1;
        let mmax = spec.mmax();
        let table = if at_nodes && spec.n_x == self.n_x { self.legendre_table() } else { None };
        xs.par_iter()
            .enumerate()
            .map(|(i, &x)| {
                let mut buf = vec![0.0; lmax + 1];
                (0..=mmax)
                    .map(|m| {
                        let w = lmax - m + 1;
                        let col: &[f64] = match table {
                            Some(t) => &t[m][i * w..(i + 1) * w],
                            None => {
                                assoc_legendre_column(m, x, lmax, &mut buf[..w]);
                                &buf[..w]
                            }
                        };
                        let mut acc = Complex64::new(0.0, 0.0);
                        for l in m..=lmax {
                            let basis = match kind {
                                Synth::Value => col[l - m],
                                Synth::XDerivative => {
                                    let prev = if l > m { col[l - m - 1] } else { 0.0 };
                                    derivative_coeff(l, m) * prev - l as f64 * x * col[l - m]
                                }
                            };
                            acc += spec.coeffs[m][l - m] * basis;
                        }
                        acc
                    })
                    .collect()
            })
            .collect()
    }

    /// Analysis followed by [`Spectrum::denoised`]; use before differentiating.
    pub fn analyze_smooth(&self, f: &[f64]) -> Spectrum {
        self.analyze(f).denoised(NOISE_FLOOR)
    }

    pub fn synthesize(&self, spec: &Spectrum) -> Vec<f64> {
        let rows = self.synth_rows(spec, &self.x, Synth::Value, true);
        self.rows_to_field(&rows, 0.0)
    }

    /// (1 − x²) ∂_x f at the nodes.
    pub fn synthesize_x_derivative(&self, spec: &Spectrum) -> Vec<f64> {
        let rows = self.synth_rows(spec, &self.x, Synth::XDerivative, true);
        self.rows_to_field(&rows, 0.0)
    }

    /// ∂_ϑ f at the nodes.
    pub fn synthesize_theta_derivative(&self, spec: &Spectrum) -> Vec<f64> {
        let mut rows = self.synth_rows(spec, &self.x, Synth::Value, true);
        for row in rows.iter_mut() {
            for (m, c) in row.iter_mut().enumerate() {
                *c *= Complex64::new(0.0, m as f64);
            }
        }
        self.rows_to_field(&rows, 0.0)
    }

    /// f(x_new[i], ϑ_j + shift) for every node (i, j).
    pub fn synthesize_mapped(&self, spec: &Spectrum, x_new: &[f64], shift: f64) -> Vec<f64> {
        assert_eq!(x_new.len(), self.n_x);
        let rows = self.synth_rows(spec, x_new, Synth::Value, false);
        self.rows_to_field(&rows, shift)
    }

    /// Round Laplacian L f = ((1−x²) f_x)_x + f_ϑϑ/(1−x²).
    pub fn laplacian(&self, f: &[f64]) -> Vec<f64> {
        self.synthesize(&self.analyze_smooth(f).laplacian())
    }

    /// |∇f|² for the round metric g₀ with dμ₀ normalized to 1, i.e.
    /// ((1−x²) f_x² + f_ϑ²/(1−x²)); divide by the density ratio for g_φ.
    pub fn grad_sq(&self, f: &[f64]) -> Vec<f64> {
        let spec = self.analyze_smooth(f);
        let dx = self.synthesize_x_derivative(&spec);
        let dt = match self.mode {
            GridMode::Radial => vec![0.0; self.len()],
            GridMode::Full2d => self.synthesize_theta_derivative(&spec),
        };
        (0..self.len())
            .map(|idx| {
                let (i, _) = self.row_col(idx);
                let s2 = 1.0 - self.x[i] * self.x[i];
                (dx[idx] * dx[idx] + dt[idx] * dt[idx]) / s2
            })
            .collect()
    }

    /// Max over rows of the angular spread max_j f − min_j f.
    pub fn angular_spread(&self, f: &[f64]) -> f64 {
        f.chunks(self.n_theta)
            .map(|row| {
                let hi = row.iter().cloned().fold(f64::MIN, f64::max);
                let lo = row.iter().cloned().fold(f64::MAX, f64::min);
                hi - lo
            })
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(g: &QuadGrid, f: impl Fn(f64, f64) -> f64) -> Vec<f64> {
        (0..g.len())
            .map(|idx| {
                let (i, j) = g.row_col(idx);
                f(g.x()[i], g.theta(j))
            })
            .collect()
    }

    #[test]
    fn rejects_small_resolution() {
        assert!(matches!(
            build_grid(GridMode::Radial, 7),
            Err(Error::Resolution { .. })
        ));
        assert!(build_grid(GridMode::Full2d, 257).is_err());
    }

    #[test]
    fn volume_full2d_128() {
        let g = build_grid(GridMode::Full2d, 128).unwrap();
        let v = g.integrate(&vec![1.0; g.len()]);
        assert!((v - 1.0).abs() <= 1e-10);
        assert!(g.weights().iter().all(|&w| w > 0.0));
    }

    #[test]
    fn volume_radial_1024() {
        let g = build_grid(GridMode::Radial, 1024).unwrap();
        assert!((g.integrate(&vec![1.0; g.len()]) - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn volume_error_shrinks_with_resolution() {
        // In x the base integrand (1+r²)^{-2} d(r²) is dx/2, integrated exactly,
        // so both errors sit at roundoff.
        let err = |n| {
            let g = build_grid(GridMode::Radial, n).unwrap();
            (g.integrate(&vec![1.0; g.len()]) - 1.0).abs()
        };
        let (e1, e2) = (err(512), err(1024));
        assert!(e2 * 4.0 <= e1 || (e1 <= 1e-14 && e2 <= 1e-14), "{e1} {e2}");
        // A non-polynomial integrand does show geometric decay.
        let err = |n| {
            let g = build_grid(GridMode::Radial, n).unwrap();
            let f = g.expand_rows(|i| 1.0 / (1.5 - g.x()[i]));
            (g.integrate(&f) - 0.5 * 5f64.ln()).abs()
        };
        let (a, b) = (err(8), err(10));
        assert!(b * 4.0 <= a, "{a} {b}");
    }

    #[test]
    fn laplacian_of_harmonics() {
        let g = build_grid(GridMode::Full2d, 16).unwrap();
        // Y_2^1 ∝ x√(1−x²) cos ϑ, eigenvalue −6.
        let f = sample(&g, |x, t| x * (1.0 - x * x).sqrt() * t.cos());
        let lf = g.laplacian(&f);
        for (a, b) in lf.iter().zip(&f) {
            assert!((a + 6.0 * b).abs() < 1e-12);
        }
        let r = build_grid(GridMode::Radial, 16).unwrap();
        let f: Vec<f64> = r.x().iter().map(|x| 1.5 * x * x - 0.5).collect();
        let lf = r.laplacian(&f);
        for (a, b) in lf.iter().zip(&f) {
            assert!((a + 6.0 * b).abs() < 1e-12);
        }
    }

    #[test]
    fn analyze_synthesize_roundtrip() {
        let g = build_grid(GridMode::Full2d, 24).unwrap();
        let f = sample(&g, |x, t| (0.3 * x).exp() + 0.2 * (1.0 - x * x) * (2.0 * t).sin());
        let back = g.synthesize(&g.analyze(&f));
        for (a, b) in back.iter().zip(&f) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn derivatives_match_closed_form() {
        let g = build_grid(GridMode::Full2d, 20).unwrap();
        let f = sample(&g, |x, t| x * x * x + x * (1.0 - x * x).sqrt() * t.cos());
        let spec = g.analyze(&f);
        let dx = g.synthesize_x_derivative(&spec);
        let dt = g.synthesize_theta_derivative(&spec);
        for idx in 0..g.len() {
            let (i, j) = g.row_col(idx);
            let (x, t) = (g.x()[i], g.theta(j));
            let s = (1.0 - x * x).sqrt();
            let want_x = (1.0 - x * x) * 3.0 * x * x + s * (1.0 - 2.0 * x * x) * t.cos();
            let want_t = -x * s * t.sin();
            assert!((dx[idx] - want_x).abs() < 1e-11);
            assert!((dt[idx] - want_t).abs() < 1e-11);
        }
    }

    #[test]
    fn mapped_synthesis_and_rotation() {
        let g = build_grid(GridMode::Full2d, 16).unwrap();
        let func = |x: f64, t: f64| x * x + (1.0 - x * x).sqrt() * (t + 0.4).cos();
        let f = sample(&g, func);
        let x_new: Vec<f64> = g.x().iter().map(|x| 0.9 * x + 0.05).collect();
        let shift = 0.7;
        let out = g.synthesize_mapped(&g.analyze(&f), &x_new, shift);
        for idx in 0..g.len() {
            let (i, j) = g.row_col(idx);
            let want = func(x_new[i], g.theta(j) + shift);
            assert!((out[idx] - want).abs() < 1e-12);
        }
    }

    #[test]
    fn chart_points_cover_both_hemispheres() {
        let g = build_grid(GridMode::Full2d, 8).unwrap();
        for idx in 0..g.len() {
            let (i, _) = g.row_col(idx);
            let (chart, z) = g.chart_point(idx);
            assert!(z.norm() <= 1.0 + 1e-15);
            let t = match chart {
                Chart::North => z.norm_sqr(),
                Chart::South => 1.0 / z.norm_sqr(),
            };
            assert!((t / (1.0 + t) - g.u(i)).abs() < 1e-14);
        }
    }

    #[test]
    fn laplacian_stays_accurate_at_high_resolution() {
        let g = build_grid(GridMode::Radial, 2048).unwrap();
        let f: Vec<f64> = g.x().iter().map(|x| x * x).collect();
        let err = g
            .x()
            .iter()
            .zip(g.laplacian(&f))
            .map(|(x, l)| (l - (2.0 - 6.0 * x * x)).abs())
            .fold(0.0, f64::max);
        assert!(err < 1e-12, "{err:e}");
    }
}
