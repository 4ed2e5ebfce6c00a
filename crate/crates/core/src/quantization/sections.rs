use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{GridMode, QuadGrid};

/// Rows per chunk in the Gram reduction; fixed so sums are reproducible.
const ROW_CHUNK: usize = 16;

/// Monomial basis s_j = z^j of H⁰(CP¹, O(k)) with |s_j|²_{h₀^k} = u^j (1−u)^{k−j}.
///
/// At a node with angle ϑ the trivialized sections are e_j = √(u^j(1−u)^{k−j}) e^{ijϑ},
/// and the pairing table is e e^†.
#[derive(Clone, Debug)]
pub struct SectionBasis {
    k: usize,
    grid: Arc<QuadGrid>,
    sqrt_norms: Vec<f64>,
}

pub fn section_basis(grid: &Arc<QuadGrid>, k: usize) -> Result<SectionBasis> {
    if k == 0 {
        return Err(Error::Degree(k));
    }
    if grid.mode() == GridMode::Full2d && 2 * k >= grid.n_theta() {
        return Err(Error::DegreeTooLarge {
            k,
            need: 2 * k + 2,
            have: grid.n_theta(),
        });
    }
    let n = k + 1;
    let mut sqrt_norms = vec![0.0; grid.n_x() * n];
    for i in 0..grid.n_x() {
        let u = grid.u(i);
        let (lu, lv) = (u.ln(), (1.0 - u).ln());
        for j in 0..n {
            sqrt_norms[i * n + j] = (0.5 * (j as f64 * lu + (k - j) as f64 * lv)).exp();
        }
    }
    Ok(SectionBasis {
        k,
        grid: grid.clone(),
        sqrt_norms,
    })
}

impl SectionBasis {
    pub fn k(&self) -> usize {
        self.k
    }

    /// N_k = k + 1.
    pub fn dim(&self) -> usize {
        self.k + 1
    }

    pub fn grid(&self) -> &Arc<QuadGrid> {
        &self.grid
    }

    /// |s_j|_{h₀^k} for all j at latitude row i.
    pub fn row(&self, i: usize) -> &[f64] {
        let n = self.dim();
        &self.sqrt_norms[i * n..(i + 1) * n]
    }

    /// Trivialized section values e_j at a node.
    pub fn values_at(&self, idx: usize) -> Vec<Complex64> {
        let (i, j) = self.grid.row_col(idx);
        let th = self.grid.theta(j);
        self.row(i)
            .iter()
            .enumerate()
            .map(|(a, &s)| Complex64::from_polar(s, a as f64 * th))
            .collect()
    }

    /// Pointwise pairing table (s_α, s_β)_{h₀^k} at a node.
    pub fn pairing(&self, idx: usize) -> DMatrix<Complex64> {
        let e = self.values_at(idx);
        let n = self.dim();
        DMatrix::from_fn(n, n, |a, b| e[a] * e[b].conj())
    }

    /// Gram form ∫ f (s_α, s_β)_{h₀^k} dμ₀ for a real weight field f.
    pub fn gram(&self, f: &[f64]) -> Result<DMatrix<Complex64>> {
        self.grid.check_len(f)?;
        let n = self.dim();
        let k = self.k;
        let modes = match self.grid.mode() {
            GridMode::Radial => f.iter().map(|&v| vec![Complex64::new(v, 0.0)]).collect(),
            GridMode::Full2d => self.grid.row_modes(f, k + 1),
        };
        let gl = self.grid.gl_weights();
        let rows: Vec<usize> = (0..self.grid.n_x()).collect();
        let partials: Vec<DMatrix<Complex64>> = rows
            .par_chunks(ROW_CHUNK)
            .map(|chunk| {
                let mut acc = DMatrix::<Complex64>::zeros(n, n);
                for &i in chunk {
                    let s = self.row(i);
                    let w = 0.5 * gl[i];
                    let g: &Vec<Complex64> = &modes[i];
                    for a in 0..n {
                        for b in a..n {
                            let d = b - a;
                            if d >= g.len() {
                                continue;
                            }
                            acc[(a, b)] += g[d] * (w * s[a] * s[b]);
                        }
                    }
                }
                acc
            })
            .collect();
        let mut h = DMatrix::<Complex64>::zeros(n, n);
        for p in &partials {
            h += p;
        }
        for a in 0..n {
            h[(a, a)].im = 0.0;
            for b in (a + 1)..n {
                h[(b, a)] = h[(a, b)].conj();
            }
        }
        Ok(h)
    }

    /// e^† A e at every node for a Hermitian A, i.e. Σ A_{αβ} s̄_α s_β.
    pub fn contract(&self, a: &DMatrix<Complex64>) -> Result<Vec<f64>> {
        let n = self.dim();
        assert_eq!(a.nrows(), n);
        if self.grid.mode() == GridMode::Radial {
            let diag = (0..n).map(|j| a[(j, j)].norm()).fold(0.0, f64::max);
            let off = (0..n)
                .flat_map(|p| (0..n).filter(move |&q| q != p).map(move |q| (p, q)))
                .map(|(p, q)| a[(p, q)].norm())
                .fold(0.0, f64::max);
            if off > 1e-12 * diag {
                return Err(Error::NotInvariant(off / diag));
            }
        }
        let rows: Vec<Vec<Complex64>> = (0..self.grid.n_x())
            .into_par_iter()
            .map(|i| {
                let s = self.row(i);
                let mut d = vec![Complex64::new(0.0, 0.0); n];
                for p in 0..n {
                    for q in p..n {
                        d[q - p] += a[(p, q)] * (s[p] * s[q]);
                    }
                }
                d
            })
            .collect();
        Ok(self.grid.fourier_synthesis(&rows))
    }
}
