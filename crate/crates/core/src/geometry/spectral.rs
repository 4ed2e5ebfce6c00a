//! Gauss–Legendre nodes and normalized associated Legendre functions.
//!
//! P̄_l^m is normalized so that ∫_{-1}^{1} (P̄_l^m)² dx = 1; no Condon–Shortley phase.

use std::f64::consts::PI;

/// Gauss–Legendre nodes (ascending) and weights on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        // Tricomi initial guess, then Newton on P_n.
        let mut z = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, z);
            dp = d;
            let dz = p / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                dp = legendre_with_derivative(n, z).1;
                break;
            }
        }
        // (1 − z)(1 + z) is exact for z in [0.5, 1]; 1 − z² is not.
        let wi = 2.0 / ((1.0 - z) * (1.0 + z) * dp * dp);
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    if n % 2 == 1 {
        x[n / 2] = 0.0;
    }
    (x, w)
}

/// (P_n(z), P_n'(z)); the derivative has its own recurrence, avoiding the
/// division by z² − 1 that loses digits near the endpoints.
fn legendre_with_derivative(n: usize, z: f64) -> (f64, f64) {
    if n == 0 {
        return (1.0, 0.0);
    }
    let (mut p0, mut p1) = (1.0, z);
    let mut d1 = 1.0;
    for l in 2..=n {
        let lf = l as f64;
        let p2 = ((2.0 * lf - 1.0) * z * p1 - (lf - 1.0) * p0) / lf;
        d1 = z * d1 + lf * p1;
        p0 = p1;
        p1 = p2;
    }
    (p1, d1)
}

/// Fills `out[l - m] = P̄_l^m(x)` for `l = m..=lmax`.
pub fn assoc_legendre_column(m: usize, x: f64, lmax: usize, out: &mut [f64]) {
    debug_assert!(out.len() > lmax - m);
    let s = (1.0 - x * x).max(0.0).sqrt();
    let mut pmm = std::f64::consts::FRAC_1_SQRT_2;
    for j in 1..=m {
        let jf = j as f64;
        pmm *= ((2.0 * jf + 1.0) / (2.0 * jf)).sqrt() * s;
    }
    out[0] = pmm;
    if lmax == m {
        return;
    }
    let mf = m as f64;
    out[1] = (2.0 * mf + 3.0).sqrt() * x * pmm;
    for l in (m + 2)..=lmax {
        let lf = l as f64;
        let a = ((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf)).sqrt();
        let lm1 = lf - 1.0;
        let b = ((lm1 * lm1 - mf * mf) / (4.0 * lm1 * lm1 - 1.0)).sqrt();
        out[l - m] = a * (x * out[l - m - 1] - b * out[l - m - 2]);
    }
}

/// Coefficient c in (1−x²) d/dx P̄_l^m = c P̄_{l−1}^m − l x P̄_l^m.
pub fn derivative_coeff(l: usize, m: usize) -> f64 {
    if l == m {
        return 0.0;
    }
    let lf = l as f64;
    let mf = m as f64;
    ((2.0 * lf + 1.0) * (lf - mf) * (lf + mf) / (2.0 * lf - 1.0)).sqrt()
}
