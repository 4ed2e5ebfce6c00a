//! Text formats for potentials and Hermitian forms.
//!
//! Potentials:
//! ```text
//! kquant-potential 1
//! format monomial
//! coefficients 0 0.05 -0.04 0.03 -0.02
//! ```
//! encodes φ = Σ c_m u^m, or with `format samples`, a `grid radial|full2d N` line
//! followed by one value per node in storage order.
//!
//! Hermitian forms:
//! ```text
//! kquant-hermform 1
//! degree 2
//! 0.333 0   0 0   0 0
//! ...
//! ```
//! one row per line, entries as `re im` pairs. Blank lines and `#` comments are ignored.

use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::{build_grid, GridMode, Potential, QuadGrid};
use crate::quantization::HermForm;

/// A parsed potential before it is placed on a grid.
#[derive(Clone, Debug, PartialEq)]
pub enum PotentialSpec {
    Monomial(Vec<f64>),
    Samples {
        mode: GridMode,
        resolution: usize,
        values: Vec<f64>,
    },
}

impl PotentialSpec {
    /// Monomial specs are evaluated on `grid`; sample specs carry their own grid and
    /// must match it.
    pub fn realize(&self, grid: &Arc<QuadGrid>) -> Result<Potential> {
        match self {
            PotentialSpec::Monomial(c) => Ok(Potential::monomial(grid, c)),
            PotentialSpec::Samples {
                mode,
                resolution,
                values,
            } => {
                let own = build_grid(*mode, *resolution)?;
                if own.as_ref() != grid.as_ref() {
                    return Err(Error::Shape {
                        got: own.len(),
                        want: grid.len(),
                    });
                }
                Potential::new(grid.clone(), values.clone())
            }
        }
    }
}

fn lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty())
}

fn perr(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

fn floats<'a>(line: usize, it: impl Iterator<Item = &'a str>) -> Result<Vec<f64>> {
    it.map(|t| {
        let v: f64 = t.parse().map_err(|_| perr(line, format!("not a number: {t}")))?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(perr(line, format!("non-finite value: {t}")))
        }
    })
    .collect()
}

fn expect_header<'a>(it: &mut impl Iterator<Item = (usize, &'a str)>, magic: &str) -> Result<usize> {
    match it.next() {
        Some((n, l)) if l == format!("{magic} 1") => Ok(n),
        Some((n, l)) => Err(perr(n, format!("expected header `{magic} 1`, found `{l}`"))),
        None => Err(perr(0, "empty input")),
    }
}

fn keyed<'a>(it: &mut impl Iterator<Item = (usize, &'a str)>, key: &str, after: usize) -> Result<(usize, Vec<&'a str>)> {
    match it.next() {
        Some((n, l)) => {
            let mut toks = l.split_whitespace();
            if toks.next() != Some(key) {
                return Err(perr(n, format!("expected `{key}`")));
            }
            Ok((n, toks.collect()))
        }
        None => Err(perr(after, format!("missing `{key}` line"))),
    }
}

pub fn parse_potential(text: &str) -> Result<PotentialSpec> {
    let mut it = lines(text);
    let h = expect_header(&mut it, "kquant-potential")?;
    let (n, fmt) = keyed(&mut it, "format", h)?;
    match fmt.as_slice() {
        ["monomial"] => {
            let (n, toks) = keyed(&mut it, "coefficients", n)?;
            let c = floats(n, toks.into_iter())?;
            if c.is_empty() {
                return Err(perr(n, "no coefficients"));
            }
            if let Some((m, _)) = it.next() {
                return Err(perr(m, "trailing content"));
            }
            Ok(PotentialSpec::Monomial(c))
        }
        ["samples"] => {
            let (n, toks) = keyed(&mut it, "grid", n)?;
            let (mode, resolution) = match toks.as_slice() {
                [m, r] => {
                    let mode = match *m {
                        "radial" => GridMode::Radial,
                        "full2d" => GridMode::Full2d,
                        _ => return Err(perr(n, format!("unknown grid mode `{m}`"))),
                    };
                    let r: usize = r.parse().map_err(|_| perr(n, format!("bad resolution `{r}`")))?;
                    (mode, r)
                }
                _ => return Err(perr(n, "expected `grid <mode> <resolution>`")),
            };
            let grid = build_grid(mode, resolution).map_err(|e| perr(n, e.to_string()))?;
            let mut values = Vec::with_capacity(grid.len());
            let mut last = n;
            for (m, l) in it {
                values.extend(floats(m, l.split_whitespace())?);
                last = m;
            }
            if values.len() != grid.len() {
                return Err(perr(
                    last,
                    format!("expected {} samples, found {}", grid.len(), values.len()),
                ));
            }
            Ok(PotentialSpec::Samples {
                mode,
                resolution,
                values,
            })
        }
        _ => Err(perr(n, "format must be `monomial` or `samples`")),
    }
}

pub fn emit_monomial(coeffs: &[f64]) -> String {
    let c: Vec<String> = coeffs.iter().map(|c| format!("{c:e}")).collect();
    format!("kquant-potential 1\nformat monomial\ncoefficients {}\n", c.join(" "))
}

pub fn emit_samples(phi: &Potential) -> String {
    let g = phi.grid();
    let mode = match g.mode() {
        GridMode::Radial => "radial",
        GridMode::Full2d => "full2d",
    };
    let mut s = format!("kquant-potential 1\nformat samples\ngrid {mode} {}\n", g.resolution());
    for v in phi.values() {
        s.push_str(&format!("{v:e}\n"));
    }
    s
}

pub fn parse_hermform(text: &str) -> Result<HermForm> {
    let mut it = lines(text);
    let h = expect_header(&mut it, "kquant-hermform")?;
    let (n, toks) = keyed(&mut it, "degree", h)?;
    let k: usize = match toks.as_slice() {
        [t] => t.parse().map_err(|_| perr(n, format!("bad degree `{t}`")))?,
        _ => return Err(perr(n, "expected `degree <k>`")),
    };
    if k == 0 {
        return Err(perr(n, "degree must be at least 1"));
    }
    let dim = k + 1;
    let mut m = DMatrix::<Complex64>::zeros(dim, dim);
    let mut row = 0;
    let mut last = n;
    for (ln, l) in it {
        if row == dim {
            return Err(perr(ln, "too many rows"));
        }
        let v = floats(ln, l.split_whitespace())?;
        if v.len() != 2 * dim {
            return Err(perr(ln, format!("expected {} numbers, found {}", 2 * dim, v.len())));
        }
        for c in 0..dim {
            m[(row, c)] = Complex64::new(v[2 * c], v[2 * c + 1]);
        }
        row += 1;
        last = ln;
    }
    if row != dim {
        return Err(perr(last, format!("expected {dim} rows, found {row}")));
    }
    HermForm::new(k, m).map_err(|e| perr(last, e.to_string()))
}

pub fn emit_hermform(h: &HermForm) -> String {
    let mut s = format!("kquant-hermform 1\ndegree {}\n", h.k());
    let m = h.entries();
    for r in 0..h.dim() {
        let row: Vec<String> = (0..h.dim())
            .map(|c| format!("{:e} {:e}", m[(r, c)].re, m[(r, c)].im))
            .collect();
        s.push_str(&row.join(" "));
        s.push('\n');
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn monomial_round_trip() {
        let c = vec![0.0, 0.05, -0.04, 0.03, -0.02];
        let spec = parse_potential(&emit_monomial(&c)).unwrap();
        assert_eq!(spec, PotentialSpec::Monomial(c));
    }

    #[test]
    fn samples_round_trip() {
        let g = build_grid(GridMode::Full2d, 8).unwrap();
        let phi = Potential::from_fn(&g, |x, t| 0.01 * x + 0.002 * t.sin()).unwrap();
        let back = parse_potential(&emit_samples(&phi)).unwrap().realize(&g).unwrap();
        assert_eq!(back, phi);
        let other = build_grid(GridMode::Full2d, 10).unwrap();
        assert!(parse_potential(&emit_samples(&phi)).unwrap().realize(&other).is_err());
    }

    #[test]
    fn hermform_round_trip() {
        let mut m = DMatrix::<Complex64>::identity(3, 3);
        m[(0, 2)] = Complex64::new(0.1, -0.2);
        m[(2, 0)] = Complex64::new(0.1, 0.2);
        let h = HermForm::new(2, m).unwrap();
        assert_eq!(parse_hermform(&emit_hermform(&h)).unwrap(), h);
    }

    #[test]
    fn diagnostics_carry_line_numbers() {
        let e = parse_potential("kquant-potential 1\n# note\nformat monomial\ncoefficients 1 x\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 4, .. }), "{e:?}");
        let e = parse_potential("kquant-potential 2\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 1, .. }));
        let e = parse_hermform("kquant-hermform 1\ndegree 1\n1 0 0 0\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 3, .. }), "{e:?}");
        let e = parse_hermform("kquant-hermform 1\ndegree 1\n1 0 2 0\n2 0 1 0\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 4, .. }), "{e:?}");
    }
}
