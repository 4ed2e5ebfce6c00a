use rayon::prelude::*;

use kquant_core::functionals::{bk_geodesic, delta_l_sigma, z_along};
use kquant_core::geometry::{holomorphy_potential, metric_data, GridMode, Potential};
use kquant_core::quantization::{
    bergman_with_metric, fs, hilb, hilb_with_metric, psi_potential, sigma_balanced_iterate, Factorization,
};

use super::thresholds::*;
use super::{attach_fit, twist_name, Ctx};
use crate::error::LabResult;
use crate::family::{configured_potential, seeded_family, seeded_nonradial_family};
use crate::report::{Check, Report, Series};

fn sup(v: impl Iterator<Item = f64>) -> f64 {
    v.fold(0.0, |a, b| a.max(b.abs()))
}

pub fn balanced_fs(ctx: &Ctx, mut r: Report) -> LabResult<Report> {
    let mut grids = vec![ctx.grid.clone()];
    if ctx.grid.mode() == GridMode::Radial && *ctx.cfg.k_list.last().unwrap() < ctx.cfg.resolution_2d {
        grids.push(ctx.grid_2d()?);
    }
    for g in grids {
        let rows: Vec<(usize, f64, f64)> = ctx
            .cfg
            .k_list
            .par_iter()
            .map(|&k| -> LabResult<(usize, f64, f64)> {
                let zero = Potential::zero(&g);
                let m = metric_data(&zero)?;
                let rho = bergman_with_metric(&zero, &m, k, Factorization::Cholesky)?;
                let fs0 = fs(&hilb_with_metric(&zero, &m, k)?, &g)?;
                Ok((
                    k,
                    sup(rho.values.iter().map(|v| v - (k + 1) as f64)),
                    sup(fs0.values().iter().copied()),
                ))
            })
            .collect::<LabResult<_>>()?;
        let tag = super::grid_name(g.mode());
        let rho = Series::new(format!("rho_dev_{tag}"), rows.iter().map(|t| (t.0, t.1)).collect());
        let fsd = Series::new(format!("fs_hilb_{tag}"), rows.iter().map(|t| (t.0, t.2)).collect());
        r.checks.push(Check::at_most(format!("max rho dev ({tag})"), sup(rho.value.iter().copied()), BALANCED_RHO));
        r.checks.push(Check::at_most(format!("max |FS(Hilb 0)| ({tag})"), sup(fsd.value.iter().copied()), BALANCED_FS));
        r.series.push(rho);
        r.series.push(fsd);
    }
    Ok(r)
}

pub fn quantization_identity(ctx: &Ctx, mut r: Report) -> LabResult<Report> {
    let cfg = ctx.cfg;
    let fam = if ctx.grid.mode() == GridMode::Full2d {
        seeded_nonradial_family(&ctx.grid, cfg.seed, 2, cfg.count)?
    } else {
        seeded_family(&ctx.grid, cfg.seed, 2, cfg.count)
    };
    let pts: Vec<(usize, f64)> = cfg
        .k_list
        .par_iter()
        .map(|&k| -> LabResult<(usize, f64)> {
            let mut worst: f64 = 0.0;
            for phi in &fam {
                let m = metric_data(phi)?;
                let h = hilb_with_metric(phi, &m, k)?;
                let lhs = fs(&h, phi.grid())?;
                let rho = bergman_with_metric(phi, &m, k, Factorization::Eigen)?;
                let n = (k + 1) as f64;
                for i in 0..phi.values().len() {
                    let rhs = phi.values()[i] + (rho.values[i] / n).ln() / k as f64;
                    worst = worst.max((lhs.values()[i] - rhs).abs());
                }
            }
            Ok((k, worst))
        })
        .collect::<LabResult<_>>()?;
    let s = Series::new("identity_defect", pts);
    r.checks.push(Check::at_most("max identity defect", sup(s.value.iter().copied()), QUANT_IDENTITY));
    r.series.push(s);
    Ok(r)
}

pub fn bergman_expansion(ctx: &Ctx, mut r: Report) -> LabResult<Report> {
    let phi = configured_potential(ctx.cfg, &ctx.grid)?;
    let m = metric_data(&phi)?;
    let pts: Vec<(usize, f64)> = ctx
        .cfg
        .k_list
        .par_iter()
        .map(|&k| -> LabResult<(usize, f64)> {
            let rho = bergman_with_metric(&phi, &m, k, Factorization::Cholesky)?;
            let kf = k as f64;
            Ok((k, sup(rho.values.iter().zip(m.scalar()).map(|(r, s)| r - kf - s / 2.0))))
        })
        .collect::<LabResult<_>>()?;
    let s = attach_fit(&mut r, Series::new("expansion_remainder", pts));
    push_decay_checks(&mut r, &s, true);
    r.series.push(s);
    Ok(r)
}

/// Decay exponent (and optionally fit residual) checks for a fitted series.
pub(crate) fn push_decay_checks(r: &mut Report, s: &Series, with_residual: bool) {
    match &s.fit {
        Some(f) if f.exact => r.checks.push(Check::holds(format!("{} exact", s.name), true)),
        Some(f) => {
            r.checks.push(Check::at_least(format!("{} decay exponent", s.name), f.exponent, DECAY_EXPONENT));
            if with_residual {
                r.checks.push(Check::at_most(format!("{} fit residual", s.name), f.residual, FIT_RESIDUAL));
            }
        }
        None => r.checks.push(Check::holds(format!("{} fit available", s.name), false)),
    }
}

pub fn psi_expansion(ctx: &Ctx, mut r: Report) -> LabResult<Report> {
    let phi = configured_potential(ctx.cfg, &ctx.grid)?;
    let m = metric_data(&phi)?;
    for tw in ctx.twists.iter() {
        let theta = holomorphy_potential(&tw.field, &phi, &m)?;
        let pts: Vec<(usize, f64)> = ctx
            .cfg
            .k_list
            .par_iter()
            .map(|&k| -> LabResult<(usize, f64)> {
                let psi = psi_potential(&tw.lift(k), &phi, &m, k)?;
                let kf = k as f64;
                Ok((k, sup(psi.values.iter().zip(&theta).map(|(p, t)| kf * p - (t + 2.0) / 2.0))))
            })
            .collect::<LabResult<_>>()?;
        let s = attach_fit(&mut r, Series::new(format!("psi_error_{}", twist_name(tw)), pts));
        if let Some(f) = &s.fit {
            if f.exact {
                r.checks.push(Check::holds(format!("{} exact", s.name), true));
            } else {
                r.checks.push(Check::holds(format!("{} decreasing", s.name), s.is_decreasing()));
                let kl = *s.k.last().unwrap() as f64;
                r.checks.push(Check::at_most(
                    format!("{} final / fitted prediction", s.name),
                    s.last() / f.predict(kl),
                    PSI_PREDICTION_FACTOR,
                ));
            }
        } else {
            r.checks.push(Check::holds(format!("{} fit available", s.name), false));
        }
        r.series.push(s);
    }
    Ok(r)
}

pub fn sigma_balanced(ctx: &Ctx, mut r: Report) -> LabResult<Report> {
    let cfg = ctx.cfg;
    let phi0 = configured_potential(cfg, &ctx.grid)?;
    let dirs = seeded_family(&ctx.grid, cfg.seed, 3, 5);
    for &k in &cfg.k_list {
        for tw in &ctx.twists {
            let out = sigma_balanced_iterate(&phi0, k, tw, cfg.max_iter, cfg.tol)?;
            let name = format!("iteration_residual_{}_k{}", twist_name(tw), k);
            r.series.push(Series::new(
                name.clone(),
                out.log.iter().map(|l| (l.iter, l.residual)).collect(),
            ));
            let monotone = out.log.windows(2).all(|w| w[1].residual <= w[0].residual * (1.0 + 1e-9) + 1e-12);
            if !tw.is_identity() {
                // No existence statement for nontrivial twists: reported, not judged.
                r.notes.push(format!(
                    "{name}: converged={} after {} iterations, final residual {:e}",
                    out.converged,
                    out.iterations(),
                    out.log.last().map(|l| l.residual).unwrap_or(0.0)
                ));
                continue;
            }
            r.checks.push(Check::holds(format!("{name} converged"), out.converged));
            r.checks.push(Check::holds(format!("{name} non-increasing"), monotone));
            if !out.converged {
                continue;
            }
            let phi = out.potential;
            let mut worst_slope: f64 = 0.0;
            let mut worst_z: f64 = f64::INFINITY;
            let h0 = hilb(&phi, k)?;
            for d in &dirs {
                let norm = ctx.grid.integrate(&d.values().iter().map(|v| v * v).collect::<Vec<_>>()).sqrt();
                let dl = delta_l_sigma(&phi, d.values(), k, tw)?;
                worst_slope = worst_slope.max(dl.abs() / norm);
                let target = hilb(&phi.add(d.values(), 1.0), k)?;
                let geo = bk_geodesic(&h0, &target)?;
                let h = 1e-3;
                let z0 = z_along(&geo, 0.0, &ctx.grid, tw)?;
                let z1 = z_along(&geo, h, &ctx.grid, tw)?;
                worst_z = worst_z.min((z1 - z0) / h);
            }
            r.checks.push(Check::at_most(format!("|dL|/|eta| at k={k}"), worst_slope, CRITICAL_SLOPE));
            r.checks.push(Check::at_least(format!("Z one-sided slope at k={k}"), worst_z, ZMIN_SLOPE));
        }
    }
    Ok(r)
}
