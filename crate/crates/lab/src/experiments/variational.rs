use rayon::prelude::*;

use kquant_core::functionals::{
    bergman_path, bk_geodesic, i_sigma_hessian, i_sigma_k, path_second_derivative_fd, z_second_derivative_fd,
    PathChoice, PolynomialPath, SRule,
};
use kquant_core::quantization::hilb;

use super::thresholds::*;
use super::{twist_name, Ctx};
use crate::error::LabResult;
use crate::family::{configured_potential, seeded_family, seeded_nonradial_family};
use crate::report::{Check, Report, Series};

pub fn path_independence(ctx: &Ctx, mut r: Report) -> LabResult<Report> {
    let phi = configured_potential(ctx.cfg, &ctx.grid)?;
    let via = seeded_family(&ctx.grid, ctx.cfg.seed, 5, 1).remove(0);
    let rule = SRule::default();
    for tw in &ctx.twists {
        let pts: Vec<(usize, f64)> = ctx
            .cfg
            .k_list
            .par_iter()
            .map(|&k| -> LabResult<(usize, f64)> {
                let a = i_sigma_k(&phi, k, tw, &PathChoice::Linear, &rule)?;
                let b = i_sigma_k(&phi, k, tw, &PathChoice::Squared, &rule)?;
                let c = i_sigma_k(&phi, k, tw, &PathChoice::TwoLeg(via.clone()), &rule)?;
                let spread = [(a - b).abs(), (a - c).abs(), (b - c).abs()].into_iter().fold(0.0, f64::max);
                Ok((k, spread / a.abs()))
            })
            .collect::<LabResult<_>>()?;
        let s = Series::new(format!("path_spread_{}", twist_name(tw)), pts);
        r.checks.push(Check::at_most(
            format!("{} max relative spread", s.name),
            s.value.iter().fold(0.0, |a, b| a.max(*b)),
            PATH_AGREEMENT,
        ));
        r.series.push(s);
    }
    Ok(r)
}

pub fn hessian_check(ctx: &Ctx, mut r: Report) -> LabResult<Report> {
    let g = ctx.grid_2d()?;
    let cfg = ctx.cfg;
    let fam = seeded_nonradial_family(&g, cfg.seed, 6, 3 * cfg.count)?;
    let paths: Vec<PolynomialPath> = fam
        .chunks(3)
        .map(|c| PolynomialPath {
            coeffs: vec![c[0].clone(), c[1].scaled(0.5), c[2].scaled(0.5)],
        })
        .collect();
    for tw in &ctx.twists {
        let pts: Vec<(usize, f64)> = cfg
            .k_list
            .iter()
            .map(|&k| -> LabResult<(usize, f64)> {
                let errs: Vec<f64> = paths
                    .par_iter()
                    .map(|p| -> LabResult<f64> {
                        let an = i_sigma_hessian(p, 0.5, k, tw)?;
                        let fd = path_second_derivative_fd(p, 0.5, HESSIAN_STEP, k, tw)?;
                        Ok((an - fd).abs() / an.abs())
                    })
                    .collect::<LabResult<_>>()?;
                Ok((k, errs.into_iter().fold(0.0, f64::max)))
            })
            .collect::<LabResult<_>>()?;
        let s = Series::new(format!("hessian_rel_error_{}", twist_name(tw)), pts);
        r.checks.push(Check::at_most(
            format!("{} max", s.name),
            s.value.iter().fold(0.0, |a, b| a.max(*b)),
            HESSIAN_REL,
        ));
        r.series.push(s);
    }
    Ok(r)
}

pub fn i_concavity(ctx: &Ctx, mut r: Report) -> LabResult<Report> {
    let phi = configured_potential(ctx.cfg, &ctx.grid)?;
    for tw in &ctx.twists {
        let pts: Vec<(usize, f64)> = ctx
            .cfg
            .k_list
            .par_iter()
            .map(|&k| -> LabResult<(usize, f64)> {
                let path = bergman_path(&phi, k)?;
                let mut worst = f64::NEG_INFINITY;
                for s in [0.0, 0.5, 1.0] {
                    worst = worst.max(i_sigma_hessian(&path, s, k, tw)?);
                }
                Ok((k, worst))
            })
            .collect::<LabResult<_>>()?;
        // Smallest listed k from which every listed degree is concave.
        let mut k0 = None;
        for (i, &(k, _)) in pts.iter().enumerate() {
            if pts[i..].iter().all(|p| p.1 <= CONCAVITY) {
                k0 = Some(k);
                break;
            }
        }
        let name = format!("bergman_path_max_hessian_{}", twist_name(tw));
        match k0 {
            Some(k0) => {
                r.notes.push(format!("{name}: k0 = {k0}"));
                r.checks.push(Check::at_most(format!("{name} k0"), k0 as f64, CONCAVITY_K0_MAX as f64));
            }
            None => r.checks.push(Check::holds(format!("{name} k0 exists"), false)),
        }
        r.series.push(Series::new(name, pts));
    }
    Ok(r)
}

pub fn z_convexity(ctx: &Ctx, mut r: Report) -> LabResult<Report> {
    let cfg = ctx.cfg;
    let ends = seeded_family(&ctx.grid, cfg.seed, 4, 2 * cfg.count);
    let trials: Vec<(usize, usize)> = (0..cfg.count).map(|i| (i, cfg.k_list[i % cfg.k_list.len()])).collect();
    for tw in &ctx.twists {
        let vals: Vec<(usize, f64)> = trials
            .par_iter()
            .map(|&(i, k)| -> LabResult<(usize, f64)> {
                let geo = bk_geodesic(&hilb(&ends[2 * i], k)?, &hilb(&ends[2 * i + 1], k)?)?;
                Ok((k, z_second_derivative_fd(&geo, 0.5, CONVEXITY_STEP, &ctx.grid, tw)?))
            })
            .collect::<LabResult<_>>()?;
        let pts: Vec<(usize, f64)> = cfg
            .k_list
            .iter()
            .filter_map(|&k| {
                vals.iter()
                    .filter(|v| v.0 == k)
                    .map(|v| v.1)
                    .reduce(f64::min)
                    .map(|m| (k, m))
            })
            .collect();
        let s = Series::new(format!("z_second_derivative_min_{}", twist_name(tw)), pts);
        r.checks.push(Check::at_least(
            format!("{} over {} geodesics", s.name, vals.len()),
            vals.iter().map(|v| v.1).fold(f64::INFINITY, f64::min),
            CONVEXITY,
        ));
        r.series.push(s);
    }
    // Non-invariant geodesics: logged only.
    let g2 = ctx.grid_2d()?;
    let k = 4.min(cfg.resolution_2d - 1);
    let fam = seeded_nonradial_family(&g2, cfg.seed, 7, 8)?;
    for tw in &ctx.twists {
        let mut vals = Vec::new();
        for pair in fam.chunks(2) {
            let geo = bk_geodesic(&hilb(&pair[0], k)?, &hilb(&pair[1], k)?)?;
            vals.push(z_second_derivative_fd(&geo, 0.5, CONVEXITY_STEP, &g2, tw)?);
        }
        r.notes.push(format!(
            "non-invariant geodesics (k={k}, {}): Z'' = {:?}",
            twist_name(tw),
            vals
        ));
    }
    Ok(r)
}
