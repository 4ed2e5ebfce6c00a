use rayon::prelude::*;

use kquant_core::functionals::{fk_prime, l_sigma_k, modified_k_energy, z_sigma_k};
use kquant_core::geometry::Potential;
use kquant_core::quantization::hilb;

use super::quant::push_decay_checks;
use super::thresholds::*;
use super::{attach_fit, group_name, twist_name, Ctx};
use crate::error::LabResult;
use crate::family::{configured_potential, seeded_family};
use crate::report::{Check, Report, Series};

pub fn compare_lz(ctx: &Ctx, mut r: Report) -> LabResult<Report> {
    let phi = configured_potential(ctx.cfg, &ctx.grid)?;
    for tw in &ctx.twists {
        let pts: Vec<(usize, f64)> = ctx
            .cfg
            .k_list
            .par_iter()
            .map(|&k| -> LabResult<(usize, f64)> {
                let l = l_sigma_k(&phi, k, tw)?;
                let z = z_sigma_k(&hilb(&phi, k)?, &ctx.grid, tw)?;
                Ok((k, (l - z).abs() / k as f64))
            })
            .collect::<LabResult<_>>()?;
        let s = attach_fit(&mut r, Series::new(format!("l_minus_z_over_k_{}", twist_name(tw)), pts));
        push_decay_checks(&mut r, &s, false);
        r.series.push(s);
    }
    Ok(r)
}

pub fn quantize_e(ctx: &Ctx, mut r: Report) -> LabResult<Report> {
    let cfg = ctx.cfg;
    let fam = seeded_family(&ctx.grid, cfg.seed, 8, cfg.count);
    for tw in &ctx.twists {
        let ls: Vec<Vec<f64>> = cfg
            .k_list
            .par_iter()
            .map(|&k| fam.iter().map(|p| l_sigma_k(p, k, tw).map(|l| 2.0 * l / k as f64)).collect())
            .collect::<kquant_core::Result<_>>()?;
        for grp in ctx.groups() {
            let es: Vec<f64> = fam
                .par_iter()
                .map(|p| modified_k_energy(p, &grp))
                .collect::<kquant_core::Result<_>>()?;
            let mut dev = Vec::new();
            let mut consts = Vec::new();
            for (ki, &k) in cfg.k_list.iter().enumerate() {
                let n = fam.len() as f64;
                let c = es.iter().zip(&ls[ki]).map(|(e, l)| e - l).sum::<f64>() / n;
                let d = es.iter().zip(&ls[ki]).map(|(e, l)| (l + c - e).abs()).fold(0.0, f64::max);
                dev.push((k, d));
                consts.push((k, c));
            }
            let tag = format!("{}_{}", twist_name(tw), group_name(&grp));
            let s = attach_fit(&mut r, Series::new(format!("max_deviation_{tag}"), dev));
            r.checks.push(Check::holds(format!("{} decreasing", s.name), s.is_decreasing()));
            push_decay_checks(&mut r, &s, false);
            r.series.push(s);
            r.series.push(Series::new(format!("c_k_{tag}"), consts));
        }
    }
    Ok(r)
}

pub fn almost_balanced(ctx: &Ctx, mut r: Report) -> LabResult<Report> {
    let phi = configured_potential(ctx.cfg, &ctx.grid)?;
    let star = Potential::zero(&ctx.grid);
    for tw in &ctx.twists {
        let rows: Vec<(usize, f64, f64, f64)> = ctx
            .cfg
            .k_list
            .par_iter()
            .map(|&k| -> LabResult<(usize, f64, f64, f64)> {
                let f = fk_prime(&phi, &star, k, tw)?;
                let kf = k as f64;
                let gap = (z_sigma_k(&hilb(&phi, k)?, &ctx.grid, tw)? - z_sigma_k(&hilb(&star, k)?, &ctx.grid, tw)?) / kf;
                Ok((k, f.value / kf, f.lambda_bound, gap))
            })
            .collect::<LabResult<_>>()?;
        let tag = twist_name(tw);
        let s = attach_fit(
            &mut r,
            Series::new(format!("fprime_over_k_{tag}"), rows.iter().map(|t| (t.0, t.1.abs())).collect()),
        );
        push_decay_checks(&mut r, &s, false);
        r.series.push(s);
        r.series.push(Series::new(format!("lambda_bound_{tag}"), rows.iter().map(|t| (t.0, t.2)).collect()));
        let worst = rows.iter().map(|t| t.3 - t.1).fold(f64::INFINITY, f64::min);
        r.checks.push(Check::at_least(format!("convexity chain margin ({tag})"), worst, 0.0));
        let c = rows.iter().map(|t| t.2).fold(0.0, f64::max);
        r.notes.push(format!("max |lambda|/k ({tag}) = {c:e}"));
    }
    Ok(r)
}

pub fn minimization(ctx: &Ctx, mut r: Report) -> LabResult<Report> {
    let cfg = ctx.cfg;
    let fam = seeded_family(&ctx.grid, cfg.seed, 9, cfg.count);
    let zero = Potential::zero(&ctx.grid);
    for grp in ctx.groups() {
        let e0 = modified_k_energy(&zero, &grp)?;
        let gaps: Vec<f64> = fam
            .par_iter()
            .map(|p| modified_k_energy(p, &grp).map(|e| e - e0))
            .collect::<kquant_core::Result<_>>()?;
        let s = Series::new(
            format!("energy_gap_{}", group_name(&grp)),
            gaps.iter().enumerate().map(|(i, g)| (i + 1, *g)).collect(),
        );
        r.checks.push(Check::at_least(
            format!("min E^G(phi) - E^G(0), {} group", group_name(&grp)),
            gaps.iter().copied().fold(f64::INFINITY, f64::min),
            MINIMIZATION,
        ));
        r.series.push(s);
    }
    Ok(r)
}
