mod energy;
mod quant;
pub mod thresholds;
mod variational;

use std::sync::Arc;

use kquant_core::functionals::GroupSpec;
use kquant_core::geometry::{build_grid, GridMode, QuadGrid, Twist};
use kquant_core::quantization::calibrate_c0;

use crate::config::{C0Choice, Experiment, ExperimentConfig, GroupChoice};
use crate::error::LabResult;
use crate::fit::fit_power_law;
use crate::report::{Env, Report, Series};

pub const CONVENTIONS: &str =
    "CP1, Vol=1, Sbar=2, N_k=k+1, Laplacian=-L/(1+L phi), sigma_k=exp(c0 V/k), V=a r d/dr";

pub(crate) fn grid_name(m: GridMode) -> &'static str {
    match m {
        GridMode::Radial => "radial",
        GridMode::Full2d => "full2d",
    }
}

pub(crate) fn twist_name(t: &Twist) -> &'static str {
    if t.is_identity() {
        "identity"
    } else {
        "gradient"
    }
}

/// Shared state handed to each experiment.
pub(crate) struct Ctx<'a> {
    pub cfg: &'a ExperimentConfig,
    pub grid: Arc<QuadGrid>,
    pub twists: Vec<Twist>,
}

impl Ctx<'_> {
    pub fn groups(&self) -> Vec<GroupSpec> {
        match self.cfg.group {
            GroupChoice::Trivial => vec![GroupSpec::Trivial],
            GroupChoice::Circle => vec![GroupSpec::circle()],
            GroupChoice::Both => vec![GroupSpec::Trivial, GroupSpec::circle()],
        }
    }

    pub fn grid_2d(&self) -> LabResult<Arc<QuadGrid>> {
        Ok(build_grid(GridMode::Full2d, self.cfg.resolution_2d)?)
    }
}

pub(crate) fn group_name(g: &GroupSpec) -> &'static str {
    match g {
        GroupSpec::Trivial => "trivial",
        GroupSpec::Circle(_) => "circle",
    }
}

/// Fits a power law to `s` in place; a fit failure is recorded as a note.
pub(crate) fn attach_fit(report: &mut Report, mut s: Series) -> Series {
    match fit_power_law(&s.points()) {
        Ok(f) => s.fit = Some(f),
        Err(e) => report.notes.push(format!("{}: {}", s.name, e)),
    }
    s
}

/// Runs one experiment. Numerical aborts become a failing report with the error
/// recorded; only configuration and I/O problems are returned as errors.
pub fn run_experiment(cfg: &ExperimentConfig) -> LabResult<Report> {
    cfg.validate()?;
    let grid = build_grid(cfg.grid, cfg.resolution)?;
    let mut twists = cfg.twists();
    let mut c0 = twists.iter().find(|t| !t.is_identity()).map(|t| t.c0).unwrap_or(match cfg.c0 {
        C0Choice::Fixed(c) => c,
        C0Choice::Calibrate => kquant_core::geometry::C0_CALIBRATED,
    });
    if cfg.c0 == C0Choice::Calibrate {
        c0 = calibrate_c0(&build_grid(GridMode::Radial, 64)?)?;
        twists = twists
            .into_iter()
            .map(|t| if t.is_identity() { t } else { t.with_c0(c0) })
            .collect();
    }
    let env = Env {
        conventions: CONVENTIONS.into(),
        grid: grid_name(cfg.grid).into(),
        resolution: cfg.resolution,
        c0,
        seed: cfg.seed,
        k_list: cfg.k_list.clone(),
        twist: twists.iter().map(twist_name).collect::<Vec<_>>().join("+"),
        group: match cfg.group {
            GroupChoice::Trivial => "trivial",
            GroupChoice::Circle => "circle",
            GroupChoice::Both => "trivial+circle",
        }
        .into(),
    };
    let report = Report::new(cfg.experiment.name(), env);
    let ctx = Ctx { cfg, grid, twists };
    let outcome = match cfg.experiment {
        Experiment::BalancedFs => quant::balanced_fs(&ctx, report.clone()),
        Experiment::QuantizationIdentity => quant::quantization_identity(&ctx, report.clone()),
        Experiment::BergmanExpansion => quant::bergman_expansion(&ctx, report.clone()),
        Experiment::PsiExpansion => quant::psi_expansion(&ctx, report.clone()),
        Experiment::SigmaBalanced => quant::sigma_balanced(&ctx, report.clone()),
        Experiment::PathIndependence => variational::path_independence(&ctx, report.clone()),
        Experiment::HessianCheck => variational::hessian_check(&ctx, report.clone()),
        Experiment::IConcavity => variational::i_concavity(&ctx, report.clone()),
        Experiment::ZConvexity => variational::z_convexity(&ctx, report.clone()),
        Experiment::CompareLz => energy::compare_lz(&ctx, report.clone()),
        Experiment::QuantizeE => energy::quantize_e(&ctx, report.clone()),
        Experiment::AlmostBalanced => energy::almost_balanced(&ctx, report.clone()),
        Experiment::Minimization => energy::minimization(&ctx, report.clone()),
    };
    Ok(match outcome {
        Ok(r) => r.finish(),
        Err(e) => {
            let mut r = report;
            r.notes.push(format!("aborted: {e}"));
            r.checks.clear();
            r.finish()
        }
    })
}
