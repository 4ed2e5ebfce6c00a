use std::path::PathBuf;

use kquant_core::geometry::{GridMode, Twist, C0_CALIBRATED};

use crate::error::{LabError, LabResult};
use crate::report::Format;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Experiment {
    BalancedFs,
    QuantizationIdentity,
    BergmanExpansion,
    PsiExpansion,
    PathIndependence,
    HessianCheck,
    IConcavity,
    ZConvexity,
    CompareLz,
    QuantizeE,
    AlmostBalanced,
    Minimization,
    SigmaBalanced,
}

impl Experiment {
    pub const ALL: [Experiment; 13] = [
        Experiment::BalancedFs,
        Experiment::QuantizationIdentity,
        Experiment::BergmanExpansion,
        Experiment::PsiExpansion,
        Experiment::PathIndependence,
        Experiment::HessianCheck,
        Experiment::IConcavity,
        Experiment::ZConvexity,
        Experiment::CompareLz,
        Experiment::QuantizeE,
        Experiment::AlmostBalanced,
        Experiment::Minimization,
        Experiment::SigmaBalanced,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Experiment::BalancedFs => "balanced-fs",
            Experiment::QuantizationIdentity => "quantization-identity",
            Experiment::BergmanExpansion => "bergman-expansion",
            Experiment::PsiExpansion => "psi-expansion",
            Experiment::PathIndependence => "path-independence",
            Experiment::HessianCheck => "hessian-check",
            Experiment::IConcavity => "i-concavity",
            Experiment::ZConvexity => "z-convexity",
            Experiment::CompareLz => "compare-LZ",
            Experiment::QuantizeE => "quantize-E",
            Experiment::AlmostBalanced => "almost-balanced",
            Experiment::Minimization => "minimization",
            Experiment::SigmaBalanced => "sigma-balanced",
        }
    }

    pub fn summary(&self) -> &'static str {
        match self {
            Experiment::BalancedFs => "rho_k(0) = k+1 and FS(Hilb 0) = 0",
            Experiment::QuantizationIdentity => "FS(Hilb phi) = phi + (1/k) log(rho_k/N_k) on seeded potentials",
            Experiment::BergmanExpansion => "sup|rho_k - k - S/2| decays like 1/k",
            Experiment::PsiExpansion => "sup|k psi_k - (theta+2)/2| decays under the gradient twist",
            Experiment::PathIndependence => "I_k,sigma agrees along three paths",
            Experiment::HessianCheck => "second-derivative formula vs finite differences along paths",
            Experiment::IConcavity => "I_k,sigma concave along the Bergman path for k >= k0",
            Experiment::ZConvexity => "Z_k,sigma convex along invariant geodesics",
            Experiment::CompareLz => "k^-1 |L(phi) - Z(Hilb phi)| decays",
            Experiment::QuantizeE => "(2/k) L + c_k approaches the modified K-energy",
            Experiment::AlmostBalanced => "k^-1 f_k'(0) decays and the convexity chain holds",
            Experiment::Minimization => "E^G(phi) >= E^G(0) over seeded perturbations",
            Experiment::SigmaBalanced => "fixed-point iteration to a balanced metric and criticality of L",
        }
    }

    pub fn from_name(s: &str) -> Option<Experiment> {
        Experiment::ALL.iter().copied().find(|e| e.name().eq_ignore_ascii_case(s))
    }
}

/// Which twists an experiment evaluates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TwistChoice {
    Identity,
    Gradient,
    Both,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GroupChoice {
    Trivial,
    Circle,
    Both,
}

#[derive(Clone, Debug, PartialEq)]
pub enum PotentialChoice {
    Published,
    Zero,
    Coefficients(Vec<f64>),
    File(PathBuf),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum C0Choice {
    Fixed(f64),
    /// Recompute by regression at run time.
    Calibrate,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub k_list: Vec<usize>,
    pub grid: GridMode,
    pub resolution: usize,
    /// Resolution used by the parts of an experiment that need the 2D grid.
    pub resolution_2d: usize,
    pub potential: PotentialChoice,
    pub group: GroupChoice,
    pub twist: TwistChoice,
    pub amplitude: f64,
    pub c0: C0Choice,
    pub seed: u64,
    /// Size of seeded families.
    pub count: usize,
    pub tol: f64,
    pub max_iter: usize,
    pub out: Option<PathBuf>,
    pub formats: Vec<Format>,
}

impl ExperimentConfig {
    pub fn defaults(experiment: Experiment) -> Self {
        use Experiment::*;
        let k_list: Vec<usize> = match experiment {
            BalancedFs => (1..=16).collect(),
            QuantizationIdentity => vec![4, 8, 16],
            PathIndependence => vec![4, 8],
            HessianCheck => vec![4, 8],
            IConcavity => vec![1, 2, 4, 8, 16, 32],
            ZConvexity => vec![2, 4, 6, 8, 10, 12],
            SigmaBalanced => vec![8],
            _ => vec![8, 16, 32, 64],
        };
        let (twist, group) = match experiment {
            PsiExpansion => (TwistChoice::Gradient, GroupChoice::Trivial),
            PathIndependence | HessianCheck | IConcavity | ZConvexity | CompareLz => {
                (TwistChoice::Both, GroupChoice::Trivial)
            }
            Minimization => (TwistChoice::Identity, GroupChoice::Both),
            _ => (TwistChoice::Identity, GroupChoice::Trivial),
        };
        let grid = match experiment {
            QuantizationIdentity => GridMode::Full2d,
            _ => GridMode::Radial,
        };
        let count = match experiment {
            Minimization => 50,
            HessianCheck => 5,
            ZConvexity => 20,
            _ => 10,
        };
        ExperimentConfig {
            experiment,
            k_list,
            grid,
            resolution: if grid == GridMode::Full2d { 40 } else { 512 },
            resolution_2d: 24,
            potential: PotentialChoice::Published,
            group,
            twist,
            amplitude: 1.0,
            c0: C0Choice::Fixed(C0_CALIBRATED),
            seed: 20240611,
            count,
            tol: 1e-8,
            max_iter: 400,
            out: None,
            formats: vec![Format::Json],
        }
    }

    pub fn twists(&self) -> Vec<Twist> {
        let c0 = match self.c0 {
            C0Choice::Fixed(c) => c,
            C0Choice::Calibrate => C0_CALIBRATED,
        };
        let g = Twist::gradient(self.amplitude).with_c0(c0);
        match self.twist {
            TwistChoice::Identity => vec![Twist::identity()],
            TwistChoice::Gradient => vec![g],
            TwistChoice::Both => vec![Twist::identity(), g],
        }
    }

    /// Applies one `key = value` setting; `line` is only used for diagnostics.
    pub fn set(&mut self, line: usize, key: &str, value: &str) -> LabResult<()> {
        let bad = |msg: String| LabError::Config {
            line,
            field: key.to_string(),
            msg,
        };
        let num = |v: &str| -> LabResult<f64> {
            v.parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| bad(format!("not a finite number: `{v}`")))
        };
        let int = |v: &str| -> LabResult<usize> { v.parse::<usize>().map_err(|_| bad(format!("not an integer: `{v}`"))) };
        match key {
            "experiment" => {
                let e = Experiment::from_name(value).ok_or_else(|| bad(format!("unknown experiment `{value}`")))?;
                if e != self.experiment {
                    return Err(bad(format!("conflicts with `{}`", self.experiment.name())));
                }
            }
            "k" | "k_list" => {
                self.k_list = value
                    .split(',')
                    .map(|t| int(t.trim()))
                    .collect::<LabResult<Vec<usize>>>()?;
            }
            "grid" => {
                self.grid = match value {
                    "radial" => GridMode::Radial,
                    "full2d" => GridMode::Full2d,
                    _ => return Err(bad(format!("expected radial or full2d, got `{value}`"))),
                }
            }
            "resolution" => self.resolution = int(value)?,
            "resolution_2d" => self.resolution_2d = int(value)?,
            "potential" => {
                self.potential = if value == "published" {
                    PotentialChoice::Published
                } else if value == "zero" {
                    PotentialChoice::Zero
                } else if let Some(path) = value.strip_prefix("file:") {
                    PotentialChoice::File(PathBuf::from(path))
                } else {
                    let c = value
                        .trim_start_matches("coeffs:")
                        .split(',')
                        .map(|t| num(t.trim()))
                        .collect::<LabResult<Vec<f64>>>()?;
                    PotentialChoice::Coefficients(c)
                }
            }
            "group" => {
                self.group = match value {
                    "trivial" => GroupChoice::Trivial,
                    "circle" => GroupChoice::Circle,
                    "both" => GroupChoice::Both,
                    _ => return Err(bad(format!("expected trivial, circle or both, got `{value}`"))),
                }
            }
            "twist" => {
                self.twist = match value {
                    "identity" => TwistChoice::Identity,
                    "gradient" => TwistChoice::Gradient,
                    "both" => TwistChoice::Both,
                    _ => return Err(bad(format!("expected identity, gradient or both, got `{value}`"))),
                }
            }
            "amplitude" => self.amplitude = num(value)?,
            "c0" => {
                self.c0 = if value == "calibrate" {
                    C0Choice::Calibrate
                } else {
                    C0Choice::Fixed(num(value)?)
                }
            }
            "seed" => self.seed = value.parse().map_err(|_| bad(format!("not an integer: `{value}`")))?,
            "count" => self.count = int(value)?,
            "tol" => self.tol = num(value)?,
            "max_iter" => self.max_iter = int(value)?,
            "out" => self.out = Some(PathBuf::from(value)),
            "format" => {
                self.formats = value
                    .split(',')
                    .map(|t| Format::from_name(t.trim()).ok_or_else(|| bad(format!("unknown format `{t}`"))))
                    .collect::<LabResult<Vec<Format>>>()?;
            }
            _ => return Err(bad("unknown key".into())),
        }
        Ok(())
    }

    pub fn validate(&self) -> LabResult<()> {
        let bad = |field: &str, msg: String| LabError::Config {
            line: 0,
            field: field.into(),
            msg,
        };
        if self.k_list.is_empty() || self.k_list[0] < 1 || self.k_list.windows(2).any(|w| w[0] >= w[1]) {
            return Err(bad("k", "must be non-empty, strictly increasing and >= 1".into()));
        }
        let check_res = |field: &str, mode: GridMode, r: usize| -> LabResult<()> {
            kquant_core::geometry::build_grid(mode, r)
                .map(|_| ())
                .map_err(|e| bad(field, e.to_string()))
        };
        check_res("resolution", self.grid, self.resolution)?;
        check_res("resolution_2d", GridMode::Full2d, self.resolution_2d)?;
        if self.grid == GridMode::Full2d {
            let kmax = *self.k_list.last().unwrap();
            if kmax >= self.resolution {
                return Err(bad("k", format!("degree {kmax} needs a full2d resolution above {kmax}")));
            }
        }
        if self.count == 0 {
            return Err(bad("count", "must be positive".into()));
        }
        if !(self.tol > 0.0) {
            return Err(bad("tol", "must be positive".into()));
        }
        Ok(())
    }
}

/// Parses a flat `key = value` file into (line, key, value) triples.
pub fn parse_pairs(text: &str) -> LabResult<Vec<(usize, String, String)>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let l = raw.split('#').next().unwrap_or("").trim();
        if l.is_empty() {
            continue;
        }
        let (k, v) = l.split_once('=').ok_or_else(|| LabError::Config {
            line: i + 1,
            field: l.to_string(),
            msg: "expected `key = value`".into(),
        })?;
        out.push((i + 1, k.trim().to_string(), v.trim().to_string()));
    }
    Ok(out)
}

/// Builds a config from file pairs and command-line overrides (which win).
pub fn build_config(
    experiment: Option<&str>,
    file_pairs: &[(usize, String, String)],
    overrides: &[(String, String)],
) -> LabResult<ExperimentConfig> {
    let named = experiment
        .map(|s| s.to_string())
        .or_else(|| file_pairs.iter().find(|p| p.1 == "experiment").map(|p| p.2.clone()))
        .ok_or_else(|| LabError::Config {
            line: 0,
            field: "experiment".into(),
            msg: "no experiment given".into(),
        })?;
    let e = Experiment::from_name(&named).ok_or_else(|| LabError::Config {
        line: file_pairs.iter().find(|p| p.1 == "experiment").map(|p| p.0).unwrap_or(0),
        field: "experiment".into(),
        msg: format!("unknown experiment `{named}`"),
    })?;
    let mut cfg = ExperimentConfig::defaults(e);
    for (line, k, v) in file_pairs {
        if k == "experiment" && experiment.is_some() {
            continue;
        }
        cfg.set(*line, k, v)?;
    }
    for (k, v) in overrides {
        cfg.set(0, k, v)?;
    }
    cfg.validate()?;
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_then_overrides() {
        let pairs = parse_pairs("# comment\nexperiment = bergman-expansion\nk = 8,16,32\nseed = 5\n").unwrap();
        let cfg = build_config(None, &pairs, &[("seed".into(), "9".into())]).unwrap();
        assert_eq!(cfg.experiment, Experiment::BergmanExpansion);
        assert_eq!(cfg.k_list, vec![8, 16, 32]);
        assert_eq!(cfg.seed, 9);
    }

    #[test]
    fn diagnostics() {
        let pairs = parse_pairs("experiment = minimization\n\nk = 8,x\n").unwrap();
        match build_config(None, &pairs, &[]) {
            Err(LabError::Config { line: 3, field, .. }) => assert_eq!(field, "k"),
            other => panic!("{other:?}"),
        }
        assert!(parse_pairs("novalue\n").is_err());
        let pairs = parse_pairs("k = 8,8\n").unwrap();
        assert!(build_config(Some("compare-LZ"), &pairs, &[]).is_err());
        assert!(build_config(Some("nope"), &[], &[]).is_err());
        assert!(build_config(Some("minimization"), &[], &[("resolution".into(), "4".into())]).is_err());
    }

    #[test]
    fn names_round_trip() {
        for e in Experiment::ALL {
            assert_eq!(Experiment::from_name(e.name()), Some(e));
        }
    }
}
