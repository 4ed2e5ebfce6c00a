use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{LabError, LabResult};
use crate::fit::PowerFit;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
    Svg,
}

impl Format {
    pub fn from_name(s: &str) -> Option<Format> {
        match s {
            "csv" => Some(Format::Csv),
            "json" => Some(Format::Json),
            "svg" => Some(Format::Svg),
            _ => None,
        }
    }

    fn ext(&self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
            Format::Svg => "svg",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Series {
    pub name: String,
    pub k: Vec<usize>,
    pub value: Vec<f64>,
    pub fit: Option<PowerFit>,
}

impl Series {
    pub fn new(name: impl Into<String>, points: Vec<(usize, f64)>) -> Self {
        let (k, value) = points.into_iter().unzip();
        Series {
            name: name.into(),
            k,
            value,
            fit: None,
        }
    }

    pub fn points(&self) -> Vec<(f64, f64)> {
        self.k.iter().zip(&self.value).map(|(&k, &v)| (k as f64, v)).collect()
    }

    pub fn last(&self) -> f64 {
        *self.value.last().unwrap_or(&f64::NAN)
    }

    pub fn is_decreasing(&self) -> bool {
        self.value.windows(2).all(|w| w[1] < w[0])
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub measured: f64,
    /// `<=`, `>=` or `holds`.
    pub relation: String,
    pub threshold: f64,
    pub pass: bool,
}

impl Check {
    pub fn at_most(name: impl Into<String>, measured: f64, threshold: f64) -> Self {
        Check {
            name: name.into(),
            measured,
            relation: "<=".into(),
            threshold,
            pass: measured <= threshold,
        }
    }

    pub fn at_least(name: impl Into<String>, measured: f64, threshold: f64) -> Self {
        Check {
            name: name.into(),
            measured,
            relation: ">=".into(),
            threshold,
            pass: measured >= threshold,
        }
    }

    pub fn holds(name: impl Into<String>, ok: bool) -> Self {
        Check {
            name: name.into(),
            measured: if ok { 1.0 } else { 0.0 },
            relation: "holds".into(),
            threshold: 1.0,
            pass: ok,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Env {
    pub conventions: String,
    pub grid: String,
    pub resolution: usize,
    pub c0: f64,
    pub seed: u64,
    pub k_list: Vec<usize>,
    pub twist: String,
    pub group: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub experiment: String,
    pub series: Vec<Series>,
    pub checks: Vec<Check>,
    pub verdict: bool,
    pub env: Env,
    pub notes: Vec<String>,
}

impl Report {
    pub fn new(experiment: &str, env: Env) -> Self {
        Report {
            experiment: experiment.into(),
            series: Vec::new(),
            checks: Vec::new(),
            verdict: false,
            env,
            notes: Vec::new(),
        }
    }

    /// Verdict = every check passed and at least one check ran.
    pub fn finish(mut self) -> Self {
        self.verdict = !self.checks.is_empty() && self.checks.iter().all(|c| c.pass);
        self
    }

    pub fn verdict_str(&self) -> &'static str {
        if self.verdict {
            "PASS"
        } else {
            "FAIL"
        }
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("experiment,k,value,fit_coeff,fit_exp,verdict\n");
        for ser in &self.series {
            let (c, e) = match &ser.fit {
                Some(f) => (format!("{:e}", f.coeff), format!("{}", f.exponent)),
                None => (String::new(), String::new()),
            };
            for (k, v) in ser.k.iter().zip(&ser.value) {
                let _ = writeln!(
                    s,
                    "{}:{},{},{:e},{},{},{}",
                    self.experiment,
                    ser.name,
                    k,
                    v,
                    c,
                    e,
                    self.verdict_str()
                );
            }
        }
        s
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("finite report")
    }

    pub fn from_json(s: &str) -> LabResult<Report> {
        serde_json::from_str(s).map_err(|e| LabError::Io {
            path: "<json>".into(),
            msg: e.to_string(),
        })
    }

    /// Log-log line plot, one polyline per series. Values at or below 1e-17 are
    /// drawn at that floor.
    pub fn to_svg(&self) -> String {
        const W: f64 = 640.0;
        const H: f64 = 420.0;
        const M: f64 = 60.0;
        const FLOOR: f64 = 1e-17;
        let pts: Vec<Vec<(f64, f64)>> = self
            .series
            .iter()
            .map(|s| {
                s.points()
                    .into_iter()
                    .filter(|(_, v)| v.is_finite())
                    .map(|(k, v)| (k.max(1.0).log10(), v.abs().max(FLOOR).log10()))
                    .collect()
            })
            .collect();
        let all = pts.iter().flatten();
        let (mut x0, mut x1, mut y0, mut y1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
        for (x, y) in all {
            x0 = x0.min(*x);
            x1 = x1.max(*x);
            y0 = y0.min(*y);
            y1 = y1.max(*y);
        }
        if x0 > x1 {
            (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
        }
        if x1 - x0 < 1e-9 {
            x1 = x0 + 1.0;
        }
        if y1 - y0 < 1e-9 {
            y0 -= 0.5;
            y1 += 0.5;
        }
        let sx = |x: f64| M + (x - x0) / (x1 - x0) * (W - 2.0 * M);
        let sy = |y: f64| H - M - (y - y0) / (y1 - y0) * (H - 2.0 * M);
        let palette = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf"];
        let mut s = String::new();
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#
        );
        let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
        let _ = writeln!(
            s,
            r#"<text x="{M}" y="24" font-family="sans-serif" font-size="14">{} ({})</text>"#,
            self.experiment,
            self.verdict_str()
        );
        let _ = writeln!(
            s,
            r#"<path d="M{M} {} L{M} {} L{} {}" stroke="black" fill="none"/>"#,
            M,
            H - M,
            W - M,
            H - M
        );
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" font-family="sans-serif" font-size="11">log10 k: {:.2} .. {:.2}; log10 value: {:.2} .. {:.2}</text>"#,
            M,
            H - 20.0,
            x0,
            x1,
            y0,
            y1
        );
        for (i, (ser, p)) in self.series.iter().zip(&pts).enumerate() {
            let color = palette[i % palette.len()];
            let coords: Vec<String> = p.iter().map(|(x, y)| format!("{:.2},{:.2}", sx(*x), sy(*y))).collect();
            let _ = writeln!(
                s,
                r#"<polyline points="{}" stroke="{color}" fill="none" stroke-width="1.5"><title>{}</title></polyline>"#,
                coords.join(" "),
                ser.name
            );
            let _ = writeln!(
                s,
                r#"<text x="{}" y="{}" font-family="sans-serif" font-size="11" fill="{color}">{}</text>"#,
                W - M - 150.0,
                M + 14.0 * i as f64,
                ser.name
            );
        }
        s.push_str("</svg>\n");
        s
    }
}

/// Writes `<dir>/<experiment>.<ext>` for each format and returns the paths.
pub fn emit_report(report: &Report, dir: &Path, formats: &[Format]) -> LabResult<Vec<PathBuf>> {
    let io = |p: &Path, e: std::io::Error| LabError::Io {
        path: p.display().to_string(),
        msg: e.to_string(),
    };
    std::fs::create_dir_all(dir).map_err(|e| io(dir, e))?;
    let mut out = Vec::new();
    for f in formats {
        let path = dir.join(format!("{}.{}", report.experiment, f.ext()));
        let body = match f {
            Format::Csv => report.to_csv(),
            Format::Json => report.to_json(),
            Format::Svg => report.to_svg(),
        };
        std::fs::write(&path, body).map_err(|e| io(&path, e))?;
        out.push(path);
    }
    Ok(out)
}
