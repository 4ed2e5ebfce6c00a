use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use kquant_lab::config::{build_config, parse_pairs};
use kquant_lab::{emit_report, run_experiment, Experiment, LabError, LabResult};

#[derive(Parser)]
#[command(name = "kquant", about = "Quantization experiments on CP1")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run one experiment (or `all`).
    Run {
        #[arg(long)]
        experiment: Option<String>,
        /// Flat `key = value` file; flags below override it.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Comma-separated degrees, e.g. 8,16,32,64.
        #[arg(long)]
        k: Option<String>,
        #[arg(long)]
        resolution: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// csv, json or svg; comma-separated for several.
        #[arg(long)]
        format: Option<String>,
        /// Extra `key=value` overrides.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
    },
    /// List experiments.
    List,
}

fn main() -> ExitCode {
    match real_main() {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn real_main() -> LabResult<bool> {
    match Cli::parse().cmd {
        Cmd::List => {
            for e in Experiment::ALL {
                println!("{:<22} {}", e.name(), e.summary());
            }
            Ok(true)
        }
        Cmd::Run {
            experiment,
            config,
            k,
            resolution,
            seed,
            out,
            format,
            set,
        } => {
            let pairs = match &config {
                Some(p) => parse_pairs(&std::fs::read_to_string(p).map_err(|e| LabError::Io {
                    path: p.display().to_string(),
                    msg: e.to_string(),
                })?)?,
                None => Vec::new(),
            };
            let mut overrides: Vec<(String, String)> = Vec::new();
            if let Some(k) = k {
                overrides.push(("k".into(), k));
            }
            if let Some(r) = resolution {
                overrides.push(("resolution".into(), r.to_string()));
            }
            if let Some(s) = seed {
                overrides.push(("seed".into(), s.to_string()));
            }
            if let Some(o) = &out {
                overrides.push(("out".into(), o.display().to_string()));
            }
            if let Some(f) = format {
                overrides.push(("format".into(), f));
            }
            for s in set {
                let (k, v) = s.split_once('=').ok_or_else(|| LabError::Config {
                    line: 0,
                    field: s.clone(),
                    msg: "expected KEY=VALUE".into(),
                })?;
                overrides.push((k.trim().into(), v.trim().into()));
            }
            let names: Vec<String> = match experiment.as_deref() {
                Some("all") => Experiment::ALL.iter().map(|e| e.name().to_string()).collect(),
                Some(n) => vec![n.to_string()],
                None => vec![pairs
                    .iter()
                    .find(|p| p.1 == "experiment")
                    .map(|p| p.2.clone())
                    .ok_or_else(|| LabError::Config {
                        line: 0,
                        field: "experiment".into(),
                        msg: "no experiment given".into(),
                    })?],
            };
            let mut all_pass = true;
            for name in names {
                let cfg = build_config(Some(&name), &pairs, &overrides)?;
                let report = run_experiment(&cfg)?;
                for c in &report.checks {
                    println!(
                        "{} {}: {} {:e} {} {:e}",
                        if c.pass { "PASS" } else { "FAIL" },
                        report.experiment,
                        c.name,
                        c.measured,
                        c.relation,
                        c.threshold
                    );
                }
                for n in &report.notes {
                    println!("note {}: {}", report.experiment, n);
                }
                println!("{} {}", report.verdict_str(), report.experiment);
                if let Some(dir) = &cfg.out {
                    for p in emit_report(&report, dir, &cfg.formats)? {
                        println!("wrote {}", p.display());
                    }
                }
                all_pass &= report.verdict;
            }
            Ok(all_pass)
        }
    }
}
