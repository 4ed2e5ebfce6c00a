//! One PASS/FAIL line per acceptance criterion, from the default experiment
//! configurations. Thresholds live in `experiments::thresholds`; the failing
//! checks of a criterion are printed in full.

use std::process::ExitCode;
use std::time::Instant;

use kquant_lab::config::build_config;
use kquant_lab::{run_experiment, Report};

const CRITERIA: [(u32, &str, &str); 12] = [
    (1, "balanced-fs", "balanced Fubini-Study"),
    (2, "quantization-identity", "exact quantization identity"),
    (3, "bergman-expansion", "Bergman expansion rate"),
    (4, "psi-expansion", "psi expansion"),
    (5, "path-independence", "path independence of I_k,sigma"),
    (6, "hessian-check", "hessian formula"),
    (7, "i-concavity", "concavity along the Bergman path"),
    (8, "z-convexity", "Z convexity along geodesics"),
    (9, "compare-LZ", "L/Z comparison"),
    (10, "quantize-E", "energy quantization"),
    (11, "almost-balanced", "almost balanced"),
    (12, "minimization", "minimization of E^G"),
];

fn summary(r: &Report) -> String {
    let shown: Vec<_> = if r.verdict {
        r.checks.iter().collect()
    } else {
        r.checks.iter().filter(|c| !c.pass).collect()
    };
    let mut parts: Vec<String> = shown
        .iter()
        .map(|c| format!("{} {:.3e} {} {:.1e}", c.name, c.measured, c.relation, c.threshold))
        .collect();
    parts.extend(r.notes.iter().filter(|n| n.contains("k0 =") || n.starts_with("aborted")).cloned());
    parts.join("; ")
}

fn main() -> ExitCode {
    let mut failed = Vec::new();
    for (n, exp, title) in CRITERIA {
        let start = Instant::now();
        let line = match build_config(Some(exp), &[], &[]).and_then(|cfg| run_experiment(&cfg)) {
            Ok(r) => {
                if !r.verdict {
                    failed.push(n);
                }
                format!("{} criterion {n:>2} {title} [{exp}]: {}", r.verdict_str(), summary(&r))
            }
            Err(e) => {
                failed.push(n);
                format!("FAIL criterion {n:>2} {title} [{exp}]: error: {e}")
            }
        };
        println!("{line} ({:.1} s)", start.elapsed().as_secs_f64());
    }
    println!(
        "acceptance: {} of {} criteria pass{}",
        CRITERIA.len() - failed.len(),
        CRITERIA.len(),
        if failed.is_empty() { String::new() } else { format!("; failing: {failed:?}") }
    );
    if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
