use std::path::Path;

use serde::Serialize;
use serde_json::json;

use plcalc::experiments::{ExperimentConfig, RatioStats};

use crate::commands::run_experiment;
use crate::error::{CliError, CliResult};
use crate::io::{emit_json, write_report};

fn experiment(value: serde_json::Value) -> ExperimentConfig {
    serde_json::from_value(value).expect("built-in suite configs are well formed")
}

/// The pinned equivalence experiments, seeded from `seed`.
pub fn acceptance_configs(seed: u64) -> Vec<ExperimentConfig> {
    let slack = 1e-9;
    let mut out = vec![experiment(json!({
        "name": "overlap_sandwich",
        "operator": {"kind": "dirichlet1d", "n": 256},
        "norm_a": {"kind": "pl_square"},
        "norm_b": {"kind": "ambient"},
        "samples": 100,
        "seed": seed,
        "assert_bracket": [0.5f64.sqrt() - slack, 1.0 + slack],
    }))];
    for (tag, theta) in [("minus_one", -1.0f64), ("half", 0.5), ("one", 1.0)] {
        let t = theta.abs();
        out.push(experiment(json!({
            "name": format!("fractional_sandwich_{tag}"),
            "operator": {"kind": "hermite", "d": 1, "modes": 32},
            "norm_a": {"kind": "pl_square", "theta": theta},
            "norm_b": {"kind": "fractional_power", "theta": theta},
            "samples": 50,
            "seed": seed,
            "assert_bracket": [2f64.powf(-t - 0.5) * (1.0 - slack), 2f64.powf(t) * (1.0 + slack)],
        })));
    }
    out.push(experiment(json!({
        "name": "strip_sandwich",
        "operator": {"kind": "dirichlet1d", "n": 64},
        "norm_a": {"kind": "strip_pl_square"},
        "norm_b": {"kind": "ambient"},
        "samples": 50,
        "seed": seed,
        "assert_bracket": [0.5f64.sqrt() - slack, 1.0 + slack],
    })));
    out.push(experiment(json!({
        "name": "graph_kernel",
        "operator": {"kind": "graph", "sigma": [[1, 1, 0, 0], [1, 1, 1, 0], [0, 1, 1, 1], [0, 0, 1, 1]]},
        "norm_a": {"kind": "pl_square", "kernel_term": true},
        "norm_b": {"kind": "ambient"},
        "samples": 50,
        "seed": seed,
    })));
    out.push(experiment(json!({
        "name": "interpolation_vs_besov",
        "operator": {"kind": "dirichlet1d", "n": 64},
        "norm_a": {"kind": "real_interpolation", "vartheta": 0.5},
        "norm_b": {"kind": "besov_discrete", "theta": 0.5, "q": 2},
        "samples": 20,
        "seed": seed,
    })));
    out
}

#[derive(Debug, Serialize)]
struct SuiteLine {
    name: String,
    passed: bool,
    samples: usize,
    ratios: RatioStats,
    bracket: Option<[f64; 2]>,
}

/// Runs every pinned experiment. With `out`, each report lands in that
/// directory next to `summary.json`; otherwise the summary goes to stdout.
pub fn acceptance(out: Option<&Path>, seed: Option<u64>, quiet: bool) -> CliResult<()> {
    let mut lines = Vec::new();
    for cfg in acceptance_configs(seed.unwrap_or(0)) {
        let report = run_experiment(&cfg)?;
        if let Some(dir) = out {
            write_report(&report, &dir.join(format!("{}.json", cfg.name)))?;
        }
        if !quiet {
            eprintln!(
                "{:<28} {}  ratio [{:.6}, {:.6}]",
                cfg.name,
                if report.passed { "pass" } else { "FAIL" },
                report.ratios.min,
                report.ratios.max
            );
        }
        lines.push(SuiteLine {
            name: cfg.name.clone(),
            passed: report.passed,
            samples: report.sample_count,
            ratios: report.ratios,
            bracket: cfg.assert_bracket,
        });
    }
    let summary = json!({ "seed": seed.unwrap_or(0), "experiments": lines });
    match out {
        Some(dir) => emit_json(&summary, Some(&dir.join("summary.json")))?,
        None => emit_json(&summary, None)?,
    }
    let failed = lines.iter().filter(|l| !l.passed).count();
    if failed == 0 {
        Ok(())
    } else {
        Err(CliError::Bracket { failed })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn configs_are_valid_and_seeded() {
        let c = acceptance_configs(17);
        assert!(c.iter().all(|e| e.seed == 17 && e.validate().is_ok()));
        let mut names: Vec<_> = c.iter().map(|e| e.name.as_str()).collect();
        names.sort_unstable();
        names.dedup();
        assert_eq!(names.len(), c.len());
    }
}
