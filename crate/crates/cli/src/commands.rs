use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::json;

use plcalc::experiments::{run_equivalence, EquivalenceReport, ExperimentConfig, NormSpec};
use plcalc::operators::{OperatorSpec, Spectral};
use plcalc::{random, Complex64, ModelOperator};

use crate::error::{CliError, CliResult};
use crate::io::{emit_json, read_json, write_report};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OperatorSummary {
    pub operator: OperatorSpec,
    pub label: String,
    pub dim: usize,
    pub rank: usize,
    pub lambda_min_positive: Option<f64>,
    pub lambda_max: Option<f64>,
    pub kernel_dim: usize,
    pub sector_angle: f64,
    pub injective: bool,
    pub bisectorial: bool,
    /// `[re, im]`, in mode order.
    pub eigenvalues: Option<Vec<[f64; 2]>>,
}

pub fn summarize(spec: &OperatorSpec) -> CliResult<OperatorSummary> {
    let op: ModelOperator = spec.build().map_err(CliError::from_build)?;
    let (lo, hi) = op.spectral_bounds();
    let nonzero = hi > 0.0;
    Ok(OperatorSummary {
        operator: spec.resolved(),
        label: op.label().into(),
        dim: op.dim(),
        rank: op.rank(),
        lambda_min_positive: nonzero.then_some(lo),
        lambda_max: nonzero.then_some(hi),
        kernel_dim: op.kernel().rank(),
        sector_angle: op.sector_angle(),
        injective: op.is_injective(),
        bisectorial: op.is_bisectorial(),
        eigenvalues: op.eigenvalues().map(|e| e.iter().map(|z| [z.re, z.im]).collect()),
    })
}

pub fn op_build(config: &Path, out: Option<&Path>) -> CliResult<()> {
    let spec: OperatorSpec = read_json(config)?;
    emit_json(&summarize(&spec)?, out)
}

/// Where `norm eval` takes its vector from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum VectorSource {
    /// Entries as `[re, im]` or plain reals.
    Values(Vec<Entry>),
    /// JSON file holding such an array.
    File(PathBuf),
    /// Unit coefficient on one mode.
    Eigenvector(usize),
    /// I.i.d. complex Gaussian entries.
    Random {
        #[serde(default)]
        seed: Option<u64>,
    },
    Zero,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Entry {
    Real(f64),
    Complex([f64; 2]),
}

impl Entry {
    fn value(self) -> Complex64 {
        match self {
            Entry::Real(a) => Complex64::new(a, 0.0),
            Entry::Complex([a, b]) => Complex64::new(a, b),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NormEvalConfig {
    pub operator: OperatorSpec,
    pub norm: NormSpec,
    pub vector: VectorSource,
    #[serde(default = "two")]
    pub pnorm: f64,
    #[serde(default)]
    pub seed: Option<u64>,
}

fn two() -> f64 {
    2.0
}

fn stochastic(norm: &NormSpec) -> bool {
    matches!(
        norm,
        NormSpec::PlRandom { ensemble: None, .. } | NormSpec::PlSup { ensemble: None, .. }
    )
}

fn load_vector(source: &VectorSource, op: &ModelOperator, seed: Option<u64>, base: &Path) -> CliResult<Vec<Complex64>> {
    let v = match source {
        VectorSource::Values(v) => v.iter().map(|e| e.value()).collect(),
        VectorSource::File(p) => {
            let path = if p.is_absolute() { p.clone() } else { base.join(p) };
            let v: Vec<Entry> = read_json(&path)?;
            v.into_iter().map(Entry::value).collect()
        }
        VectorSource::Eigenvector(k) => {
            let rank = op.rank();
            if *k >= rank {
                return Err(CliError::Malformed(format!("mode {k} out of range for rank {rank}")));
            }
            let mut c = vec![Complex64::new(0.0, 0.0); rank];
            c[*k] = Complex64::new(1.0, 0.0);
            op.synthesize(&c)
        }
        VectorSource::Random { seed: own } => {
            let s = own
                .or(seed)
                .ok_or_else(|| CliError::Malformed("a random vector needs a seed".into()))?;
            random::complex_gaussian_vec(&mut random::rng(s), op.dim())
        }
        VectorSource::Zero => vec![Complex64::new(0.0, 0.0); op.dim()],
    };
    if v.len() != op.dim() {
        return Err(CliError::Malformed(format!(
            "vector has {} entries, operator dimension is {}",
            v.len(),
            op.dim()
        )));
    }
    Ok(v)
}

pub fn norm_eval(config: &Path, out: Option<&Path>, seed: Option<u64>) -> CliResult<()> {
    let cfg: NormEvalConfig = read_json(config)?;
    let seed = seed.or(cfg.seed);
    if stochastic(&cfg.norm) && seed.is_none() {
        return Err(CliError::Malformed("a randomized norm needs a seed".into()));
    }
    if cfg.pnorm.is_nan() || cfg.pnorm < 1.0 {
        return Err(CliError::Malformed(format!("Lp exponent {} < 1", cfg.pnorm)));
    }
    let op: ModelOperator = cfg.operator.build().map_err(CliError::from_build)?;
    let base = config.parent().unwrap_or(Path::new("."));
    let x = load_vector(&cfg.vector, &op, seed, base)?;
    let norm = cfg.norm.resolved(cfg.pnorm, seed.unwrap_or(0));
    let value = norm.evaluate(&op, &x).map_err(CliError::from_norm)?;
    let doc = json!({
        "norm": value,
        "provenance": {
            "library": "plcalc",
            "version": env!("CARGO_PKG_VERSION"),
            "scalar": "f64",
            "operator": cfg.operator.resolved(),
            "norm": norm,
            "vector": cfg.vector,
            "pnorm": cfg.pnorm,
            "seed": seed,
        }
    });
    emit_json(&doc, out)
}

/// Runs one experiment, classifying failures by stage.
pub fn run_experiment(cfg: &ExperimentConfig) -> CliResult<EquivalenceReport> {
    cfg.validate().map_err(CliError::from_build)?;
    let _: ModelOperator = cfg.operator.build().map_err(CliError::from_build)?;
    run_equivalence::<f64>(cfg).map_err(CliError::from_norm)
}

pub fn experiment_run(config: &Path, out: Option<&Path>, seed: Option<u64>, quiet: bool) -> CliResult<()> {
    let mut cfg: ExperimentConfig = read_json(config)?;
    if let Some(s) = seed {
        cfg.seed = s;
    }
    let report = run_experiment(&cfg)?;
    match out {
        Some(p) => {
            let files = write_report(&report, p)?;
            if !quiet {
                for f in files {
                    eprintln!("wrote {}", f.display());
                }
            }
        }
        None => emit_json(&report, None)?,
    }
    if !quiet {
        let r = &report.ratios;
        eprintln!(
            "{}: {} samples, ratio min {:.6} median {:.6} max {:.6}, {}",
            report.config.name,
            report.sample_count,
            r.min,
            r.median,
            r.max,
            if report.passed { "pass" } else { "FAIL" }
        );
    }
    if report.passed {
        Ok(())
    } else {
        Err(CliError::Bracket {
            failed: report.failures.len(),
        })
    }
}
