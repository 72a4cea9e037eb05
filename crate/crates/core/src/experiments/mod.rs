//! Seeded experiments: empirical equivalence brackets between norms,
//! resolvent scans, convergence of partial block sums, the McIntosh
//! reproducing formula and the multiplier-bound study.

mod checks;
mod config;

pub use checks::{
    convergence_check, mcintosh_check, multiplier_bound_check, normalized_square_symbol, resolvent_scan,
    ConvergenceReport, McIntoshReport, MultiplierReport, MultiplierRow, ResolventRay, ResolventScan,
};
pub use config::{exponent, ExperimentConfig, FunctionSpec, NormSpec, PartitionSpec};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{lp_norm, CVector};
use crate::operators::{ModelOperator, Spectral};
use crate::random;
use crate::scalar::{cr, czero, Real, C};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SampleKind {
    Random,
    /// A single eigenvector.
    Corner,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleRow {
    pub sample_id: usize,
    pub kind: SampleKind,
    /// Eigenvalue of corner samples.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eigenvalue: Option<f64>,
    pub norm_a: f64,
    pub norm_b: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatioStats {
    pub min: f64,
    pub median: f64,
    pub max: f64,
}

impl RatioStats {
    pub fn of(ratios: &[f64]) -> Option<Self> {
        if ratios.is_empty() {
            return None;
        }
        let mut v = ratios.to_vec();
        v.sort_by(f64::total_cmp);
        let n = v.len();
        let median = if n % 2 == 1 { v[n / 2] } else { (v[n / 2 - 1] + v[n / 2]) / 2.0 };
        Some(Self {
            min: v[0],
            median,
            max: v[n - 1],
        })
    }
}

/// A sample outside the asserted bracket, stored for replay.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FailedSample {
    pub sample_id: usize,
    pub ratio: f64,
    /// Entries as `[re, im]`.
    pub vector: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub library: String,
    pub version: String,
    pub scalar: String,
    /// Description of the transition function behind every partition.
    pub partition: String,
    pub sampling: String,
}

impl Provenance {
    fn new<T: Real>() -> Self {
        Self {
            library: env!("CARGO_PKG_NAME").into(),
            version: env!("CARGO_PKG_VERSION").into(),
            scalar: std::any::type_name::<T>().into(),
            partition: "chi(t) = g(2-t)/(g(2-t)+g(t-1)), g(s) = exp(-1/s); phi_0(t) = chi(t) - chi(2t), supp [1/2, 2], crossover 3/2"
                .into(),
            sampling: "ChaCha8 stream from seed; i.i.d. complex Gaussian entries, Lp-normalized".into(),
        }
    }
}

/// Ratios `norm_a / norm_b` over seeded samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceReport {
    /// Resolved configuration, defaults included.
    pub config: ExperimentConfig,
    pub sample_count: usize,
    pub ratios: RatioStats,
    pub passed: bool,
    pub failures: Vec<FailedSample>,
    pub rows: Vec<SampleRow>,
    pub provenance: Provenance,
}

/// Eigenvectors at the smallest and largest nonzero eigenvalue and at the
/// eigenvalue nearest a dyadic crossover `3/2 · 2^m`.
fn corner_vectors<T: Real>(op: &ModelOperator<T>) -> Vec<(T, CVector<T>)> {
    let Ok(modes) = op.modes() else {
        return Vec::new();
    };
    let kernel = op.kernel_modes();
    let live: Vec<(usize, T)> = modes
        .iter()
        .enumerate()
        .filter(|(k, _)| !kernel.get(*k).copied().unwrap_or(false))
        .map(|(k, z)| (k, z.norm()))
        .collect();
    if live.is_empty() {
        return Vec::new();
    }
    let by = |f: &dyn Fn(T) -> T| {
        live.iter()
            .copied()
            .min_by(|a, b| f(a.1).partial_cmp(&f(b.1)).expect("finite"))
            .map(|(k, _)| k)
            .expect("nonempty")
    };
    let smallest = by(&|l| l);
    let largest = by(&|l| -l);
    let crossover = by(&|l| {
        let u = (l / T::lit(1.5)).log2();
        (u - u.round()).abs()
    });
    let mut picks = vec![smallest];
    for k in [largest, crossover] {
        if !picks.contains(&k) {
            picks.push(k);
        }
    }
    picks
        .into_iter()
        .map(|k| {
            let mut c = vec![czero(); modes.len()];
            c[k] = cr(T::one());
            (modes[k].norm(), op.synthesize(&c))
        })
        .collect()
}

fn normalized<T: Real>(x: CVector<T>, op: &ModelOperator<T>, p: T) -> Result<CVector<T>> {
    let n = lp_norm(&x, p, op.measure())?;
    Ok(x.into_iter().map(|v| v / cr(n)).collect())
}

/// Runs an equivalence experiment.
pub fn run_equivalence<T: Real>(config: &ExperimentConfig) -> Result<EquivalenceReport> {
    config.validate()?;
    let config = config.resolved();
    let op: ModelOperator<T> = config.operator.build()?;
    let p = T::lit(config.pnorm);
    let mut rng = random::rng(config.seed);
    let mut samples: Vec<(SampleKind, Option<f64>, CVector<T>)> = Vec::new();
    for _ in 0..config.samples {
        let x = random::complex_gaussian_vec(&mut rng, op.dim());
        samples.push((SampleKind::Random, None, normalized(x, &op, p)?));
    }
    if config.corner_cases {
        for (l, x) in corner_vectors(&op) {
            samples.push((SampleKind::Corner, Some(l.to_f64_lossy()), normalized(x, &op, p)?));
        }
    }
    let values: Vec<(T, T)> = samples
        .par_iter()
        .enumerate()
        .map(|(i, (_, _, x))| {
            let wrap = |e: Error| Error::Sample {
                index: i,
                source: Box::new(e),
            };
            let a = config.norm_a.evaluate(&op, x).map_err(wrap)?;
            let b = config.norm_b.evaluate(&op, x).map_err(wrap)?;
            Ok((a, b))
        })
        .collect::<Result<_>>()?;
    let mut rows = Vec::with_capacity(samples.len());
    let mut failures = Vec::new();
    for (i, ((kind, eig, x), (a, b))) in samples.iter().zip(&values).enumerate() {
        let (a, b) = (a.to_f64_lossy(), b.to_f64_lossy());
        let ratio = a / b;
        if !(ratio > 0.0 && ratio.is_finite()) {
            return Err(Error::Sample {
                index: i,
                source: Box::new(Error::Invariant(format!("ratio {a} / {b} is not positive and finite"))),
            });
        }
        if let Some([lo, hi]) = config.assert_bracket {
            if !(lo..=hi).contains(&ratio) {
                failures.push(FailedSample {
                    sample_id: i,
                    ratio,
                    vector: x.iter().map(|v| [v.re.to_f64_lossy(), v.im.to_f64_lossy()]).collect(),
                });
            }
        }
        rows.push(SampleRow {
            sample_id: i,
            kind: *kind,
            eigenvalue: *eig,
            norm_a: a,
            norm_b: b,
            ratio,
        });
    }
    let ratios: Vec<f64> = rows.iter().map(|r| r.ratio).collect();
    Ok(EquivalenceReport {
        sample_count: rows.len(),
        ratios: RatioStats::of(&ratios).ok_or_else(|| Error::Invariant("no samples were drawn".into()))?,
        passed: failures.is_empty(),
        failures,
        rows,
        provenance: Provenance::new::<T>(),
        config,
    })
}

/// Replays one stored sample vector.
pub fn replay_sample<T: Real>(config: &ExperimentConfig, vector: &[[f64; 2]]) -> Result<(T, T)> {
    let config = config.resolved();
    let op: ModelOperator<T> = config.operator.build()?;
    let x: Vec<C<T>> = vector.iter().map(|[a, b]| C::new(T::lit(*a), T::lit(*b))).collect();
    Ok((config.norm_a.evaluate(&op, &x)?, config.norm_b.evaluate(&op, &x)?))
}
