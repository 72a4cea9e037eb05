//! Grid estimators for `𝓑^α_{∞,1}`, `𝓑^β_{∞,∞}`, the Mihlin classes and the
//! classical Mihlin seminorm.
//!
//! `‖g‖_{𝓑^α_{∞,1}} ≈ ‖g‖_∞ + ∫_{−1}^{1} |h|^{−α} sup_x |Δ^M_h g(x)| dh/|h|`.
//! Steps are aligned with the sampling grid, `h = k·dx`, so every difference
//! reuses samples; `|h| < dx` is handled by the leading Taylor term.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::jet::JET_ORDER;
use crate::partitions::{PartitionKind, PartitionOfUnity};
use crate::scalar::{cr, czero, Real, C};
use crate::tol;

use super::Symbol;

/// `Δ^M_h g(x) = Σ_j (−1)^{M−j} C(M,j) g(x + jh)`.
pub fn iterated_difference<T: Real, G: Fn(T) -> C<T>>(g: &G, x: T, h: T, m: usize) -> C<T> {
    difference_weights::<T>(m)
        .iter()
        .enumerate()
        .fold(czero(), |acc, (j, w)| acc + g(x + h * T::from_usize_lossy(j)) * *w)
}

fn difference_weights<T: Real>(m: usize) -> Vec<T> {
    let mut w = Vec::with_capacity(m + 1);
    let mut binom = 1.0f64;
    for j in 0..=m {
        let sign = if (m - j).is_multiple_of(2) { 1.0 } else { -1.0 };
        w.push(T::lit(sign * binom));
        binom = binom * (m - j) as f64 / (j + 1) as f64;
    }
    w
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BesovOptions<T> {
    /// Region of interest `[lo, hi]`.
    pub window: (T, T),
    /// Sampling step.
    pub dx: T,
    /// Smallest `|h|` in the smoothness integral.
    pub h_min: T,
    /// Step sizes per octave of `|h|`.
    pub per_octave: usize,
    /// Run the refinement-stability gate.
    pub gate: bool,
    /// Also require stability when the window grows by 1 on each side.
    pub widen: bool,
}

impl<T: Real> BesovOptions<T> {
    pub fn on_window(lo: T, hi: T) -> Self {
        Self {
            window: (lo, hi),
            dx: T::lit(1.0 / 256.0),
            h_min: T::lit(1e-6),
            per_octave: 16,
            gate: true,
            widen: false,
        }
    }
}

/// How an estimate was produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateMethod<T> {
    pub estimator: String,
    pub alpha: T,
    pub m: usize,
    /// Grid step of the reported value.
    pub step: T,
    pub window: (T, T),
    pub points: usize,
    /// Value on the coarser grid, when the gate ran.
    pub coarse_value: Option<T>,
    /// Value on the widened window, when the gate ran.
    pub widened_value: Option<T>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormEstimate<T> {
    pub value: T,
    pub method: EstimateMethod<T>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Smoothness {
    Integral,
    Sup,
}

fn check_params<T: Real>(alpha: T, m: usize, window: (T, T), dx: T) -> Result<()> {
    if !(alpha > T::zero()) || alpha >= T::from_usize_lossy(m) {
        return invalid(format!("need 0 < α < M, got α = {alpha}, M = {m}"));
    }
    let (lo, hi) = window;
    if !(lo.is_finite() && hi.is_finite() && dx > T::zero()) || hi - lo < dx + dx {
        return invalid(format!("evaluation window [{lo}, {hi}] too small for step {dx}"));
    }
    Ok(())
}

fn raw<T: Real, G: Fn(T) -> C<T> + Sync>(
    g: &G,
    alpha: T,
    m: usize,
    window: (T, T),
    dx: T,
    opts: &BesovOptions<T>,
    kind: Smoothness,
) -> (T, usize) {
    let (lo, hi) = window;
    let nw = ((hi - lo) / dx).ceil().to_usize().unwrap_or(1).max(2);
    let dx = (hi - lo) / T::from_usize_lossy(nw);
    let kmax = (T::one() / dx).floor().to_usize().unwrap_or(1).max(1);
    let pad = m * kmax;
    let total = nw + 2 * pad + 1;
    let values: Vec<C<T>> = (0..total)
        .into_par_iter()
        .map(|i| g(lo + dx * (T::from_usize_lossy(i) - T::from_usize_lossy(pad))))
        .collect();
    let sup = values[pad..=pad + nw].iter().map(|v| v.norm()).fold(T::zero(), T::max);

    let mut ks = BTreeSet::new();
    let mut j = 0usize;
    loop {
        let k = 2f64.powf(j as f64 / opts.per_octave as f64).round() as usize;
        if k > kmax {
            break;
        }
        ks.insert(k);
        j += 1;
    }
    ks.insert(kmax);
    let ks: Vec<usize> = ks.into_iter().collect();
    let w = difference_weights::<T>(m);
    let s: Vec<T> = ks
        .par_iter()
        .map(|&k| {
            let mut best = T::zero();
            for i in pad - m * k..=pad + nw {
                let mut acc = czero::<T>();
                for (jj, wj) in w.iter().enumerate() {
                    acc += values[i + jj * k] * *wj;
                }
                best = best.max(acc.norm());
            }
            best
        })
        .collect();
    let h = |k: usize| dx * T::from_usize_lossy(k);
    let f: Vec<T> = ks.iter().zip(&s).map(|(&k, &sk)| h(k).powf(-alpha) * sk).collect();
    let mt = T::from_usize_lossy(m);
    let smooth = match kind {
        Smoothness::Integral => {
            let mut integral = T::zero();
            for i in 1..ks.len() {
                let dl = (h(ks[i]) / h(ks[i - 1])).ln();
                integral += (f[i] + f[i - 1]) * dl / T::lit(2.0);
            }
            if opts.h_min < dx {
                let e = mt - alpha;
                integral += s[0] / dx.powf(mt) * (dx.powf(e) - opts.h_min.powf(e)) / e;
            }
            integral * T::lit(2.0)
        }
        Smoothness::Sup => f.iter().copied().fold(T::zero(), T::max),
    };
    (sup + smooth, total)
}

fn gate_check<T: Real>(base: T, other: T) -> Result<()> {
    let scale = base.abs().max(other.abs());
    if (base - other).abs() > T::lit(tol::REFINEMENT_GATE) * scale {
        return Err(Error::UnstableEstimate {
            coarse: base.to_f64_lossy(),
            fine: other.to_f64_lossy(),
        });
    }
    Ok(())
}

fn finite_or_err<T: Real>(v: T) -> Result<T> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Invariant(format!("non-finite norm estimate {v}")))
    }
}

fn gated<T: Real, G: Fn(T) -> C<T> + Sync>(
    g: &G,
    alpha: T,
    m: usize,
    opts: &BesovOptions<T>,
    kind: Smoothness,
    name: &str,
) -> Result<NormEstimate<T>> {
    check_params(alpha, m, opts.window, opts.dx)?;
    let (v0, n0) = raw(g, alpha, m, opts.window, opts.dx, opts, kind);
    let v0 = finite_or_err(v0)?;
    let mut method = EstimateMethod {
        estimator: name.to_string(),
        alpha,
        m,
        step: opts.dx,
        window: opts.window,
        points: n0,
        coarse_value: None,
        widened_value: None,
    };
    if !opts.gate {
        return Ok(NormEstimate { value: v0, method });
    }
    let half = opts.dx / T::lit(2.0);
    let (v1, n1) = raw(g, alpha, m, opts.window, half, opts, kind);
    let v1 = finite_or_err(v1)?;
    gate_check(v0, v1)?;
    if opts.widen {
        let (lo, hi) = opts.window;
        let (v2, _) = raw(g, alpha, m, (lo - T::one(), hi + T::one()), opts.dx, opts, kind);
        let v2 = finite_or_err(v2)?;
        gate_check(v0, v2)?;
        method.widened_value = Some(v2);
    }
    method.step = half;
    method.points = n1;
    method.coarse_value = Some(v0);
    Ok(NormEstimate { value: v1, method })
}

/// `‖g‖_{𝓑^α_{∞,1}}` on the window in `opts`; requires `0 < α < M`.
pub fn besov_norm_inf_1<T: Real, G: Fn(T) -> C<T> + Sync>(
    g: G,
    alpha: T,
    m: usize,
    opts: &BesovOptions<T>,
) -> Result<NormEstimate<T>> {
    gated(&g, alpha, m, opts, Smoothness::Integral, "besov_inf_1")
}

/// `‖g‖_∞ + sup_{0<|h|≤1} |h|^{−β} sup_x |Δ^M_h g(x)|`.
pub fn besov_norm_inf_inf<T: Real, G: Fn(T) -> C<T> + Sync>(
    g: G,
    beta: T,
    m: usize,
    opts: &BesovOptions<T>,
) -> Result<NormEstimate<T>> {
    gated(&g, beta, m, opts, Smoothness::Sup, "besov_inf_inf")
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MihlinOptions<T> {
    /// Window in `log t`; derived from the symbol when absent.
    pub window: Option<(T, T)>,
    pub dx: T,
    pub h_min: T,
    pub per_octave: usize,
    pub gate: bool,
}

impl<T: Real> Default for MihlinOptions<T> {
    fn default() -> Self {
        let b = BesovOptions::on_window(T::zero(), T::one());
        Self {
            window: None,
            dx: b.dx,
            h_min: b.h_min,
            per_octave: b.per_octave,
            gate: true,
        }
    }
}

impl<T: Real> MihlinOptions<T> {
    /// Window `[log λ_min − 3, log λ_max + 3]` for a spectrum in `[λ_min, λ_max]`.
    pub fn for_spectrum(lambda_min: T, lambda_max: T) -> Self {
        let three = T::lit(3.0);
        Self {
            window: Some((lambda_min.ln() - three, lambda_max.ln() + three)),
            ..Self::default()
        }
    }

    pub fn without_gate(mut self) -> Self {
        self.gate = false;
        self
    }
}

/// Default log-window for `f ∘ exp`.
pub fn log_window<T: Real>(f: &Symbol<T>) -> (T, T) {
    let ten = T::lit(10.0);
    if let Some((a, b)) = f.support() {
        if b > T::zero() {
            let lo = if a > T::zero() { a.ln() } else { -ten };
            let hi = b.ln();
            if hi - lo >= T::lit(0.25) {
                return (lo, hi);
            }
            let mid = (lo + hi) / T::lit(2.0);
            return (mid - T::lit(0.125), mid + T::lit(0.125));
        }
    }
    if let Some(d) = f.decay().filter(|d| d.is_decaying()) {
        let floor = T::lit(1e-8);
        if d.c > floor {
            let l = (floor / d.c).ln();
            return (l / d.eps0, -l / d.eps_inf);
        }
        return (-T::one(), T::one());
    }
    (-ten, ten)
}

/// `‖f‖_{𝓜^α} = ‖f ∘ exp‖_{𝓑^α_{∞,1}}`.
pub fn mihlin_norm<T: Real>(f: &Symbol<T>, alpha: T, m: usize, opts: &MihlinOptions<T>) -> Result<NormEstimate<T>> {
    let window = opts.window.unwrap_or_else(|| log_window(f));
    let b = BesovOptions {
        window,
        dx: opts.dx,
        h_min: opts.h_min,
        per_octave: opts.per_octave,
        gate: opts.gate,
        widen: opts.gate,
    };
    let g = |x: T| f.eval(x.exp());
    let mut est = gated(&g, alpha, m, &b, Smoothness::Integral, "mihlin")?;
    est.method.estimator = "mihlin".into();
    Ok(est)
}

fn classical_sup<T: Real>(f: &Symbol<T>, beta: usize, center: T, per_decade: usize) -> (T, usize) {
    let octaves = 80.0;
    // Odd count so the centre itself is a node.
    let n = 2 * ((octaves * 2f64.log10() * per_decade as f64 / 2.0).ceil() as usize) + 1;
    let v = (0..n)
        .into_par_iter()
        .map(|i| {
            let x = -40.0 + octaves * i as f64 / (n - 1) as f64;
            let t = center * T::lit(2f64.powf(x));
            let jet = f.jet_at(cr(t));
            (0..=beta)
                .map(|k| t.powi(k as i32) * jet.derivative(k).norm())
                .fold(T::zero(), |a, b| if b.is_nan() || a.is_nan() { T::nan() } else { a.max(b) })
        })
        .collect::<Vec<T>>();
    let sup = v.iter().copied().fold(T::zero(), |a, b| if b.is_nan() || a.is_nan() { T::nan() } else { a.max(b) });
    (sup, n)
}

/// `sup_{t>0, k≤β} |t^k f^{(k)}(t)|` on a log grid over `[2⁻⁴⁰s, 2⁴⁰s]`, where
/// `s` is the geometric centre of the symbol's support (or 1).
pub fn mihlin_seminorm_classical<T: Real>(f: &Symbol<T>, beta: usize) -> Result<NormEstimate<T>> {
    if beta > JET_ORDER {
        return invalid(format!("derivative order {beta} exceeds {JET_ORDER}"));
    }
    let center = match f.support() {
        Some((a, b)) if a > T::zero() => (a * b).sqrt(),
        _ => T::one(),
    };
    let (v0, _) = classical_sup(f, beta, center, 64);
    let (v1, n1) = classical_sup(f, beta, center, 128);
    let v0 = finite_or_err(v0)?;
    let v1 = finite_or_err(v1)?;
    gate_check(v0, v1)?;
    let log_center = center.ln();
    let span = T::lit(40.0) * T::LN_2();
    Ok(NormEstimate {
        value: v1,
        method: EstimateMethod {
            estimator: "mihlin_classical".into(),
            alpha: T::from_usize_lossy(beta),
            m: beta,
            step: T::LN_10() / T::lit(128.0),
            window: (log_center - span, log_center + span),
            points: n1,
            coarse_value: Some(v0),
            widened_value: None,
        },
    })
}

/// `Σ_n ‖f φ̇_n‖_{𝓜^α}` with per-block values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct L1NormEstimate<T> {
    pub value: T,
    pub blocks: Vec<(i32, T)>,
    /// Estimated contribution of the blocks not computed.
    pub tail: T,
}

const L1_RELATIVE_TAIL: f64 = 1e-6;
const L1_MAX_BLOCKS: usize = 160;

/// `‖f‖_{𝓜^α₁} = Σ_n ‖f φ̇_n‖_{𝓜^α}` over a homogeneous dyadic partition.
///
/// Compactly supported symbols sum exactly over the active blocks. Otherwise
/// blocks are added outward until the tail implied by the decay certificate
/// (scaled by the worst observed ratio of block norm to certified block sup)
/// drops below `1e-6` of the sum.
pub fn mihlin_l1_norm<T: Real>(
    f: &Symbol<T>,
    alpha: T,
    m: usize,
    partition: &PartitionOfUnity,
    opts: &MihlinOptions<T>,
) -> Result<L1NormEstimate<T>> {
    if partition.kind() != PartitionKind::HomogeneousDyadic {
        return invalid("mihlin_l1_norm needs a homogeneous dyadic partition");
    }
    let block_opts = MihlinOptions { window: None, ..*opts };
    let block = |n: i32| -> Result<T> {
        let piece = f.mul(&Symbol::window(*partition, n));
        Ok(mihlin_norm(&piece, alpha, m, &block_opts)?.value)
    };

    if let Some((a, b)) = f.support().filter(|(a, _)| *a > T::zero()) {
        let blocks = partition
            .active_indices(a, b)
            .map(|n| block(n).map(|v| (n, v)))
            .collect::<Result<Vec<_>>>()?;
        let value = blocks.iter().map(|b| b.1).sum();
        return Ok(L1NormEstimate {
            value,
            blocks,
            tail: T::zero(),
        });
    }

    let cert = f.decay().filter(|d| d.is_decaying()).ok_or(Error::MissingDecayCertificate)?;
    let two = T::lit(2.0);
    let sup_bound = |n: i32| -> T {
        let e = if n >= 1 {
            -T::from_i32(n - 1).unwrap() * cert.eps_inf
        } else if n <= -1 {
            T::from_i32(n + 1).unwrap() * cert.eps0
        } else {
            T::zero()
        };
        cert.c * two.powf(e)
    };
    let mut blocks = BTreeMap::new();
    let mut kappa = T::zero();
    let add = |n: i32, blocks: &mut BTreeMap<i32, T>, kappa: &mut T| -> Result<()> {
        let v = block(n)?;
        *kappa = kappa.max(v / sup_bound(n));
        blocks.insert(n, v);
        Ok(())
    };
    add(0, &mut blocks, &mut kappa)?;
    let (mut up, mut down) = (0i32, 0i32);
    loop {
        let tail_up = kappa * cert.c * two.powf(-T::from_i32(up).unwrap() * cert.eps_inf) / (T::one() - two.powf(-cert.eps_inf));
        let tail_down = kappa * cert.c * two.powf(-T::from_i32(down).unwrap() * cert.eps0) / (T::one() - two.powf(-cert.eps0));
        let sum: T = blocks.values().copied().sum();
        let tail = tail_up + tail_down;
        if tail <= T::lit(L1_RELATIVE_TAIL) * sum || blocks.len() >= L1_MAX_BLOCKS {
            return Ok(L1NormEstimate {
                value: sum,
                blocks: blocks.into_iter().collect(),
                tail,
            });
        }
        if tail_up >= tail_down {
            up += 1;
            add(up, &mut blocks, &mut kappa)?;
        } else {
            down += 1;
            add(-down, &mut blocks, &mut kappa)?;
        }
    }
}
