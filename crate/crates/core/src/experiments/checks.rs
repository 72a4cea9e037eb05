use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::calculus::{apply_spectral, symbol_at};
use crate::error::{invalid, Error, Result};
use crate::linalg::{self, CVector, Mat};
use crate::norms::{symbol_log_integral, QuadratureSpec};
use crate::operators::{ModelOperator, OperatorForm, Spectral};
use crate::partitions::{PartitionKind, PartitionOfUnity};
use crate::random;
use crate::scalar::{cr, czero, Real, C};
use crate::symbols::{mihlin_norm, MihlinOptions, Symbol};

/// Largest `‖λR(λ, A)‖` along one ray `arg λ = ±ω`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResolventRay {
    pub omega: f64,
    /// Operator-norm estimate: exact for self-adjoint operators, power
    /// iteration otherwise.
    pub sup: f64,
    /// `max_k |λ|/|λ − λ_k|` on the same radii, the value a normal operator
    /// with this spectrum would have.
    pub eigen_sup: f64,
    /// `1 / sin ω`.
    pub sin_bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResolventScan {
    pub rays: Vec<ResolventRay>,
    /// Least-squares slope of `ln sup` against `−ln ω`.
    pub alpha: f64,
    pub intercept: f64,
    pub exact: bool,
}

const SCAN_PER_DECADE: usize = 32;
const POWER_ITERATIONS: usize = 50;

fn resolvent_norm<T: Real>(op: &ModelOperator<T>, lambda: C<T>) -> Result<T> {
    let n = op.dim();
    let m = match op.form() {
        OperatorForm::SimilarityDiagonal { s, s_inv, eigenvalues } => {
            let d: Vec<C<T>> = eigenvalues.iter().map(|l| lambda / (lambda - *l)).collect();
            s.matmul(&Mat::from_diag(&d))?.matmul(s_inv)?
        }
        _ => {
            let mut cols = Vec::with_capacity(n);
            for j in 0..n {
                let mut e = vec![czero(); n];
                e[j] = cr(T::one());
                cols.push(linalg::scale(lambda, &op.resolvent_apply(lambda, &e)?));
            }
            Mat::from_fn(n, |i, j| cols[j][i])
        }
    };
    Ok(m.weighted_op_norm(op.measure(), POWER_ITERATIONS))
}

/// `sup_{|arg λ| = ω} ‖λR(λ, A)‖` per angle, sampled on log-spaced radii
/// (plus the maximizing radii `|λ_k|/cos(ω − arg λ_k)` when known).
pub fn resolvent_scan<T: Real>(op: &ModelOperator<T>, omegas: &[T]) -> Result<ResolventScan> {
    if omegas.is_empty() {
        return invalid("resolvent scan needs at least one angle");
    }
    let exact = matches!(op.form(), OperatorForm::SpectralSelfAdjoint { .. });
    let eigs = op.eigenvalues();
    let (lo, hi) = op.spectral_bounds();
    let (lo, hi) = if hi > T::zero() { (lo, hi) } else { (T::one(), T::one()) };
    let a = (lo / T::lit(1024.0)).log10();
    let b = (hi * T::lit(1024.0)).log10();
    let m = ((b - a) * T::from_usize_lossy(SCAN_PER_DECADE)).ceil().to_usize().unwrap_or(1).max(1);
    let base: Vec<T> = (0..=m)
        .map(|j| T::lit(10.0).powf(a + (b - a) * T::from_usize_lossy(j) / T::from_usize_lossy(m)))
        .collect();
    let mut rays = Vec::with_capacity(omegas.len());
    for &omega in omegas {
        if !(omega > op.sector_angle() && omega < T::PI()) {
            return Err(Error::OnSpectrum(format!(
                "ray at angle {omega} meets the spectral sector of half-angle {}",
                op.sector_angle()
            )));
        }
        let mut sup = T::zero();
        let mut eigen_sup = T::zero();
        for sign in [T::one(), -T::one()] {
            let dir = C::from_polar(T::one(), sign * omega);
            let mut radii = base.clone();
            if let Some(e) = &eigs {
                for l in e.iter().filter(|l| l.norm() > T::zero()) {
                    let c = (sign * omega - l.arg()).cos();
                    if c > T::zero() {
                        radii.push(l.norm() / c);
                    }
                }
            }
            for r in radii {
                let lambda = dir * cr(r);
                let normal = op.normal_resolvent_bound(lambda).ok();
                if let Some(v) = normal {
                    eigen_sup = eigen_sup.max(v);
                }
                let v = match (exact, normal) {
                    (true, Some(v)) => v,
                    _ => resolvent_norm(op, lambda)?,
                };
                sup = sup.max(v);
            }
        }
        rays.push(ResolventRay {
            omega: omega.to_f64_lossy(),
            sup: sup.to_f64_lossy(),
            eigen_sup: eigen_sup.to_f64_lossy(),
            sin_bound: omega.sin().recip().to_f64_lossy(),
        });
    }
    let (alpha, intercept) = fit_line(
        &rays.iter().map(|r| -r.omega.ln()).collect::<Vec<_>>(),
        &rays.iter().map(|r| r.sup.ln()).collect::<Vec<_>>(),
    );
    Ok(ResolventScan {
        rays,
        alpha,
        intercept,
        exact,
    })
}

fn fit_line(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    if sxx == 0.0 {
        return (f64::NAN, my);
    }
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    /// `(N, ‖(I − P)x − Σ_{|n| ≤ N} φ_n(A)x‖)`.
    pub defects: Vec<(u32, f64)>,
    /// Smallest `N` whose index range covers the spectrum.
    pub covered_n: u32,
    pub covered_defect: f64,
    /// Defect of the covering sum accumulated in a seeded random order.
    pub permuted_defect: f64,
    pub norm: f64,
}

/// Defect of the partial sums `Σ_{|n| ≤ N} φ_n(A)x` (over `0 ≤ n ≤ N` for
/// inhomogeneous families).
pub fn convergence_check<T: Real, S: Spectral<T> + ?Sized>(
    op: &S,
    p: &PartitionOfUnity,
    x: &[C<T>],
    n_max: u32,
    seed: u64,
) -> Result<ConvergenceReport> {
    let coeffs = op.analyze(x)?;
    let modes = op.modes()?;
    let kernel = op.kernel_modes();
    let dyadic = p.kind() != PartitionKind::Equidistant;
    let mut lo = T::infinity();
    let mut hi = T::neg_infinity();
    let mut keys = Vec::with_capacity(modes.len());
    for (k, z) in modes.iter().enumerate() {
        if kernel.get(k).copied().unwrap_or(false) {
            keys.push(None);
            continue;
        }
        if z.im != T::zero() {
            return Err(Error::SymbolDomain(format!("spectral windows need a real spectrum, found {z}")));
        }
        let key = if dyadic { z.re.abs() } else { z.re };
        lo = lo.min(key);
        hi = hi.max(key);
        keys.push(Some(z.re));
    }
    let target_c: Vec<C<T>> = coeffs
        .iter()
        .zip(&keys)
        .map(|(c, k)| if k.is_some() { *c } else { czero() })
        .collect();
    let target = op.synthesize(&target_c);
    let m = op.measure();
    let floor = p.min_index().unwrap_or(i32::MIN);
    let range = if lo <= hi { Some(p.active_indices(lo, hi)) } else { None };
    let covered_n = range
        .as_ref()
        .map_or(0, |r| r.start().unsigned_abs().max(r.end().unsigned_abs()));
    let block = |n: i32| -> CVector<T> {
        let c: Vec<C<T>> = coeffs
            .iter()
            .zip(&keys)
            .map(|(a, k)| match k {
                Some(l) => *a * cr(p.window(n, *l)),
                None => czero(),
            })
            .collect();
        op.synthesize(&c)
    };
    let indices = |big: u32| -> Vec<i32> {
        let big = big as i32;
        (-big..=big).filter(|n| *n >= floor).collect()
    };
    let top = n_max.max(covered_n);
    let mut defects = Vec::with_capacity(top as usize + 1);
    let mut partial = vec![czero(); x.len()];
    let mut included: Vec<i32> = Vec::new();
    let mut covered_defect = f64::NAN;
    for big in 0..=top {
        for n in indices(big) {
            if !included.contains(&n) {
                linalg::axpy(cr(T::one()), &block(n), &mut partial);
                included.push(n);
            }
        }
        let d = m.norm(&linalg::sub(&target, &partial)).to_f64_lossy();
        if big <= n_max {
            defects.push((big, d));
        }
        if big == covered_n {
            covered_defect = d;
        }
    }
    let mut order = indices(covered_n);
    let mut r = random::rng(seed);
    for i in (1..order.len()).rev() {
        order.swap(i, r.gen_range(0..=i));
    }
    let mut permuted = vec![czero(); x.len()];
    for n in order {
        linalg::axpy(cr(T::one()), &block(n), &mut permuted);
    }
    Ok(ConvergenceReport {
        defects,
        covered_n,
        covered_defect,
        permuted_defect: m.norm(&linalg::sub(&target, &permuted)).to_f64_lossy(),
        norm: m.norm(x).to_f64_lossy(),
    })
}

/// `g = |ψ|² / c` with `c = ∫₀^∞ |ψ(t)|² dt/t`, so that `∫ g(t) dt/t = 1`.
pub fn normalized_square_symbol<T: Real>(psi: &Symbol<T>, quad: &QuadratureSpec) -> Result<(Symbol<T>, T)> {
    let g = psi.abs_square();
    let c = symbol_log_integral(&g, T::zero(), T::one(), quad)?;
    if !(c > T::zero() && c.is_finite()) {
        return Err(Error::Invariant(format!("∫|{}|² dt/t = {c}", psi.name())));
    }
    Ok((g.scale(cr(c.recip())).with_name(&format!("|{}|^2/{c}", psi.name())), c))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McIntoshReport {
    /// `‖∫ g(tA)x dt/t − (I − P)x‖ / ‖x‖`.
    pub residual: f64,
    pub nodes: usize,
    pub tail: f64,
}

/// Quadrature residual of `x = ∫₀^∞ g(tA)x dt/t` on the injective part.
pub fn mcintosh_check<T: Real, S: Spectral<T> + ?Sized>(
    op: &S,
    g: &Symbol<T>,
    x: &[C<T>],
    quad: &QuadratureSpec,
) -> Result<McIntoshReport> {
    linalg::check_len(x, op.measure().len())?;
    let modes = op.modes()?;
    let kernel = op.kernel_modes();
    let live: Vec<T> = modes
        .iter()
        .enumerate()
        .filter(|(k, _)| !kernel.get(*k).copied().unwrap_or(false))
        .map(|(_, z)| z.norm())
        .collect();
    let nx = op.measure().norm(x);
    if live.is_empty() || nx == T::zero() {
        return Ok(McIntoshReport {
            residual: 0.0,
            nodes: 0,
            tail: 0.0,
        });
    }
    let lmin = live.iter().copied().fold(T::infinity(), T::min);
    let lmax = live.iter().copied().fold(T::zero(), T::max);
    let r = quad.resolve(g, T::zero(), T::one(), lmin, lmax)?;
    let coeffs = op.analyze(x)?;
    let mut diff = Vec::with_capacity(coeffs.len());
    for (k, (c, z)) in coeffs.iter().zip(&modes).enumerate() {
        if kernel.get(k).copied().unwrap_or(false) {
            diff.push(czero());
            continue;
        }
        let mut acc: C<T> = czero();
        for (t, w) in r.nodes.iter().zip(&r.weights) {
            acc += symbol_at(g, *z * cr(*t))? * cr(*w);
        }
        diff.push(*c * (acc - cr(T::one())));
    }
    let res = op.measure().norm(&op.synthesize(&diff)) / nx;
    Ok(McIntoshReport {
        residual: res.to_f64_lossy(),
        nodes: r.nodes.len(),
        tail: r.tail.to_f64_lossy(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiplierRow {
    /// `"one"`, `"window0"` or `"random:<i>"`.
    pub symbol: String,
    pub op_norm: f64,
    pub mihlin_norm: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiplierReport {
    pub alpha: f64,
    pub order: usize,
    pub dim: usize,
    pub rows: Vec<MultiplierRow>,
    /// Largest ratio over the random symbols.
    pub max_ratio: f64,
}

/// `f = Σ_n a_n φ̇_n` evaluated through the two live windows at `t`.
fn block_symbol<T: Real>(p: PartitionOfUnity, first: i32, coeffs: Vec<T>) -> Symbol<T> {
    Symbol::custom(
        "random_blocks",
        move |z: C<T>| {
            let t = z.re;
            if !(t > T::zero()) {
                return czero();
            }
            let k = t.log2().floor().to_i32().unwrap_or(i32::MIN / 2);
            let mut s = T::zero();
            for n in [k, k + 1] {
                if let Some(a) = usize::try_from(n - first).ok().and_then(|i| coeffs.get(i)) {
                    s += *a * p.window(n, t);
                }
            }
            cr(s)
        },
        false,
        None,
    )
}

/// `‖f(A)‖₂→₂ / ‖f‖_{𝓜^α}` over random block symbols `f = Σ a_n φ̇_n` with
/// `a_n` uniform in `[−1, 1]` on the blocks meeting the spectrum, plus the
/// constant symbol and `φ̇₀`.
pub fn multiplier_bound_check<T: Real>(
    op: &ModelOperator<T>,
    p: &PartitionOfUnity,
    alpha: T,
    trials: usize,
    seed: u64,
) -> Result<MultiplierReport> {
    if p.kind() != PartitionKind::HomogeneousDyadic {
        return invalid("multiplier bound study needs a homogeneous dyadic partition");
    }
    if !(alpha > T::zero() && alpha.is_finite()) {
        return invalid(format!("Mihlin exponent must be positive, got {alpha}"));
    }
    let order = alpha.floor().to_usize().unwrap_or(0) + 2;
    let (lmin, lmax) = op.spectral_bounds();
    if !(lmin > T::zero()) {
        return invalid("multiplier bound study needs a nonzero spectrum");
    }
    let opts = MihlinOptions::for_spectrum(lmin, lmax);
    let range = p.active_indices(lmin, lmax);
    let first = *range.start();
    let len = (range.end() - range.start() + 1) as usize;
    let mut rng = random::rng(seed);
    let coeffs: Vec<Vec<T>> = (0..trials)
        .map(|_| (0..len).map(|_| T::lit(rng.gen_range(-1.0..=1.0))).collect())
        .collect();
    let mut symbols: Vec<(String, Symbol<T>)> = vec![
        ("one".into(), Symbol::one()),
        ("window0".into(), Symbol::window(*p, 0)),
    ];
    for (i, c) in coeffs.into_iter().enumerate() {
        symbols.push((format!("random:{i}"), block_symbol(*p, first, c)));
    }
    let mut rows = Vec::with_capacity(symbols.len());
    for (name, f) in symbols {
        let op_norm = multiplier_op_norm(op, &f)?;
        let m = mihlin_norm(&f, alpha, order, &opts)?.value;
        rows.push(MultiplierRow {
            symbol: name,
            op_norm: op_norm.to_f64_lossy(),
            mihlin_norm: m.to_f64_lossy(),
            ratio: (op_norm / m).to_f64_lossy(),
        });
    }
    let max_ratio = rows
        .iter()
        .filter(|r| r.symbol.starts_with("random"))
        .map(|r| r.ratio)
        .fold(0.0, f64::max);
    Ok(MultiplierReport {
        alpha: alpha.to_f64_lossy(),
        order,
        dim: op.dim(),
        rows,
        max_ratio,
    })
}

/// `sup_k |f(λ_k)|` for self-adjoint operators; power iteration on the dense
/// `f(A)` otherwise.
fn multiplier_op_norm<T: Real>(op: &ModelOperator<T>, f: &Symbol<T>) -> Result<T> {
    let modes = op.modes()?;
    let kernel = op.kernel_modes();
    if matches!(op.form(), OperatorForm::SpectralSelfAdjoint { .. }) {
        let mut best = T::zero();
        for (k, z) in modes.iter().enumerate() {
            if !kernel.get(k).copied().unwrap_or(false) {
                best = best.max(symbol_at(f, *z)?.norm());
            }
        }
        return Ok(best);
    }
    let n = op.dim();
    let mut cols = Vec::with_capacity(n);
    for j in 0..n {
        let mut e = vec![czero(); n];
        e[j] = cr(T::one());
        cols.push(apply_spectral(op, f, &e)?);
    }
    Ok(Mat::from_fn(n, |i, j| cols[j][i]).weighted_op_norm(op.measure(), POWER_ITERATIONS))
}
