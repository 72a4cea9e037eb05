//! Paley-Littlewood random and square norms, discrete and continuous Besov
//! norms, continuous square functions and K-functional interpolation norms.
//!
//! All block decompositions work in the eigenbasis of a [`Spectral`]
//! operator: `φ_n(A)x = Σ_k φ_n(λ_k) ⟨x, e_k⟩ e_k`. Kernel modes are dropped,
//! so homogeneous norms see only the injective part.

mod continuous;
mod ensemble;
mod interpolation;

pub use continuous::{
    besov_continuous_norm, continuous_square_norm, symbol_log_integral, QuadratureRule, QuadratureSpec,
    ResolvedQuadrature,
};
pub use ensemble::{RandomEnsemble, SignKind};
pub use interpolation::{k_functional, k_functional_diagonal, real_interpolation_norm};

use rayon::prelude::*;

use crate::calculus::bisectorial_projections;
use crate::error::{invalid, Error, Result};
use crate::linalg::{self, lp_norm, CVector};
use crate::operators::{ModelOperator, Spectral};
use crate::partitions::{PartitionKind, PartitionOfUnity};
use crate::scalar::{cr, czero, Real, C};

/// One spectral block `φ_n(A)x` with its smoothness weight.
#[derive(Debug, Clone)]
pub struct Block<T: Real> {
    pub index: i32,
    /// `2^{nθ}` (dyadic) or `e^{nθ}` (equidistant).
    pub weight: T,
    pub vector: CVector<T>,
}

/// Monte Carlo estimate of `E‖Σ_n ε_n w_n φ_n(A)x‖_p`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RandomNormEstimate<T> {
    pub mean: T,
    pub stderr: T,
    /// Mean of the squared norms.
    pub mean_sq: T,
    pub stderr_sq: T,
    pub samples: usize,
}

/// How an inhomogeneous norm combines its blocks.
#[derive(Debug, Clone, PartialEq)]
pub enum PlVariant {
    Square,
    Random(RandomEnsemble),
}

/// Outcome of [`bisectorial_pl_bracket`]: `full / (part1 + part2)` is
/// guaranteed to lie in `[lower, upper]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BisectorialBracket<T> {
    pub full: T,
    pub part1: T,
    pub part2: T,
    pub ratio: T,
    pub lower: T,
    pub upper: T,
}

fn is_dyadic(p: &PartitionOfUnity) -> bool {
    p.kind() != PartitionKind::Equidistant
}

fn block_weight<T: Real>(p: &PartitionOfUnity, n: i32, theta: T) -> T {
    let n = T::from_i32(n).expect("i32");
    if is_dyadic(p) {
        T::lit(2.0).powf(n * theta)
    } else {
        (n * theta).exp()
    }
}

/// Real eigenvalues of the non-kernel modes, with their coordinates.
fn real_modes<T: Real, S: Spectral<T> + ?Sized>(op: &S) -> Result<Vec<Option<T>>> {
    let modes = op.modes()?;
    let kernel = op.kernel_modes();
    modes
        .iter()
        .enumerate()
        .map(|(k, z)| {
            if kernel.get(k).copied().unwrap_or(false) {
                return Ok(None);
            }
            if z.im != T::zero() {
                return Err(Error::SymbolDomain(format!(
                    "spectral windows need a real spectrum, found eigenvalue {z}"
                )));
            }
            Ok(Some(z.re))
        })
        .collect()
}

/// All nonzero blocks `φ_n(A)x` over the active index range.
pub fn spectral_blocks<T: Real, S: Spectral<T> + ?Sized>(
    op: &S,
    p: &PartitionOfUnity,
    x: &[C<T>],
    theta: T,
) -> Result<Vec<Block<T>>> {
    if !theta.is_finite() {
        return invalid(format!("smoothness weight {theta} is not finite"));
    }
    linalg::check_len(x, op.measure().len())?;
    let modes = real_modes(op)?;
    let coeffs = op.analyze(x)?;
    let key = |l: T| if is_dyadic(p) { l.abs() } else { l };
    let live: Vec<T> = modes.iter().flatten().map(|l| key(*l)).collect();
    if live.is_empty() {
        return Ok(Vec::new());
    }
    let lo = live.iter().copied().fold(T::infinity(), T::min);
    let hi = live.iter().copied().fold(T::neg_infinity(), T::max);
    let mut blocks = Vec::new();
    for n in p.active_indices(lo, hi) {
        let mut any = false;
        let c: Vec<C<T>> = coeffs
            .iter()
            .zip(&modes)
            .map(|(a, l)| match l {
                Some(l) => {
                    let w = p.window(n, *l);
                    if w != T::zero() && *a != czero() {
                        any = true;
                    }
                    *a * cr(w)
                }
                None => czero(),
            })
            .collect();
        if any {
            blocks.push(Block {
                index: n,
                weight: block_weight(p, n, theta),
                vector: op.synthesize(&c),
            });
        }
    }
    Ok(blocks)
}

fn check_pnorm<T: Real>(pnorm: T) -> Result<()> {
    if pnorm.is_nan() || pnorm < T::one() {
        return invalid(format!("Lp exponent {pnorm} < 1"));
    }
    Ok(())
}

/// `‖(Σ_n |w_n φ_n(A)x|²)^{1/2}‖_{L^p}`.
pub fn pl_square_norm<T: Real, S: Spectral<T> + ?Sized>(
    op: &S,
    p: &PartitionOfUnity,
    x: &[C<T>],
    pnorm: T,
    theta: T,
) -> Result<T> {
    check_pnorm(pnorm)?;
    let blocks = spectral_blocks(op, p, x, theta)?;
    let n = op.measure().len();
    let mut sq = vec![T::zero(); n];
    for b in &blocks {
        let w2 = b.weight * b.weight;
        for (s, v) in sq.iter_mut().zip(&b.vector) {
            *s += w2 * v.norm_sqr();
        }
    }
    let pointwise: Vec<C<T>> = sq.into_iter().map(|s| cr(s.sqrt())).collect();
    lp_norm(&pointwise, pnorm, op.measure())
}

fn signed_sum<T: Real>(blocks: &[Block<T>], signs: &[T], n: usize) -> CVector<T> {
    let mut y = vec![czero(); n];
    for (b, e) in blocks.iter().zip(signs) {
        linalg::axpy(cr(*e * b.weight), &b.vector, &mut y);
    }
    y
}

fn sample_norms<T: Real, S: Spectral<T> + ?Sized>(
    op: &S,
    blocks: &[Block<T>],
    pnorm: T,
    ens: &RandomEnsemble,
) -> Result<Vec<T>> {
    ens.validate()?;
    let signs: Vec<Vec<T>> = ens.draw(blocks.len());
    let n = op.measure().len();
    signs
        .par_iter()
        .map(|s| lp_norm(&signed_sum(blocks, s, n), pnorm, op.measure()))
        .collect()
}

fn mean_and_stderr<T: Real>(v: &[T]) -> (T, T) {
    let n = T::from_usize_lossy(v.len());
    let mean = v.iter().copied().sum::<T>() / n;
    if v.len() < 2 {
        return (mean, T::zero());
    }
    let var = v.iter().map(|s| (*s - mean) * (*s - mean)).sum::<T>() / (n - T::one());
    (mean, (var / n).sqrt())
}

/// Monte Carlo `E‖Σ_n ε_n w_n φ_n(A)x‖_p` over a seeded sign ensemble.
pub fn pl_random_norm<T: Real, S: Spectral<T> + ?Sized>(
    op: &S,
    p: &PartitionOfUnity,
    x: &[C<T>],
    pnorm: T,
    ens: &RandomEnsemble,
    theta: T,
) -> Result<RandomNormEstimate<T>> {
    check_pnorm(pnorm)?;
    let blocks = spectral_blocks(op, p, x, theta)?;
    let norms = sample_norms(op, &blocks, pnorm, ens)?;
    let squares: Vec<T> = norms.iter().map(|v| *v * *v).collect();
    let (mean, stderr) = mean_and_stderr(&norms);
    let (mean_sq, stderr_sq) = mean_and_stderr(&squares);
    Ok(RandomNormEstimate {
        mean,
        stderr,
        mean_sq,
        stderr_sq,
        samples: norms.len(),
    })
}

/// Lower estimate of `sup_{|a_n| ≤ 1} ‖Σ_n a_n w_n φ_n(A)x‖_p`: the largest
/// value over the sampled sign draws, the all-ones draw and the square norm
/// (which is an average over Gaussian coefficients at `p = 2`).
pub fn pl_sup_norm<T: Real, S: Spectral<T> + ?Sized>(
    op: &S,
    p: &PartitionOfUnity,
    x: &[C<T>],
    pnorm: T,
    ens: &RandomEnsemble,
    theta: T,
) -> Result<T> {
    check_pnorm(pnorm)?;
    let blocks = spectral_blocks(op, p, x, theta)?;
    let mut best = sample_norms(op, &blocks, pnorm, ens)?
        .into_iter()
        .fold(T::zero(), T::max);
    let ones = vec![T::one(); blocks.len()];
    best = best.max(lp_norm(&signed_sum(&blocks, &ones, x.len()), pnorm, op.measure())?);
    if pnorm == T::lit(2.0) {
        best = best.max(pl_square_norm(op, p, x, pnorm, theta)?);
    }
    Ok(best)
}

/// Inhomogeneous norm over `φ_n`, `n ≥ 0`, with weights `2^{nθ}`.
pub fn pl_inhomogeneous_norm<T: Real, S: Spectral<T> + ?Sized>(
    op: &S,
    p: &PartitionOfUnity,
    x: &[C<T>],
    pnorm: T,
    theta: T,
    variant: &PlVariant,
) -> Result<T> {
    if p.min_index() != Some(0) {
        return invalid("inhomogeneous norm needs an inhomogeneous dyadic partition");
    }
    if !(theta >= T::zero()) {
        return invalid(format!("inhomogeneous weight exponent must be ≥ 0, got {theta}"));
    }
    match variant {
        PlVariant::Square => pl_square_norm(op, p, x, pnorm, theta),
        PlVariant::Random(ens) => Ok(pl_random_norm(op, p, x, pnorm, ens, theta)?.mean),
    }
}

/// `(Σ_n (w_n ‖φ_n(A)x‖_p)^q)^{1/q}`, or the weighted supremum for `q = ∞`.
pub fn besov_discrete_norm<T: Real, S: Spectral<T> + ?Sized>(
    op: &S,
    p: &PartitionOfUnity,
    x: &[C<T>],
    theta: T,
    q: T,
    pnorm: T,
) -> Result<T> {
    check_pnorm(pnorm)?;
    if q.is_nan() || q < T::one() {
        return invalid(format!("Besov exponent q = {q} < 1"));
    }
    let blocks = spectral_blocks(op, p, x, theta)?;
    let terms: Vec<T> = blocks
        .iter()
        .map(|b| Ok(b.weight * lp_norm(&b.vector, pnorm, op.measure())?))
        .collect::<Result<_>>()?;
    Ok(lq_sum(&terms, q))
}

pub(crate) fn lq_sum<T: Real>(terms: &[T], q: T) -> T {
    let peak = terms.iter().copied().fold(T::zero(), T::max);
    if q.is_infinite() || peak == T::zero() {
        return peak;
    }
    let s: T = terms.iter().map(|v| (*v / peak).powf(q)).sum();
    peak * s.powf(q.recip())
}

/// Square norms of `x`, `P₁x` and `P₂x` for a bisectorial operator, with the
/// bracket `1/(‖P₁‖ + ‖P₂‖) ≤ S(x) / (S(P₁x) + S(P₂x)) ≤ 1` valid at
/// `p = 2`.
pub fn bisectorial_pl_bracket<T: Real>(
    op: &ModelOperator<T>,
    p: &PartitionOfUnity,
    x: &[C<T>],
    theta: T,
) -> Result<BisectorialBracket<T>> {
    if !p.is_even() {
        return invalid("bisectorial square norms need an even partition");
    }
    let proj = bisectorial_projections(op)?;
    let two = T::lit(2.0);
    let x1 = proj.p1.mul_vec(x)?;
    let x2 = proj.p2.mul_vec(x)?;
    let full = pl_square_norm(op, p, x, two, theta)?;
    let part1 = pl_square_norm(op, p, &x1, two, theta)?;
    let part2 = pl_square_norm(op, p, &x2, two, theta)?;
    let n1 = proj.p1.weighted_op_norm(op.measure(), 200);
    let n2 = proj.p2.weighted_op_norm(op.measure(), 200);
    let denom = part1 + part2;
    Ok(BisectorialBracket {
        full,
        part1,
        part2,
        ratio: if denom > T::zero() { full / denom } else { T::one() },
        lower: (n1 + n2).recip(),
        upper: T::one(),
    })
}

#[cfg(test)]
mod tests;
