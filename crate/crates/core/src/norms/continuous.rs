//! Log-trapezoid quadrature of `∫₀^∞ … dt/t` and the continuous square and
//! Besov norms built on it.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::calculus::symbol_at;
use crate::error::{invalid, Error, Result};
use crate::linalg::{self, lp_norm, CVector};
use crate::operators::Spectral;
use crate::scalar::{cr, czero, Real, C};
use crate::symbols::Symbol;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuadratureRule {
    /// Trapezoid rule in `u = ln t`, half weight at both ends.
    #[default]
    LogTrapezoid,
}

/// Quadrature over `t ∈ [t_lo, t_hi]` in `dt/t`. Missing ends are chosen from
/// the spectrum and the symbol's decay certificate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_lo: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_hi: Option<f64>,
    #[serde(default = "default_nodes_per_decade")]
    pub nodes_per_decade: usize,
    #[serde(default)]
    pub rule: QuadratureRule,
    /// Accept explicit ranges narrower than `[2⁻¹⁰/λ_max, 2¹⁰/λ_min]`.
    #[serde(default)]
    pub override_coverage: bool,
    /// Bound on the truncated tail of the `q`-th power integral, relative
    /// to the `λ^{θq}`-weighted mass of `x`.
    #[serde(default = "default_tail_tol")]
    pub tail_tol: f64,
}

fn default_nodes_per_decade() -> usize {
    32
}

fn default_tail_tol() -> f64 {
    1e-13
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            t_lo: None,
            t_hi: None,
            nodes_per_decade: default_nodes_per_decade(),
            rule: QuadratureRule::LogTrapezoid,
            override_coverage: false,
            tail_tol: default_tail_tol(),
        }
    }
}

/// Nodes and weights of a resolved quadrature, with its certified tail.
#[derive(Debug, Clone, PartialEq)]
pub struct ResolvedQuadrature<T> {
    pub t_lo: T,
    pub t_hi: T,
    pub nodes: Vec<T>,
    pub weights: Vec<T>,
    pub tail: T,
}

const COVERAGE: f64 = 1024.0;

impl QuadratureSpec {
    pub fn with_range(mut self, t_lo: f64, t_hi: f64) -> Self {
        self.t_lo = Some(t_lo);
        self.t_hi = Some(t_hi);
        self
    }

    pub fn with_nodes_per_decade(mut self, n: usize) -> Self {
        self.nodes_per_decade = n;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.nodes_per_decade == 0 {
            return invalid("quadrature needs at least one node per decade");
        }
        if !(self.tail_tol > 0.0) {
            return invalid(format!("tail tolerance {} must be positive", self.tail_tol));
        }
        for t in [self.t_lo, self.t_hi].into_iter().flatten() {
            if !(t > 0.0 && t.is_finite()) {
                return invalid(format!("quadrature end {t} must be positive and finite"));
            }
        }
        if let (Some(a), Some(b)) = (self.t_lo, self.t_hi) {
            if a >= b {
                return invalid(format!("quadrature range [{a}, {b}] is empty"));
            }
        }
        Ok(())
    }

    /// Resolves the range for `∫ t^{−θq} |f(tλ)|^q dt/t` over the spectral
    /// moduli `[lmin, lmax]`.
    pub fn resolve<T: Real>(&self, f: &Symbol<T>, theta: T, q: T, lmin: T, lmax: T) -> Result<ResolvedQuadrature<T>> {
        self.validate()?;
        if !(lmin > T::zero() && lmin <= lmax) {
            return invalid(format!("bad spectral range [{lmin}, {lmax}]"));
        }
        let tol = T::lit(self.tail_tol);
        let shape = TailShape::new(f, theta, q)?;
        let (s_lo, s_hi) = shape.natural_range(tol);
        let cov = T::lit(COVERAGE);
        let cov_lo = cov.recip() / lmax;
        let cov_hi = cov / lmin;
        let t_lo = match self.t_lo {
            Some(v) => {
                let v = T::lit(v);
                if v > cov_lo && !self.override_coverage {
                    return invalid(format!("t_lo = {v} does not reach 2⁻¹⁰/λ_max = {cov_lo}"));
                }
                v
            }
            None => cov_lo.min(s_lo / lmax),
        };
        let t_hi = match self.t_hi {
            Some(v) => {
                let v = T::lit(v);
                if v < cov_hi && !self.override_coverage {
                    return invalid(format!("t_hi = {v} does not reach 2¹⁰/λ_min = {cov_hi}"));
                }
                v
            }
            None => cov_hi.max(s_hi / lmin),
        };
        if t_lo >= t_hi {
            return invalid(format!("quadrature range [{t_lo}, {t_hi}] is empty"));
        }
        let tail = shape.tail(t_lo * lmax, t_hi * lmin);
        if tail > tol {
            return Err(Error::TailTooLarge {
                tail: tail.to_f64_lossy(),
                tol: self.tail_tol,
            });
        }
        let (nodes, weights) = log_trapezoid(t_lo, t_hi, self.nodes_per_decade);
        Ok(ResolvedQuadrature {
            t_lo,
            t_hi,
            nodes,
            weights,
            tail,
        })
    }
}

/// Trapezoid nodes in `ln t` with at least `npd` intervals per decade.
pub(crate) fn log_trapezoid<T: Real>(lo: T, hi: T, npd: usize) -> (Vec<T>, Vec<T>) {
    let (a, b) = (lo.ln(), hi.ln());
    let decades = (b - a) / T::LN_10();
    let m = (decades * T::from_usize_lossy(npd)).ceil().to_usize().unwrap_or(1).max(1);
    let h = (b - a) / T::from_usize_lossy(m);
    let half = h / T::lit(2.0);
    let nodes = (0..=m).map(|j| (a + h * T::from_usize_lossy(j)).exp()).collect();
    let weights = (0..=m).map(|j| if j == 0 || j == m { half } else { h }).collect();
    (nodes, weights)
}

/// `|s^{−θ} f(s)|^q` is bounded by `C^q min(s^{q e₀}, s^{−q e_∞})`, or
/// vanishes outside a compact support.
enum TailShape<T> {
    Support(T, T),
    Decay { e0: T, einf: T, cq: T },
}

impl<T: Real> TailShape<T> {
    fn new(f: &Symbol<T>, theta: T, q: T) -> Result<Self> {
        if !(q >= T::one() && q.is_finite()) {
            return invalid(format!("quadrature exponent q = {q} must be finite and ≥ 1"));
        }
        if let Some((lo, hi)) = f.support() {
            if lo > T::zero() && hi.is_finite() {
                return Ok(Self::Support(lo, hi));
            }
        }
        let cert = f.decay().ok_or(Error::MissingDecayCertificate)?.shifted(theta);
        if !(cert.eps0 > T::zero() && cert.eps_inf > T::zero()) {
            return invalid(format!(
                "t^(-{theta}) {} is not integrable in dt/t: certificate exponents ({}, {})",
                f.name(),
                cert.eps0,
                cert.eps_inf
            ));
        }
        Ok(Self::Decay {
            e0: q * cert.eps0,
            einf: q * cert.eps_inf,
            cq: cert.c.powf(q),
        })
    }

    /// Scaled range `[s_lo, s_hi]` leaving a tail below `tol`.
    fn natural_range(&self, tol: T) -> (T, T) {
        match *self {
            Self::Support(lo, hi) => (lo, hi),
            Self::Decay { e0, einf, cq, .. } => {
                let half = tol * T::lit(0.45);
                let lo = (half * e0 / cq).powf(e0.recip()).min(T::one());
                let hi = (cq / (half * einf)).powf(einf.recip()).max(T::one());
                (lo, hi)
            }
        }
    }

    /// Bound on `∫_{(0, s_lo) ∪ (s_hi, ∞)} |s^{−θ} f(s)|^q ds/s`.
    fn tail(&self, s_lo: T, s_hi: T) -> T {
        match *self {
            Self::Support(lo, hi) => {
                if s_lo <= lo && s_hi >= hi {
                    T::zero()
                } else {
                    T::infinity()
                }
            }
            Self::Decay { e0, einf, cq, .. } => {
                let one = T::one();
                let left = if s_lo <= one {
                    s_lo.powf(e0) / e0
                } else {
                    e0.recip() + (one - s_lo.powf(-einf)) / einf
                };
                let right = if s_hi >= one {
                    s_hi.powf(-einf) / einf
                } else {
                    (one - s_hi.powf(e0)) / e0 + einf.recip()
                };
                cq * (left + right)
            }
        }
    }
}

/// `∫₀^∞ s^{−θq} |f(s)|^q ds/s` on the quadrature resolved for `λ = 1`.
pub fn symbol_log_integral<T: Real>(f: &Symbol<T>, theta: T, q: T, quad: &QuadratureSpec) -> Result<T> {
    let r = quad.resolve(f, theta, q, T::one(), T::one())?;
    let mut acc = T::zero();
    for (s, w) in r.nodes.iter().zip(&r.weights) {
        let v = f.eval(*s).norm();
        if !v.is_finite() {
            return Err(Error::SymbolDomain(format!("{} is undefined at {s}", f.name())));
        }
        acc += *w * s.powf(-theta * q) * v.powf(q);
    }
    Ok(acc)
}

/// Smallest and largest modulus over the non-kernel modes.
pub(crate) fn modulus_range<T: Real, S: Spectral<T> + ?Sized>(op: &S) -> Result<Option<(T, T)>> {
    let modes = op.modes()?;
    let kernel = op.kernel_modes();
    let mut lo = T::infinity();
    let mut hi = T::zero();
    for (k, z) in modes.iter().enumerate() {
        if kernel.get(k).copied().unwrap_or(false) {
            continue;
        }
        lo = lo.min(z.norm());
        hi = hi.max(z.norm());
    }
    Ok((hi > T::zero()).then_some((lo, hi)))
}

/// `f(tA)x` for every node, with kernel modes removed.
fn dilated_images<T: Real, S: Spectral<T> + ?Sized>(
    op: &S,
    f: &Symbol<T>,
    x: &[C<T>],
    nodes: &[T],
) -> Result<Vec<CVector<T>>> {
    let modes = op.modes()?;
    let kernel = op.kernel_modes();
    let coeffs = op.analyze(x)?;
    nodes
        .par_iter()
        .map(|t| {
            let c: Vec<C<T>> = coeffs
                .iter()
                .zip(&modes)
                .enumerate()
                .map(|(k, (a, l))| {
                    if kernel.get(k).copied().unwrap_or(false) || *a == czero() {
                        return Ok(czero());
                    }
                    let v = symbol_at(f, *l * cr(*t))?;
                    if !(v.re.is_finite() && v.im.is_finite()) {
                        return Err(Error::SymbolDomain(format!("{} is undefined at {}", f.name(), *l * cr(*t))));
                    }
                    Ok(*a * v)
                })
                .collect::<Result<_>>()?;
            Ok(op.synthesize(&c))
        })
        .collect()
}

/// `‖(∫₀^∞ |t^{−θ} ψ(tA)x|² dt/t)^{1/2}‖_{L^p}`.
pub fn continuous_square_norm<T: Real, S: Spectral<T> + ?Sized>(
    op: &S,
    psi: &Symbol<T>,
    theta: T,
    x: &[C<T>],
    pnorm: T,
    quad: &QuadratureSpec,
) -> Result<T> {
    linalg::check_len(x, op.measure().len())?;
    let Some((lmin, lmax)) = modulus_range(op)? else {
        return Ok(T::zero());
    };
    let two = T::lit(2.0);
    let r = quad.resolve(psi, theta, two, lmin, lmax)?;
    let images = dilated_images(op, psi, x, &r.nodes)?;
    let mut sq = vec![T::zero(); x.len()];
    for ((y, t), w) in images.iter().zip(&r.nodes).zip(&r.weights) {
        let wt = *w * t.powf(-two * theta);
        for (s, v) in sq.iter_mut().zip(y) {
            *s += wt * v.norm_sqr();
        }
    }
    let pointwise: Vec<C<T>> = sq.into_iter().map(|s| cr(s.sqrt())).collect();
    lp_norm(&pointwise, pnorm, op.measure())
}

/// `(∫₀^∞ t^{−θq} ‖f(tA)x‖_p^q dt/t)^{1/q}`, or `sup_t t^{−θ}‖f(tA)x‖_p`
/// for `q = ∞`.
///
/// `f` must carry a decay certificate making `t^{−θ}f` integrable in `dt/t`
/// (or a compact support away from 0).
pub fn besov_continuous_norm<T: Real, S: Spectral<T> + ?Sized>(
    op: &S,
    x: &[C<T>],
    theta: T,
    q: T,
    f: &Symbol<T>,
    pnorm: T,
    quad: &QuadratureSpec,
) -> Result<T> {
    if q.is_nan() || q < T::one() {
        return invalid(format!("Besov exponent q = {q} < 1"));
    }
    linalg::check_len(x, op.measure().len())?;
    let Some((lmin, lmax)) = modulus_range(op)? else {
        return Ok(T::zero());
    };
    // The sup norm is sampled on the range that certifies the q = 1 integral.
    let q_range = if q.is_infinite() { T::one() } else { q };
    let r = quad.resolve(f, theta, q_range, lmin, lmax)?;
    let images = dilated_images(op, f, x, &r.nodes)?;
    let norms: Vec<T> = images
        .iter()
        .map(|y| lp_norm(y, pnorm, op.measure()))
        .collect::<Result<_>>()?;
    if q.is_infinite() {
        return Ok(norms
            .iter()
            .zip(&r.nodes)
            .map(|(v, t)| t.powf(-theta) * *v)
            .fold(T::zero(), T::max));
    }
    let acc: T = norms
        .iter()
        .zip(&r.nodes)
        .zip(&r.weights)
        .map(|((v, t), w)| *w * (t.powf(-theta) * *v).powf(q))
        .sum();
    Ok(acc.powf(q.recip()))
}
