//! Two-ray trapezoidal quadrature of
//! `f(A) = (1/2πi) ∫_Γ f(λ) (λ − A)⁻¹ dλ`, `Γ = ∂Σ_σ` oriented counterclockwise
//! (in along `∞e^{iσ} → 0`, out along `0 → ∞e^{−iσ}`).
//!
//! With `λ = r e^{∓iσ}`, `r = e^u`:
//! `f(A)x ≈ (1/2πi) Σ_j Δu r_j [e^{−iσ} f(r_j e^{−iσ}) R(r_j e^{−iσ})x − e^{iσ} f(r_j e^{iσ}) R(r_j e^{iσ})x]`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::linalg::{CVector, MeasureSpace};
use crate::operators::{ModelOperator, OperatorForm, Spectral};
use crate::scalar::{czero, Real, C};
use crate::symbols::{DecayCertificate, Symbol};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContourSpec<T> {
    pub sigma: T,
    pub rmin: T,
    pub rmax: T,
    pub nodes_per_decade: usize,
    /// Reject results whose truncation tail (relative to `‖x‖`) exceeds this.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tail_tol: Option<T>,
}

#[derive(Debug, Clone)]
pub struct ContourResult<T> {
    pub y: CVector<T>,
    /// Certified truncation tail relative to `‖x‖`.
    pub tail_estimate: T,
    pub nodes: usize,
    pub spec: ContourSpec<T>,
}

const MIN_NODES_PER_DECADE: usize = 8;
const RAY_SAMPLES: usize = 200;

impl<T: Real> ContourSpec<T> {
    pub fn new(sigma: T, rmin: T, rmax: T, nodes_per_decade: usize) -> Self {
        Self {
            sigma,
            rmin,
            rmax,
            nodes_per_decade,
            tail_tol: None,
        }
    }

    /// Half-way between the spectral sector and the sector where `f` stays
    /// holomorphic and decaying (capped at `π/2`).
    pub fn default_sigma(op: &ModelOperator<T>, f: &Symbol<T>) -> Result<T> {
        let omega = op.sector_angle();
        let limit = f.sector_limit().min(T::FRAC_PI_2());
        if limit <= omega {
            return Err(Error::SymbolDomain(format!(
                "{} is holomorphic only on |arg z| < {limit}, inside the spectral sector {omega}",
                f.name()
            )));
        }
        Ok((omega + limit) / T::lit(2.0))
    }

    /// A range whose truncation tail is certified below `tol`, at the
    /// default angle and 64 nodes per decade.
    pub fn certified(op: &ModelOperator<T>, f: &Symbol<T>, tol: T) -> Result<Self> {
        let sigma = Self::default_sigma(op, f)?;
        let cert = decaying(f)?;
        let k = ray_constant(f, &cert, sigma)? * resolvent_sector_bound(op, sigma)?;
        let pi = T::PI();
        // Split the budget between the two ends with a little slack.
        let half = tol * T::lit(0.45);
        let mut rmin = (half * pi * cert.eps0 / k).powf(cert.eps0.recip());
        let mut rmax = (k / (half * pi * cert.eps_inf)).powf(cert.eps_inf.recip());
        let (lo, hi) = positive_spectral_range(op);
        rmin = rmin.min(lo * T::lit(2f64.powi(-30)));
        rmax = rmax.max(hi * T::lit(2.0));
        Ok(Self {
            sigma,
            rmin,
            rmax,
            nodes_per_decade: 64,
            tail_tol: Some(tol),
        })
    }

    pub fn with_nodes_per_decade(mut self, n: usize) -> Self {
        self.nodes_per_decade = n;
        self
    }

    fn validate(&self, op: &ModelOperator<T>, f: &Symbol<T>) -> Result<()> {
        if !(self.sigma > op.sector_angle() && self.sigma < T::PI()) {
            return invalid(format!(
                "contour angle {} must lie strictly between the sector angle {} and π",
                self.sigma,
                op.sector_angle()
            ));
        }
        if self.sigma >= f.sector_limit() {
            return invalid(format!(
                "contour angle {} leaves the sector |arg z| < {} where {} decays",
                self.sigma,
                f.sector_limit(),
                f.name()
            ));
        }
        if !(self.rmin > T::zero() && self.rmin < self.rmax && self.rmax.is_finite()) {
            return invalid(format!("bad radial range [{}, {}]", self.rmin, self.rmax));
        }
        if self.nodes_per_decade < MIN_NODES_PER_DECADE {
            return invalid(format!(
                "need at least {MIN_NODES_PER_DECADE} nodes per decade, got {}",
                self.nodes_per_decade
            ));
        }
        Ok(())
    }
}

fn decaying<T: Real>(f: &Symbol<T>) -> Result<DecayCertificate<T>> {
    let cert = f.decay().ok_or(Error::MissingDecayCertificate)?;
    if !cert.is_decaying() {
        return invalid(format!(
            "{} does not decay at 0 and ∞ (ε₀ = {}, ε_∞ = {})",
            f.name(),
            cert.eps0,
            cert.eps_inf
        ));
    }
    Ok(cert)
}

fn positive_spectral_range<T: Real>(op: &ModelOperator<T>) -> (T, T) {
    let mods: Vec<T> = op
        .eigenvalues()
        .map(|e| e.iter().map(|l| l.norm()).filter(|v| *v > T::zero()).collect())
        .unwrap_or_default();
    if mods.is_empty() {
        let (lo, hi) = op.spectral_bounds();
        return (lo.max(T::min_positive_value()), hi.max(T::one()));
    }
    let lo = mods.iter().copied().fold(T::infinity(), T::min);
    let hi = mods.iter().copied().fold(T::zero(), T::max);
    (lo, hi)
}

/// `1.1 · max |f(r e^{±iσ})| / min(r^{ε₀}, r^{−ε_∞})` over log-spaced samples.
fn ray_constant<T: Real>(f: &Symbol<T>, cert: &DecayCertificate<T>, sigma: T) -> Result<T> {
    let mut worst = cert.c;
    for i in 0..RAY_SAMPLES {
        let r = T::lit(10f64.powf(-12.0 + 24.0 * i as f64 / (RAY_SAMPLES - 1) as f64));
        let shape = r.powf(cert.eps0).min(r.powf(-cert.eps_inf));
        for s in [sigma, -sigma] {
            let v = f.eval_complex(C::from_polar(r, s))?.norm();
            if v.is_finite() {
                worst = worst.max(v / shape);
            }
        }
    }
    Ok(worst * T::lit(1.1))
}

/// Bound on `‖λ R(λ, A)‖` over both rays.
fn resolvent_sector_bound<T: Real>(op: &ModelOperator<T>, sigma: T) -> Result<T> {
    let ray_factor = |eigs: &[C<T>]| -> T {
        let mut worst = T::one();
        for l in eigs {
            if l.norm() == T::zero() {
                continue;
            }
            for s in [sigma, -sigma] {
                let mut d = (s - l.arg()).abs();
                if d > T::PI() {
                    d = T::lit(2.0) * T::PI() - d;
                }
                if d < T::FRAC_PI_2() {
                    worst = worst.max(d.sin().recip());
                }
            }
        }
        worst
    };
    match op.form() {
        OperatorForm::SpectralSelfAdjoint { .. } => Ok(ray_factor(&op.modes()?)),
        OperatorForm::SimilarityDiagonal { s, s_inv, eigenvalues } => {
            let m = MeasureSpace::counting(op.dim())?;
            let cond = s.weighted_op_norm(&m, 100) * s_inv.weighted_op_norm(&m, 100);
            Ok(ray_factor(eigenvalues) * cond)
        }
        OperatorForm::MatrixOnly(_) => {
            // Sampled power-iteration estimate, inflated.
            let (lo, hi) = positive_spectral_range(op);
            let n = op.dim();
            let mut worst = T::one();
            for i in 0..24 {
                let r = lo * T::lit(1e-3) * (hi / lo * T::lit(1e6)).powf(T::lit(i as f64 / 23.0));
                for s in [sigma, -sigma] {
                    let lambda = C::from_polar(r, s);
                    let mut v: CVector<T> = (0..n).map(|k| C::new(T::one(), T::lit(0.1 * k as f64))).collect();
                    let mut est = T::zero();
                    for _ in 0..20 {
                        let nv = op.measure().norm(&v);
                        v.iter_mut().for_each(|z| *z /= nv);
                        let w = op.resolvent_apply(lambda, &v)?;
                        est = op.measure().norm(&w) * r;
                        v = w;
                    }
                    worst = worst.max(est);
                }
            }
            Ok(worst * T::lit(1.5))
        }
    }
}

/// `f(A)x` by two-ray trapezoidal quadrature of the Cauchy integral.
pub fn apply_contour<T: Real>(
    op: &ModelOperator<T>,
    f: &Symbol<T>,
    x: &[C<T>],
    spec: &ContourSpec<T>,
) -> Result<ContourResult<T>> {
    let cert = decaying(f)?;
    if !f.is_holomorphic() {
        return Err(Error::SymbolDomain(format!("{} is not holomorphic", f.name())));
    }
    spec.validate(op, f)?;

    let k = ray_constant(f, &cert, spec.sigma)? * resolvent_sector_bound(op, spec.sigma)?;
    let tail = k / T::PI() * (spec.rmin.powf(cert.eps0) / cert.eps0 + spec.rmax.powf(-cert.eps_inf) / cert.eps_inf);
    if let Some(tol) = spec.tail_tol {
        if tail > tol {
            return Err(Error::TailTooLarge {
                tail: tail.to_f64_lossy(),
                tol: tol.to_f64_lossy(),
            });
        }
    }

    let (u0, u1) = (spec.rmin.ln(), spec.rmax.ln());
    let decades = (u1 - u0) / T::LN_10();
    let intervals = (decades * T::from_usize_lossy(spec.nodes_per_decade))
        .ceil()
        .to_usize()
        .unwrap_or(1)
        .max(1);
    let du = (u1 - u0) / T::from_usize_lossy(intervals);
    let e_plus = C::from_polar(T::one(), spec.sigma);
    let e_minus = e_plus.conj();

    // Per-node weight Δu·r_j·(trapezoid end factor) and the two ray points.
    let node = |j: usize| {
        let r = (u0 + du * T::from_usize_lossy(j)).exp();
        let end = if j == 0 || j == intervals { T::lit(0.5) } else { T::one() };
        (r * du * end, e_minus * r, e_plus * r)
    };

    let scale = C::new(T::zero(), -(T::lit(2.0) * T::PI()).recip()); // 1/(2πi)
    let y = match op.form() {
        OperatorForm::MatrixOnly(_) => {
            let parts: Vec<Result<CVector<T>>> = (0..=intervals)
                .into_par_iter()
                .map(|j| {
                    let (w, zm, zp) = node(j);
                    let rm = op.resolvent_apply(zm, x)?;
                    let rp = op.resolvent_apply(zp, x)?;
                    let fm = e_minus * f.eval_complex(zm)? * w;
                    let fp = e_plus * f.eval_complex(zp)? * w;
                    Ok(rm.iter().zip(&rp).map(|(a, b)| *a * fm - *b * fp).collect())
                })
                .collect();
            let mut acc: Vec<C<T>> = vec![czero(); x.len()];
            for p in parts {
                for (a, v) in acc.iter_mut().zip(p?) {
                    *a += v;
                }
            }
            acc.iter().map(|v| *v * scale).collect()
        }
        _ => {
            let modes = op.modes()?;
            let coeffs = op.analyze(x)?;
            let parts: Vec<Result<Vec<C<T>>>> = (0..=intervals)
                .into_par_iter()
                .map(|j| {
                    let (w, zm, zp) = node(j);
                    let fm = e_minus * f.eval_complex(zm)? * w;
                    let fp = e_plus * f.eval_complex(zp)? * w;
                    Ok(modes
                        .iter()
                        .map(|l| fm / (zm - *l) - fp / (zp - *l))
                        .collect())
                })
                .collect();
            let mut acc: Vec<C<T>> = vec![czero(); modes.len()];
            for p in parts {
                for (a, v) in acc.iter_mut().zip(p?) {
                    *a += v;
                }
            }
            let scaled: Vec<C<T>> = acc.iter().zip(&coeffs).map(|(m, c)| *m * *c * scale).collect();
            op.synthesize(&scaled)
        }
    };
    Ok(ContourResult {
        y,
        tail_estimate: tail,
        nodes: 2 * (intervals + 1),
        spec: *spec,
    })
}
