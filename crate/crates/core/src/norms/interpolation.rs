//! `K(t, x; Ẋ_{θ₀}, Ẋ_{θ₁})` at `p = 2` and the real interpolation norms it
//! generates.
//!
//! In eigen-coordinates with `m_k = λ_k^{θ₀}|⟨x, e_k⟩|` and
//! `r_k = λ_k^{θ₁−θ₀}`, stationary splittings form the family
//! `y_k(c) = a_k / (1 + c r_k²)`. The consistency condition reads
//! `ρ(c) = 1/t` with `ρ(c)² = Σ m²r⁴w / Σ m²r²w`, `w = (1 + c r²)⁻²`, which is
//! decreasing in `c`. Outside `[ρ(∞), ρ(0)]` the optimum is an endpoint:
//! `K = t‖x‖_{θ₁}` for `t ≤ 1/ρ(0)` and `K = ‖x‖_{θ₀}` for `t ≥ 1/ρ(∞)`.

use crate::error::{invalid, Error, Result};
use crate::linalg;
use crate::operators::{ModelOperator, OperatorForm, Spectral};
use crate::scalar::{Real, C};

use super::continuous::{log_trapezoid, QuadratureSpec};

const BISECTION_STEPS: usize = 400;
const GOLDEN_STEPS: usize = 200;

/// Diagonal data with zero coordinates dropped.
#[derive(Debug, Clone)]
struct Diagonal<T> {
    /// `ln m_k`.
    lm: Vec<T>,
    /// `ln r_k`.
    lr: Vec<T>,
}

fn log_sum_exp<T: Real>(v: impl Iterator<Item = T>) -> T {
    let v: Vec<T> = v.collect();
    let peak = v.iter().copied().fold(T::neg_infinity(), T::max);
    if !peak.is_finite() {
        return peak;
    }
    peak + v.iter().map(|a| (*a - peak).exp()).sum::<T>().ln()
}

fn softplus<T: Real>(z: T) -> T {
    if z > T::lit(30.0) {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

fn logistic<T: Real>(z: T) -> T {
    if z >= T::zero() {
        (T::one() + (-z).exp()).recip()
    } else {
        let e = z.exp();
        e / (T::one() + e)
    }
}

impl<T: Real> Diagonal<T> {
    fn new(a: &[T], lambdas: &[T], theta0: T, theta1: T) -> Result<Self> {
        if a.len() != lambdas.len() {
            return Err(Error::DimensionMismatch {
                expected: a.len(),
                got: lambdas.len(),
            });
        }
        if !(theta0.is_finite() && theta1.is_finite()) || theta0 == theta1 {
            return invalid(format!("need finite θ₀ ≠ θ₁, got {theta0}, {theta1}"));
        }
        let mut lm = Vec::new();
        let mut lr = Vec::new();
        for (ak, l) in a.iter().zip(lambdas) {
            if !(*l > T::zero()) {
                return invalid(format!("K-functional needs positive eigenvalues, got {l}"));
            }
            let ak = ak.abs();
            if ak == T::zero() {
                continue;
            }
            lm.push(ak.ln() + theta0 * l.ln());
            lr.push((theta1 - theta0) * l.ln());
        }
        Ok(Self { lm, lr })
    }

    fn is_zero(&self) -> bool {
        self.lm.is_empty()
    }

    /// `‖x‖_{θ₀}` and `‖x‖_{θ₁}`.
    fn norms(&self) -> (T, T) {
        let two = T::lit(2.0);
        let n0 = log_sum_exp(self.lm.iter().map(|m| two * *m)) / two;
        let n1 = log_sum_exp(self.lm.iter().zip(&self.lr).map(|(m, r)| two * (*m + *r))) / two;
        (n0.exp(), n1.exp())
    }

    /// `ln ρ(c)` at `c = e^s`.
    fn log_ratio(&self, s: T) -> T {
        let two = T::lit(2.0);
        let four = T::lit(4.0);
        let lw: Vec<T> = self.lr.iter().map(|r| -two * softplus(s + two * *r)).collect();
        let num = log_sum_exp(self.lm.iter().zip(&self.lr).zip(&lw).map(|((m, r), w)| two * *m + four * *r + *w));
        let den = log_sum_exp(self.lm.iter().zip(&self.lr).zip(&lw).map(|((m, r), w)| two * *m + two * *r + *w));
        (num - den) / two
    }

    /// `ln ρ(0)` and `ln ρ(∞)`.
    fn ratio_limits(&self) -> (T, T) {
        let two = T::lit(2.0);
        let four = T::lit(4.0);
        let hi = (log_sum_exp(self.lm.iter().zip(&self.lr).map(|(m, r)| two * *m + four * *r))
            - log_sum_exp(self.lm.iter().zip(&self.lr).map(|(m, r)| two * *m + two * *r)))
            / two;
        let lo = (log_sum_exp(self.lm.iter().map(|m| two * *m))
            - log_sum_exp(self.lm.iter().zip(&self.lr).map(|(m, r)| two * *m - two * *r)))
            / two;
        (hi, lo)
    }

    /// `‖A^{θ₀}(x − y(c))‖ + t‖A^{θ₁}y(c)‖` at `c = e^s`.
    fn objective(&self, s: T, t: T) -> T {
        let two = T::lit(2.0);
        let mut p = T::zero();
        let mut q = T::zero();
        for (m, r) in self.lm.iter().zip(&self.lr) {
            let z = s + two * *r;
            let mk = m.exp();
            p += (mk * logistic(z)).powi(2);
            q += (mk * r.exp() * logistic(-z)).powi(2);
        }
        p.sqrt() + t * q.sqrt()
    }

    fn span(&self) -> T {
        let two = T::lit(2.0);
        self.lr.iter().fold(T::zero(), |a, r| a.max((two * *r).abs())) + T::lit(80.0)
    }

    fn value(&self, t: T) -> T {
        if self.is_zero() {
            return T::zero();
        }
        let (n0, n1) = self.norms();
        let mut best = n0.min(t * n1);
        let z = self.span();
        let target = -t.ln();
        let g = |s: T| self.log_ratio(s) - target;
        let (mut a, mut b) = (-z, z);
        let (ga, gb) = (g(a), g(b));
        if ga > T::zero() && gb < T::zero() {
            for _ in 0..BISECTION_STEPS {
                let mid = (a + b) / T::lit(2.0);
                if mid == a || mid == b {
                    break;
                }
                if g(mid) > T::zero() {
                    a = mid;
                } else {
                    b = mid;
                }
            }
            best = best.min(self.objective((a + b) / T::lit(2.0), t));
        } else {
            best = best.min(self.golden(t, -z, z));
        }
        best
    }

    fn golden(&self, t: T, mut a: T, mut b: T) -> T {
        let inv_phi = T::lit((5f64.sqrt() - 1.0) / 2.0);
        let mut c = b - inv_phi * (b - a);
        let mut d = a + inv_phi * (b - a);
        let (mut fc, mut fd) = (self.objective(c, t), self.objective(d, t));
        for _ in 0..GOLDEN_STEPS {
            if fc < fd {
                b = d;
                d = c;
                fd = fc;
                c = b - inv_phi * (b - a);
                fc = self.objective(c, t);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + inv_phi * (b - a);
                fd = self.objective(d, t);
            }
        }
        fc.min(fd)
    }
}

/// `K(t)` for coordinates `a_k` against eigenvalues `λ_k > 0`.
pub fn k_functional_diagonal<T: Real>(a: &[T], lambdas: &[T], t: T, theta0: T, theta1: T) -> Result<T> {
    if !(t > T::zero() && t.is_finite()) {
        return invalid(format!("K-functional needs t > 0, got {t}"));
    }
    Ok(Diagonal::new(a, lambdas, theta0, theta1)?.value(t))
}

fn diagonal_of<T: Real>(op: &ModelOperator<T>, x: &[C<T>], theta0: T, theta1: T, pnorm: T) -> Result<Diagonal<T>> {
    if pnorm != T::lit(2.0) {
        return Err(Error::Unsupported(format!("K-functional at p = {pnorm}; only p = 2 is implemented")));
    }
    if !matches!(op.form(), OperatorForm::SpectralSelfAdjoint { .. }) {
        return Err(Error::Unsupported("K-functional needs an orthonormal eigenbasis".into()));
    }
    linalg::check_len(x, op.dim())?;
    let coeffs = op.analyze(x)?;
    let modes = op.modes()?;
    let kernel = op.kernel_modes();
    let mut a = Vec::new();
    let mut l = Vec::new();
    for (k, (c, z)) in coeffs.iter().zip(&modes).enumerate() {
        if kernel.get(k).copied().unwrap_or(false) {
            continue;
        }
        a.push(c.norm());
        l.push(z.re);
    }
    Diagonal::new(&a, &l, theta0, theta1)
}

/// `K(t, x; Ẋ_{θ₀}, Ẋ_{θ₁}) = inf_{x = x₀ + x₁} ‖A^{θ₀}x₀‖ + t‖A^{θ₁}x₁‖` on
/// the injective part, at `p = 2`.
pub fn k_functional<T: Real>(op: &ModelOperator<T>, x: &[C<T>], t: T, theta0: T, theta1: T, pnorm: T) -> Result<T> {
    if !(t > T::zero() && t.is_finite()) {
        return invalid(format!("K-functional needs t > 0, got {t}"));
    }
    Ok(diagonal_of(op, x, theta0, theta1, pnorm)?.value(t))
}

/// `(∫₀^∞ t^{−ϑq} K(t)^q dt/t)^{1/q}` (supremum for `q = ∞`), at `p = 2`.
///
/// `K` is linear below `1/ρ(0)` and constant above `1/ρ(∞)`, so both tails
/// are integrated exactly and only the middle range uses the quadrature's
/// node density.
pub fn real_interpolation_norm<T: Real>(
    op: &ModelOperator<T>,
    x: &[C<T>],
    vartheta: T,
    q: T,
    theta0: T,
    theta1: T,
    quad: &QuadratureSpec,
) -> Result<T> {
    if !(vartheta > T::zero() && vartheta < T::one()) {
        return invalid(format!("interpolation parameter must lie in (0, 1), got {vartheta}"));
    }
    if q.is_nan() || q < T::one() {
        return invalid(format!("interpolation exponent q = {q} < 1"));
    }
    quad.validate()?;
    let d = diagonal_of(op, x, theta0, theta1, T::lit(2.0))?;
    if d.is_zero() {
        return Ok(T::zero());
    }
    // K(t) ≤ min(N₀, tN₁) is what makes the tails integrable; the sign of
    // θ₁ − θ₀ only relabels which end is which.
    let (n0, n1) = d.norms();
    let (lr0, lr_inf) = d.ratio_limits();
    let mut t_lo = (-lr0).exp();
    let mut t_hi = (-lr_inf).exp();
    if t_lo > t_hi {
        t_lo = n0 / n1;
        t_hi = t_lo;
    }
    let one = T::one();
    if q.is_infinite() {
        let mut best = (t_lo.powf(-vartheta) * t_lo * n1).max(t_hi.powf(-vartheta) * n0);
        if t_hi > t_lo {
            let (nodes, _) = log_trapezoid(t_lo, t_hi, quad.nodes_per_decade);
            for t in nodes {
                best = best.max(t.powf(-vartheta) * d.value(t));
            }
        }
        return Ok(best);
    }
    let left = n1.powf(q) * t_lo.powf(q * (one - vartheta)) / (q * (one - vartheta));
    let right = n0.powf(q) * t_hi.powf(-vartheta * q) / (vartheta * q);
    let mut mid = T::zero();
    if t_hi > t_lo {
        let (nodes, weights) = log_trapezoid(t_lo, t_hi, quad.nodes_per_decade);
        for (t, w) in nodes.iter().zip(&weights) {
            mid += *w * (t.powf(-vartheta) * d.value(*t)).powf(q);
        }
    }
    Ok((left + mid + right).powf(q.recip()))
}
