//! Functional calculus: `f(A)` by spectral decomposition and by quadrature of
//! the Cauchy integral, fractional powers, semigroups, `B = log A` and the
//! spectral projections of bisectorial operators.

mod bisectorial;
mod contour;
mod strip;

pub use bisectorial::{bisectorial_even_apply, bisectorial_projections, BisectorialProjections};
pub use contour::{apply_contour, ContourResult, ContourSpec};
pub use strip::{log_operator, StripOperator};

use crate::error::{invalid, Error, Result};
use crate::linalg::{self, CVector};
use crate::operators::{ModelOperator, Spectral};
use crate::scalar::{cr, czero, Real, C};
use crate::symbols::Symbol;

/// Options shared by the calculus entry points.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CalcOptions {
    /// Compose with `I − P` (projection off `N(A)`) before applying `f`.
    pub project_kernel: bool,
}

impl Default for CalcOptions {
    fn default() -> Self {
        Self { project_kernel: true }
    }
}

/// `f(λ)` at a mode, using the real path on the real axis.
pub(crate) fn symbol_at<T: Real>(f: &Symbol<T>, z: C<T>) -> Result<C<T>> {
    if z.im == T::zero() {
        Ok(f.eval(z.re))
    } else {
        f.eval_complex(z)
    }
}

/// `f` evaluated on every mode, with kernel modes zeroed when projecting.
pub(crate) fn multiplier_values<T: Real, S: Spectral<T> + ?Sized>(
    op: &S,
    f: &Symbol<T>,
    opts: &CalcOptions,
) -> Result<Vec<C<T>>> {
    let modes = op.modes()?;
    let kernel = op.kernel_modes();
    modes
        .iter()
        .enumerate()
        .map(|(k, z)| {
            if opts.project_kernel && kernel.get(k).copied().unwrap_or(false) {
                return Ok(czero());
            }
            let v = symbol_at(f, *z)?;
            if v.re.is_finite() && v.im.is_finite() {
                Ok(v)
            } else {
                Err(Error::SymbolDomain(format!("{} is undefined at eigenvalue {z}", f.name())))
            }
        })
        .collect()
}

/// `f(A) x = Σ_k f(λ_k) ⟨x, e_k⟩ e_k` (or `S f(Λ) S⁻¹ x`).
pub fn apply_spectral<T: Real, S: Spectral<T> + ?Sized>(op: &S, f: &Symbol<T>, x: &[C<T>]) -> Result<CVector<T>> {
    apply_spectral_with(op, f, x, &CalcOptions::default())
}

pub fn apply_spectral_with<T: Real, S: Spectral<T> + ?Sized>(
    op: &S,
    f: &Symbol<T>,
    x: &[C<T>],
    opts: &CalcOptions,
) -> Result<CVector<T>> {
    let values = multiplier_values(op, f, opts)?;
    let c = op.analyze(x)?;
    let scaled: Vec<C<T>> = c.iter().zip(&values).map(|(a, v)| *a * *v).collect();
    Ok(op.synthesize(&scaled))
}

/// `A^θ x` on the injective part.
pub fn fractional_power_apply<T: Real>(op: &ModelOperator<T>, theta: T, x: &[C<T>]) -> Result<CVector<T>> {
    fractional_power_apply_with(op, theta, x, &CalcOptions::default())
}

pub fn fractional_power_apply_with<T: Real>(
    op: &ModelOperator<T>,
    theta: T,
    x: &[C<T>],
    opts: &CalcOptions,
) -> Result<CVector<T>> {
    if !theta.is_finite() {
        return invalid(format!("exponent {theta} is not finite"));
    }
    if theta == T::zero() {
        linalg::check_len(x, op.dim())?;
        return if opts.project_kernel { op.kernel().complement(x) } else { Ok(x.to_vec()) };
    }
    apply_spectral_with(op, &Symbol::power(theta), x, opts)
}

/// `e^{−tA} x` for `t ≥ 0`.
///
/// With the default options the kernel component is removed first, so the
/// result is `e^{−tA}(I − P)x`.
pub fn semigroup_apply<T: Real>(op: &ModelOperator<T>, t: T, x: &[C<T>]) -> Result<CVector<T>> {
    semigroup_apply_with(op, t, x, &CalcOptions::default())
}

pub fn semigroup_apply_with<T: Real>(
    op: &ModelOperator<T>,
    t: T,
    x: &[C<T>],
    opts: &CalcOptions,
) -> Result<CVector<T>> {
    if !(t >= T::zero() && t.is_finite()) {
        return invalid(format!("semigroup time must be finite and ≥ 0, got {t}"));
    }
    apply_spectral_with(op, &Symbol::exp_decay(cr(t)), x, opts)
}

/// `‖(g((t+h)A)x − g((t−h)A)x)/(2h) − A g'(tA)x‖ / ‖x‖`.
pub fn derivative_check<T: Real>(op: &ModelOperator<T>, g: &Symbol<T>, t: T, h: T, x: &[C<T>]) -> Result<T> {
    if !(t > h && h > T::zero()) {
        return invalid(format!("need 0 < h < t, got t = {t}, h = {h}"));
    }
    let plus = apply_spectral(op, &g.dilate(t + h), x)?;
    let minus = apply_spectral(op, &g.dilate(t - h), x)?;
    let dg = apply_spectral(op, &g.derivative_symbol(1).dilate(t), x)?;
    let adg = op.apply(&dg)?;
    let two_h = cr(h + h);
    let r: Vec<C<T>> = plus
        .iter()
        .zip(&minus)
        .zip(&adg)
        .map(|((p, m), a)| (*p - *m) / two_h - *a)
        .collect();
    let nx = op.measure().norm(x);
    let nr = op.measure().norm(&r);
    Ok(if nx > T::zero() { nr / nx } else { nr })
}
