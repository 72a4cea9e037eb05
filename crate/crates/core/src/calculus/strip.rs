use crate::error::{Error, Result};
use crate::linalg::{CVector, MeasureSpace};
use crate::operators::{ModelOperator, Spectral};
use crate::scalar::{Real, C};
use crate::symbols::Symbol;

use super::apply_spectral;

/// `B = log A` for an injective sectorial `A`; spectrum `μ_k = log λ_k` in the
/// strip `|Im μ| ≤ ω`.
#[derive(Debug, Clone)]
pub struct StripOperator<T> {
    base: ModelOperator<T>,
    modes: Vec<C<T>>,
}

/// Builds `B = log A`.
pub fn log_operator<T: Real>(op: &ModelOperator<T>) -> Result<StripOperator<T>> {
    if !op.is_injective() {
        return Err(Error::OnSpectrum("log of an operator with a zero eigenvalue".into()));
    }
    let modes = op.modes()?.iter().map(|l| l.ln()).collect();
    Ok(StripOperator {
        base: op.clone(),
        modes,
    })
}

impl<T: Real> StripOperator<T> {
    pub fn base(&self) -> &ModelOperator<T> {
        &self.base
    }

    pub fn eigenvalues(&self) -> &[C<T>] {
        &self.modes
    }

    /// `max_k |Im μ_k|`.
    pub fn strip_width(&self) -> T {
        self.modes.iter().map(|m| m.im.abs()).fold(T::zero(), T::max)
    }

    /// `(min Re μ, max Re μ)`.
    pub fn real_range(&self) -> (T, T) {
        let lo = self.modes.iter().map(|m| m.re).fold(T::infinity(), T::min);
        let hi = self.modes.iter().map(|m| m.re).fold(T::neg_infinity(), T::max);
        (lo, hi)
    }

    /// `e^B x`, which reproduces `A x`.
    pub fn exp_apply(&self, x: &[C<T>]) -> Result<CVector<T>> {
        let e = Symbol::custom("exp", |z: C<T>| z.exp(), true, None);
        apply_spectral(self, &e, x)
    }
}

impl<T: Real> Spectral<T> for StripOperator<T> {
    fn measure(&self) -> &MeasureSpace<T> {
        self.base.measure()
    }

    fn modes(&self) -> Result<Vec<C<T>>> {
        Ok(self.modes.clone())
    }

    fn analyze(&self, x: &[C<T>]) -> Result<CVector<T>> {
        self.base.analyze(x)
    }

    fn synthesize(&self, coeffs: &[C<T>]) -> CVector<T> {
        self.base.synthesize(coeffs)
    }

    fn kernel_modes(&self) -> Vec<bool> {
        vec![false; self.modes.len()]
    }
}
