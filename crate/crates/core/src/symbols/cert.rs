use serde::{Deserialize, Serialize};

use crate::scalar::Real;

/// Certifies `|f(t)| ≤ C · min(t^{ε₀}, t^{−ε_∞})` for `t > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayCertificate<T> {
    pub eps0: T,
    pub eps_inf: T,
    pub c: T,
}

impl<T: Real> DecayCertificate<T> {
    pub fn new(eps0: T, eps_inf: T, c: T) -> Self {
        Self { eps0, eps_inf, c }
    }

    /// The certified bound at `t`.
    pub fn bound(&self, t: T) -> T {
        if t <= T::zero() {
            return if self.eps0 > T::zero() {
                T::zero()
            } else if self.eps0 == T::zero() {
                self.c
            } else {
                T::infinity()
            };
        }
        self.c * t.powf(self.eps0).min(t.powf(-self.eps_inf))
    }

    /// Decays at both ends.
    pub fn is_decaying(&self) -> bool {
        self.eps0 > T::zero() && self.eps_inf > T::zero()
    }

    /// Bound for a function supported in `[lo, hi]` and bounded by `m`.
    pub fn from_compact_support(lo: T, hi: T, m: T) -> Self {
        if lo <= T::zero() {
            Self::new(T::zero(), T::one(), m * hi.max(T::one()))
        } else {
            Self::new(T::one(), T::one(), m * lo.recip().max(hi))
        }
    }

    pub fn product(&self, other: &Self) -> Self {
        Self::new(self.eps0 + other.eps0, self.eps_inf + other.eps_inf, self.c * other.c)
    }

    /// Bound for `f + g`; only valid when the resulting exponents cross at
    /// `t = 1`.
    pub fn sum(&self, other: &Self) -> Option<Self> {
        let e = self.eps0.min(other.eps0);
        let d = self.eps_inf.min(other.eps_inf);
        (e + d >= T::zero()).then(|| Self::new(e, d, self.c + other.c))
    }

    pub fn scaled(&self, a: T) -> Self {
        Self::new(self.eps0, self.eps_inf, self.c * a.abs())
    }

    /// Bound for `t ↦ f(s t)`.
    pub fn dilated(&self, s: T) -> Self {
        let k = s.powf(self.eps0).max(s.powf(-self.eps_inf));
        Self::new(self.eps0, self.eps_inf, self.c * k)
    }

    pub fn squared(&self) -> Self {
        self.product(self)
    }

    /// Bound for `f(t)·t^{−θ}`.
    pub fn shifted(&self, theta: T) -> Self {
        Self::new(self.eps0 - theta, self.eps_inf + theta, self.c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compact_support_bound() {
        let c = DecayCertificate::from_compact_support(0.5f64, 2.0, 1.0);
        assert_eq!(c.c, 2.0);
        for t in [0.5, 1.0, 1.5, 2.0] {
            assert!(c.bound(t) >= 1.0 - 1e-15);
        }
        let w = DecayCertificate::from_compact_support(0.25f64, 1.0, 1.0);
        assert_eq!(w.c, 4.0);
    }

    #[test]
    fn sum_requires_crossing() {
        let a = DecayCertificate::new(1.0f64, 1.0, 1.0);
        let b = DecayCertificate::new(0.0f64, -0.5, 1.0);
        assert!(a.sum(&b).is_none());
        assert_eq!(a.sum(&a).unwrap().c, 2.0);
    }
}
