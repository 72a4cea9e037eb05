//! Truncated Taylor series arithmetic.
//!
//! A [`Jet`] carries the normalized Taylor coefficients `f^{(k)}(t₀)/k!` for
//! `k = 0..=JET_ORDER`. Arithmetic on jets is exact up to truncation, which
//! gives closed-form derivatives of every symbol built from elementary pieces.

use std::ops::{Add, Div, Mul, Neg, Sub};

use crate::scalar::{cone, cr, czero, Real, C};

/// Highest derivative order tracked.
pub const JET_ORDER: usize = 8;
const N: usize = JET_ORDER + 1;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet<T> {
    c: [C<T>; N],
}

impl<T: Real> Jet<T> {
    pub fn constant(v: C<T>) -> Self {
        let mut c = [czero(); N];
        c[0] = v;
        Self { c }
    }

    /// The identity function expanded at `t0`.
    pub fn variable(t0: C<T>) -> Self {
        let mut c = [czero(); N];
        c[0] = t0;
        c[1] = cone();
        Self { c }
    }

    pub fn from_coeffs(c: [C<T>; N]) -> Self {
        Self { c }
    }

    pub fn value(&self) -> C<T> {
        self.c[0]
    }

    pub fn coeff(&self, k: usize) -> C<T> {
        self.c[k]
    }

    /// `f^{(k)}(t₀)`.
    pub fn derivative(&self, k: usize) -> C<T> {
        assert!(k <= JET_ORDER, "derivative order {k} exceeds {JET_ORDER}");
        let mut fact = T::one();
        for j in 2..=k {
            fact *= T::from_usize_lossy(j);
        }
        self.c[k] * fact
    }

    pub fn is_finite(&self) -> bool {
        self.c.iter().all(|v| v.re.is_finite() && v.im.is_finite())
    }

    pub fn scale(&self, a: C<T>) -> Self {
        let mut c = self.c;
        c.iter_mut().for_each(|v| *v *= a);
        Self { c }
    }

    pub fn conj(&self) -> Self {
        let mut c = self.c;
        c.iter_mut().for_each(|v| *v = v.conj());
        Self { c }
    }

    pub fn recip(&self) -> Self {
        let a0 = self.c[0];
        let inv = cone::<T>() / a0;
        let mut b = [czero(); N];
        b[0] = inv;
        for k in 1..N {
            let mut acc: C<T> = czero();
            for i in 1..=k {
                acc += self.c[i] * b[k - i];
            }
            b[k] = -acc * inv;
        }
        Self { c: b }
    }

    pub fn exp(&self) -> Self {
        let mut b = [czero(); N];
        b[0] = self.c[0].exp();
        for k in 1..N {
            let mut acc: C<T> = czero();
            for j in 1..=k {
                acc += self.c[j] * b[k - j] * T::from_usize_lossy(j);
            }
            b[k] = acc / T::from_usize_lossy(k);
        }
        Self { c: b }
    }

    /// Principal branch logarithm.
    pub fn ln(&self) -> Self {
        let a0 = self.c[0];
        let mut b = [czero(); N];
        b[0] = a0.ln();
        for k in 1..N {
            let mut acc: C<T> = czero();
            for j in 1..k {
                acc += b[j] * self.c[k - j] * T::from_usize_lossy(j);
            }
            b[k] = (self.c[k] - acc / T::from_usize_lossy(k)) / a0;
        }
        Self { c: b }
    }

    /// `self^a` on the principal branch.
    pub fn powc(&self, a: C<T>) -> Self {
        (self.ln().scale(a)).exp()
    }

    pub fn powf(&self, a: T) -> Self {
        self.powc(cr(a))
    }

    /// Evaluates the series `self` (expanded at `inner.value()`) at `inner`.
    ///
    /// This is Taylor-series composition `F(u(ε))`, used to push a derivative
    /// jet through an argument that is itself a jet.
    pub fn compose(&self, inner: &Self) -> Self {
        let mut delta = *inner;
        delta.c[0] = czero();
        let mut out = Self::constant(self.c[0]);
        let mut power = Self::constant(cone());
        for j in 1..N {
            power = power * delta;
            // `power` vanishes below order j; skipping those keeps unknown
            // high-order coefficients from leaking downward.
            for k in j..N {
                out.c[k] += power.c[k] * self.c[j];
            }
        }
        out
    }
}

impl<T: Real> Add for Jet<T> {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        for (a, b) in self.c.iter_mut().zip(rhs.c) {
            *a += b;
        }
        self
    }
}

impl<T: Real> Sub for Jet<T> {
    type Output = Self;
    fn sub(mut self, rhs: Self) -> Self {
        for (a, b) in self.c.iter_mut().zip(rhs.c) {
            *a -= b;
        }
        self
    }
}

impl<T: Real> Neg for Jet<T> {
    type Output = Self;
    fn neg(self) -> Self {
        self.scale(cr(-T::one()))
    }
}

impl<T: Real> Mul for Jet<T> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let mut c = [czero(); N];
        for (k, ck) in c.iter_mut().enumerate() {
            let mut acc: C<T> = czero();
            for i in 0..=k {
                acc += self.c[i] * rhs.c[k - i];
            }
            *ck = acc;
        }
        Self { c }
    }
}

impl<T: Real> Div for Jet<T> {
    type Output = Self;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: Self) -> Self {
        self * rhs.recip()
    }
}
