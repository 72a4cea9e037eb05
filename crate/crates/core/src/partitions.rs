//! Smooth partitions of unity: homogeneous and inhomogeneous dyadic windows on
//! `(0, ∞)`, equidistant windows on `ℝ`, and even extensions to `ℝ ∖ {0}`.
//!
//! Every partition is built from one transition function
//! `χ(t) = g(2−t) / (g(2−t) + g(t−1))`, `g(s) = exp(−1/s)` for `s > 0`:
//!
//! * homogeneous dyadic: `φ̇₀(t) = χ(t) − χ(2t)`, `φ̇_n(t) = φ̇₀(2⁻ⁿt)`, `supp φ̇₀ = [1/2, 2]`;
//! * inhomogeneous dyadic: `φ₀ = χ`, `φ_n = φ̇_n` for `n ≥ 1`;
//! * equidistant: `ψ(t) = χ(t+1) − χ(t+2)`, `ψ_n = ψ(· − n)`, `supp ψ = [−1, 1]`.
//!
//! All sums telescope to one. On `[1, 2]` the two live dyadic windows are
//! `χ` and `1 − χ`, so they cross at `t = 3/2`.

use std::ops::RangeInclusive;

use crate::jet::Jet;
use crate::scalar::{cr, Real};

/// Below this argument `exp(−1/s)` is treated as an exact zero.
const G_CUTOFF: f64 = 1.0 / 700.0;

/// Monotone transition from 1 on `(−∞, 1]` to 0 on `[2, ∞)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SmoothBump;

impl SmoothBump {
    pub fn new() -> Self {
        SmoothBump
    }

    fn g<T: Real>(s: T) -> T {
        if s <= T::lit(G_CUTOFF) {
            T::zero()
        } else {
            (-s.recip()).exp()
        }
    }

    pub fn eval<T: Real>(&self, t: T) -> T {
        if t <= T::one() {
            return T::one();
        }
        let two = T::lit(2.0);
        if t >= two {
            return T::zero();
        }
        let a = Self::g(two - t);
        let b = Self::g(t - T::one());
        a / (a + b)
    }

    fn g_jet<T: Real>(s: Jet<T>) -> Jet<T> {
        if s.value().re <= T::lit(G_CUTOFF) {
            Jet::constant(cr(T::zero()))
        } else {
            (-s.recip()).exp()
        }
    }

    /// Taylor jet of `χ ∘ u`. The base point of `u` must be real.
    pub fn jet<T: Real>(&self, u: Jet<T>) -> Jet<T> {
        let t = u.value().re;
        if t <= T::one() {
            return Jet::constant(cr(T::one()));
        }
        let two = T::lit(2.0);
        if t >= two {
            return Jet::constant(cr(T::zero()));
        }
        let one = Jet::constant(cr(T::one()));
        let a = Self::g_jet(Jet::constant(cr(two)) - u);
        let b = Self::g_jet(u - one);
        a / (a + b)
    }
}

/// Returns the smooth transition used by every partition.
pub fn build_bump() -> SmoothBump {
    SmoothBump
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DyadicBase {
    Homogeneous,
    Inhomogeneous,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PartitionKind {
    HomogeneousDyadic,
    InhomogeneousDyadic,
    Equidistant,
    EvenBisectorial(DyadicBase),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PartitionOfUnity {
    kind: PartitionKind,
    bump: SmoothBump,
}

pub fn build_homogeneous_dyadic(bump: SmoothBump) -> PartitionOfUnity {
    PartitionOfUnity {
        kind: PartitionKind::HomogeneousDyadic,
        bump,
    }
}

pub fn build_equidistant(bump: SmoothBump) -> PartitionOfUnity {
    PartitionOfUnity {
        kind: PartitionKind::Equidistant,
        bump,
    }
}

/// Lumps all `n ≤ 0` windows of a homogeneous partition into `φ₀ = χ`.
///
/// Panics if `p` is not homogeneous dyadic.
pub fn to_inhomogeneous(p: PartitionOfUnity) -> PartitionOfUnity {
    assert_eq!(p.kind, PartitionKind::HomogeneousDyadic, "to_inhomogeneous needs a homogeneous partition");
    PartitionOfUnity {
        kind: PartitionKind::InhomogeneousDyadic,
        bump: p.bump,
    }
}

/// Extends a dyadic partition evenly: `φ_n(t) := φ_n(|t|)`.
///
/// Panics on equidistant or already-even input.
pub fn even_extension(p: PartitionOfUnity) -> PartitionOfUnity {
    let base = match p.kind {
        PartitionKind::HomogeneousDyadic => DyadicBase::Homogeneous,
        PartitionKind::InhomogeneousDyadic => DyadicBase::Inhomogeneous,
        other => panic!("even_extension needs a dyadic partition, got {other:?}"),
    };
    PartitionOfUnity {
        kind: PartitionKind::EvenBisectorial(base),
        bump: p.bump,
    }
}

impl PartitionOfUnity {
    pub fn kind(&self) -> PartitionKind {
        self.kind
    }

    pub fn bump(&self) -> SmoothBump {
        self.bump
    }

    /// Number of continuous derivatives; `None` means `C^∞`.
    pub fn smoothness_order(&self) -> Option<u32> {
        None
    }

    /// Smallest admissible index (`Some(0)` for inhomogeneous families).
    pub fn min_index(&self) -> Option<i32> {
        match self.kind {
            PartitionKind::InhomogeneousDyadic
            | PartitionKind::EvenBisectorial(DyadicBase::Inhomogeneous) => Some(0),
            _ => None,
        }
    }

    pub fn is_even(&self) -> bool {
        matches!(self.kind, PartitionKind::EvenBisectorial(_))
    }

    fn dyadic_base(&self) -> Option<DyadicBase> {
        match self.kind {
            PartitionKind::HomogeneousDyadic => Some(DyadicBase::Homogeneous),
            PartitionKind::InhomogeneousDyadic => Some(DyadicBase::Inhomogeneous),
            PartitionKind::EvenBisectorial(b) => Some(b),
            PartitionKind::Equidistant => None,
        }
    }

    /// Value of the `n`-th window at `t`.
    pub fn window<T: Real>(&self, n: i32, t: T) -> T {
        let chi = |s: T| self.bump.eval(s);
        match self.dyadic_base() {
            None => {
                let s = t - T::from_i32(n).expect("i32");
                chi(s + T::one()) - chi(s + T::lit(2.0))
            }
            Some(base) => {
                let t = if self.is_even() { t.abs() } else { t };
                if !(t > T::zero()) {
                    return T::zero();
                }
                if base == DyadicBase::Inhomogeneous {
                    if n < 0 {
                        return T::zero();
                    }
                    if n == 0 {
                        return chi(t);
                    }
                }
                let s = t * T::lit(2.0).powi(-n);
                chi(s) - chi(s + s)
            }
        }
    }

    /// Taylor jet of the `n`-th window composed with `u` (real base point).
    pub fn window_jet<T: Real>(&self, n: i32, u: Jet<T>) -> Jet<T> {
        let zero = Jet::constant(cr(T::zero()));
        match self.dyadic_base() {
            None => {
                let shift = T::from_i32(n).expect("i32");
                let s = u - Jet::constant(cr(shift));
                self.bump.jet(s + Jet::constant(cr(T::one()))) - self.bump.jet(s + Jet::constant(cr(T::lit(2.0))))
            }
            Some(base) => {
                let t0 = u.value().re;
                let u = if self.is_even() && t0 < T::zero() { -u } else { u };
                if !(u.value().re > T::zero()) {
                    return zero;
                }
                if base == DyadicBase::Inhomogeneous {
                    if n < 0 {
                        return zero;
                    }
                    if n == 0 {
                        return self.bump.jet(u);
                    }
                }
                let s = u.scale(cr(T::lit(2.0).powi(-n)));
                self.bump.jet(s) - self.bump.jet(s + s)
            }
        }
    }

    /// `φ̃_n = φ_{n−1} + φ_n + φ_{n+1}`, dropping indices outside the family.
    ///
    /// `φ̃_n φ_n = φ_n`, and `φ̃_m φ_n = 0` once `|m − n| ≥ 3`.
    pub fn tilde<T: Real>(&self, n: i32, t: T) -> T {
        (n - 1..=n + 1)
            .filter(|k| self.min_index().is_none_or(|m| *k >= m))
            .map(|k| self.window(k, t))
            .sum()
    }

    pub fn tilde_jet<T: Real>(&self, n: i32, u: Jet<T>) -> Jet<T> {
        (n - 1..=n + 1)
            .filter(|k| self.min_index().is_none_or(|m| *k >= m))
            .map(|k| self.window_jet(k, u))
            .fold(Jet::constant(cr(T::zero())), |a, b| a + b)
    }

    /// Closed support of the `n`-th window (on `|t|` for even families).
    pub fn support<T: Real>(&self, n: i32) -> (T, T) {
        match self.dyadic_base() {
            None => {
                let c = T::from_i32(n).expect("i32");
                (c - T::one(), c + T::one())
            }
            Some(base) => {
                if base == DyadicBase::Inhomogeneous && n == 0 {
                    (T::zero(), T::lit(2.0))
                } else {
                    let two = T::lit(2.0);
                    (two.powi(n - 1), two.powi(n + 1))
                }
            }
        }
    }

    /// Indices whose windows can be nonzero on `[lo, hi]` (magnitudes for
    /// dyadic families).
    ///
    /// For dyadic families this is `[⌊log₂ lo⌋ − 1, ⌈log₂ hi⌉ + 1]`,
    /// clipped at the minimal index.
    pub fn active_indices<T: Real>(&self, lo: T, hi: T) -> RangeInclusive<i32> {
        match self.dyadic_base() {
            None => {
                let a = lo.floor().to_i32().expect("index range") - 1;
                let b = hi.ceil().to_i32().expect("index range") + 1;
                a..=b
            }
            Some(_) => {
                let a = lo.abs().log2().floor().to_i32().expect("index range") - 1;
                let b = hi.abs().log2().ceil().to_i32().expect("index range") + 1;
                match self.min_index() {
                    Some(m) => m.max(a.min(m))..=b.max(m),
                    None => a..=b,
                }
            }
        }
    }
}

/// Outcome of [`validate_partition`].
#[derive(Debug, Clone, PartialEq)]
pub struct PartitionReport<T> {
    /// `max_t |Σ_n φ_n(t) − 1|` over the grid.
    pub max_sum_defect: T,
    /// Largest number of simultaneously nonzero windows.
    pub max_overlap: usize,
    /// Grid points where some window is nonzero outside its declared support.
    pub support_violations: usize,
    pub passed: bool,
}

/// Checks sum-to-one, supports and overlap on the given grid.
pub fn validate_partition<T: Real>(p: &PartitionOfUnity, grid: &[T]) -> PartitionReport<T> {
    let mut max_sum_defect = T::zero();
    let mut max_overlap = 0;
    let mut support_violations = 0;
    for &t in grid {
        let probe = if p.dyadic_base().is_some() { t.abs() } else { t };
        if p.dyadic_base().is_some() && probe == T::zero() {
            continue;
        }
        let mut sum = T::zero();
        let mut live = 0;
        for n in p.active_indices(probe, probe) {
            let v = p.window(n, t);
            sum += v;
            if v != T::zero() {
                live += 1;
                let (a, b) = p.support::<T>(n);
                if probe < a || probe > b {
                    support_violations += 1;
                }
            }
        }
        max_sum_defect = max_sum_defect.max((sum - T::one()).abs());
        max_overlap = max_overlap.max(live);
    }
    let passed =
        max_sum_defect <= T::tol(crate::tol::PARTITION_SUM) && max_overlap <= 2 && support_violations == 0;
    PartitionReport {
        max_sum_defect,
        max_overlap,
        support_violations,
        passed,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn log_grid(lo: f64, hi: f64, per_octave: usize) -> Vec<f64> {
        let (a, b) = (lo.log2(), hi.log2());
        let n = ((b - a) * per_octave as f64) as usize;
        (0..=n).map(|i| 2f64.powf(a + (b - a) * i as f64 / n as f64)).collect()
    }

    #[test]
    fn bump_plateaus_and_midpoint() {
        let chi = build_bump();
        assert_eq!(chi.eval(0.5), 1.0);
        assert_eq!(chi.eval(2.5), 0.0);
        assert_eq!(chi.eval(1.0), 1.0);
        assert_eq!(chi.eval(2.0), 0.0);
        assert!((chi.eval(1.5f64) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn bump_is_monotone_and_bounded() {
        let chi = build_bump();
        let mut prev = 1.0;
        for i in 0..=1000 {
            let v = chi.eval(0.9 + 1.2 * i as f64 / 1000.0);
            assert!((0.0..=1.0).contains(&v) && v <= prev);
            prev = v;
        }
    }

    #[test]
    fn bump_jet_matches_finite_differences() {
        let chi = build_bump();
        for &t in &[1.2f64, 1.5, 1.81] {
            let j = chi.jet(Jet::variable(cr(t)));
            let h = 1e-4;
            let fd1 = (chi.eval(t + h) - chi.eval(t - h)) / (2.0 * h);
            let fd2 = (chi.eval(t + h) - 2.0 * chi.eval(t) + chi.eval(t - h)) / (h * h);
            assert!((j.value().re - chi.eval(t)).abs() < 1e-15);
            assert!((j.derivative(1).re - fd1).abs() < 1e-6);
            assert!((j.derivative(2).re - fd2).abs() < 1e-4);
        }
    }

    #[test]
    fn homogeneous_window_values() {
        let p = build_homogeneous_dyadic(build_bump());
        assert_eq!(p.window(0, 1.0), 1.0);
        assert_eq!(p.window(0, 0.4), 0.0);
        assert_eq!(p.window(0, 2.1), 0.0);
        for &t in &[0.3, 0.77, 1.3, 5.0, 123.4] {
            for n in -3..4 {
                assert_eq!(p.window(n, t), p.window(0, t * 2f64.powi(-n)));
            }
        }
    }

    #[test]
    fn homogeneous_sum_to_one_on_wide_log_grid() {
        let p = build_homogeneous_dyadic(build_bump());
        for t in log_grid(2f64.powi(-30), 2f64.powi(30), 37) {
            let s: f64 = (-40..=40).map(|n| p.window(n, t)).sum();
            assert!((s - 1.0).abs() < 1e-12, "t = {t}: {s}");
        }
    }

    #[test]
    fn inhomogeneous_windows() {
        let p = to_inhomogeneous(build_homogeneous_dyadic(build_bump()));
        assert_eq!(p.window(0, 0.3), 1.0);
        assert_eq!(p.window(0, 1.0), 1.0);
        assert_eq!(p.window(0, 2.1), 0.0);
        assert_eq!(p.window(-1, 0.5), 0.0);
        for t in log_grid(2f64.powi(-20), 2f64.powi(30), 23) {
            let s: f64 = (0..=40).map(|n| p.window(n, t)).sum();
            assert!((s - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn equidistant_windows() {
        let p = build_equidistant(build_bump());
        assert_eq!(p.window(0, -1.5), 0.0);
        assert_eq!(p.window(0, 1.5), 0.0);
        assert!((p.window(0, 0.0f64) - 1.0).abs() < 1e-15);
        for i in 0..=2000 {
            let t = -10.0 + 20.0 * i as f64 / 2000.0;
            let s: f64 = (-20..=20).map(|n| p.window(n, t)).sum();
            assert!((s - 1.0).abs() < 1e-12);
            assert_eq!(p.window(3, t), p.window(0, t - 3.0));
            assert!((p.window(0, t) - p.window(0, -t)).abs() < 1e-15);
        }
    }

    #[test]
    fn even_extension_windows() {
        let p = even_extension(build_homogeneous_dyadic(build_bump()));
        assert_eq!(p.window(0, -1.0), 1.0);
        assert_eq!(p.window(0, 1.0), 1.0);
        assert_eq!(p.window(0, 0.0), 0.0);
        for t in log_grid(1e-3, 1e3, 11) {
            for s in [t, -t] {
                let sum: f64 = p.active_indices(s, s).map(|n| p.window(n, s)).sum();
                assert!((sum - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn tilde_identities() {
        let p = build_homogeneous_dyadic(build_bump());
        assert!((p.tilde(0, 1.0f64) - 1.0).abs() < 1e-15);
        for i in 0..=500 {
            let t = 0.5 + 1.5 * i as f64 / 500.0;
            let w = p.window(0, t);
            assert!((p.tilde(0, t) * w - w).abs() < 1e-12);
        }
        for t in log_grid(1e-3, 1e3, 50) {
            assert_eq!(p.tilde(0, t) * p.window(3, t), 0.0);
            assert_eq!(p.tilde(0, t) * p.window(-3, t), 0.0);
        }
        // At distance two the widened window still overlaps.
        assert!(p.tilde(0, 0.35f64) * p.window(-2, 0.35f64) > 0.0);
    }

    #[test]
    fn validation_report() {
        let p = build_homogeneous_dyadic(build_bump());
        let r = validate_partition(&p, &log_grid(1e-4, 1e4, 41));
        assert!(r.passed, "{r:?}");
        assert_eq!(r.max_overlap, 2);
        let plateau = validate_partition(&p, &[1.0, 2.0, 4.0, 0.25]);
        assert_eq!(plateau.max_sum_defect, 0.0);
        assert_eq!(plateau.max_overlap, 1);
        let eq = validate_partition(&build_equidistant(build_bump()), &[-3.3, 0.2, 0.5, 7.9]);
        assert!(eq.passed && eq.max_overlap == 2);
    }

    #[test]
    fn active_index_truncation() {
        let p = build_homogeneous_dyadic(build_bump());
        let (a, b) = (0.013, 37.0);
        let range = p.active_indices(a, b);
        for n in range.start() - 6..*range.start() {
            for t in log_grid(a, b, 40) {
                assert_eq!(p.window(n, t), 0.0);
            }
        }
        for n in range.end() + 1..range.end() + 6 {
            for t in log_grid(a, b, 40) {
                assert_eq!(p.window(n, t), 0.0);
            }
        }
    }

    #[test]
    fn window_derivatives_stay_bounded_under_refinement() {
        // Central differences of order k settle as the step shrinks.
        let p = build_homogeneous_dyadic(build_bump());
        let f = |t: f64| p.window(0, t);
        for k in 1..=6usize {
            let mut prev_sup = None;
            for h in [2e-3, 1e-3] {
                let mut sup = 0.0f64;
                let mut t = 0.25;
                while t <= 4.0 {
                    let mut acc = 0.0;
                    for j in 0..=k {
                        let binom = (0..j).fold(1.0, |b, i| b * (k - i) as f64 / (i + 1) as f64);
                        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                        acc += sign * binom * f(t + (k as f64 / 2.0 - j as f64) * h);
                    }
                    sup = sup.max((acc / h.powi(k as i32)).abs());
                    t += 0.0007;
                }
                assert!(sup.is_finite());
                if let Some(prev) = prev_sup {
                    let ratio: f64 = sup / prev;
                    assert!(ratio < 1.5 && ratio > 0.5, "order {k}: {prev} -> {sup}");
                }
                prev_sup = Some(sup);
            }
        }
    }
}
