//! Multiplier functions `f` on `(0, ∞)` (or on `ℝ` for strip and even
//! symbols) together with their derivatives, decay certificates and the
//! Besov/Mihlin norm estimators.

mod besov;
mod cert;
mod spec;

pub use besov::{
    besov_norm_inf_1, besov_norm_inf_inf, iterated_difference, mihlin_l1_norm, mihlin_norm,
    mihlin_seminorm_classical, BesovOptions, EstimateMethod, L1NormEstimate, MihlinOptions, NormEstimate,
};
pub use cert::DecayCertificate;
pub use spec::{make_symbol, SymbolSpec};

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::jet::{Jet, JET_ORDER};
use crate::partitions::{PartitionKind, PartitionOfUnity};
use crate::scalar::{cone, cr, czero, Real, C};

/// Where a symbol naturally lives.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Domain {
    /// `(0, ∞)`, extended holomorphically to a sector when possible.
    Positive,
    /// The whole real line (equidistant windows, even extensions).
    Real,
}

type CustomFn<T> = Arc<dyn Fn(C<T>) -> C<T> + Send + Sync>;

#[derive(Clone)]
enum Node<T: Real> {
    Constant(C<T>),
    Power(T),
    Rho,
    Exp(C<T>),
    PsiExp { a: T, b: T },
    PsiRes { a: T, b: T, pole: C<T> },
    ImagPower(T),
    RationalPower { a: T, b: T },
    Window { partition: PartitionOfUnity, n: i32 },
    Tilde { partition: PartitionOfUnity, n: i32 },
    Product(Vec<Symbol<T>>),
    Sum(Vec<Symbol<T>>),
    Scaled(C<T>, Symbol<T>),
    Dilate(T, Symbol<T>),
    AbsSquare(Symbol<T>),
    Even(Symbol<T>),
    ComposeLog(Symbol<T>),
    Derivative(usize, Symbol<T>),
    Custom(CustomFn<T>),
}

/// A scalar multiplier function.
#[derive(Clone)]
pub struct Symbol<T: Real> {
    node: Arc<Node<T>>,
    name: Arc<str>,
    domain: Domain,
    decay: Option<DecayCertificate<T>>,
    support: Option<(T, T)>,
    bound: Option<T>,
    homogeneous: bool,
    holomorphic: bool,
    sector: T,
}

impl<T: Real> fmt::Debug for Symbol<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Symbol")
            .field("name", &self.name)
            .field("domain", &self.domain)
            .field("decay", &self.decay)
            .field("support", &self.support)
            .finish()
    }
}

fn pow<T: Real>(z: C<T>, a: C<T>) -> C<T> {
    if z == czero() {
        return if a == czero() {
            cone()
        } else if a.re > T::zero() {
            czero()
        } else {
            cr(T::infinity())
        };
    }
    if z.im == T::zero() && z.re > T::zero() && a.im == T::zero() {
        return cr(z.re.powf(a.re));
    }
    (z.ln() * a).exp()
}

fn pow_jet<T: Real>(u: Jet<T>, a: C<T>) -> Jet<T> {
    let v = u.value();
    if v == czero() {
        if a == czero() {
            return Jet::constant(cone());
        }
        let mut c = [cr(T::nan()); JET_ORDER + 1];
        c[0] = pow(v, a);
        return Jet::from_coeffs(c);
    }
    u.powc(a)
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, j| acc * (n - j) as f64 / (j + 1) as f64)
}

/// Taylor coefficients of `f` at `z0` by central differences in the real
/// direction, extrapolated twice (errors `O(h²) → O(h⁶)`).
fn difference_jet<T: Real>(f: &CustomFn<T>, z0: C<T>) -> Jet<T> {
    let scale = if z0.norm() > T::zero() { z0.norm() } else { T::one() };
    let mut c = [czero(); JET_ORDER + 1];
    c[0] = f(z0);
    let mut fact = T::one();
    for (k, ck) in c.iter_mut().enumerate().skip(1) {
        fact *= T::from_usize_lossy(k);
        // Keeps every node inside (0.6·|z0|, 1.4·|z0|).
        let h = scale * T::epsilon().powf(T::one() / T::from_usize_lossy(k + 6)).min(T::lit(0.8) / T::from_usize_lossy(k));
        let central = |h: T| -> C<T> {
            let mut acc = czero();
            for j in 0..=k {
                let off = (T::from_usize_lossy(k) / T::lit(2.0) - T::from_usize_lossy(j)) * h;
                let w = T::lit(binomial(k, j)) * if j % 2 == 0 { T::one() } else { -T::one() };
                acc += f(z0 + cr(off)) * w;
            }
            acc / h.powi(k as i32)
        };
        let two = T::lit(2.0);
        let d = [central(h), central(h / two), central(h / (two * two))];
        let r1 = [(d[1] * T::lit(4.0) - d[0]) / T::lit(3.0), (d[2] * T::lit(4.0) - d[1]) / T::lit(3.0)];
        *ck = (r1[1] * T::lit(16.0) - r1[0]) / T::lit(15.0) / fact;
    }
    Jet::from_coeffs(c)
}

impl<T: Real> Symbol<T> {
    fn leaf(node: Node<T>, name: String) -> Self {
        Self {
            node: Arc::new(node),
            name: name.into(),
            domain: Domain::Positive,
            decay: None,
            support: None,
            bound: None,
            homogeneous: false,
            holomorphic: true,
            sector: T::PI(),
        }
    }

    pub fn constant(c: C<T>) -> Self {
        let mut s = Self::leaf(Node::Constant(c), format!("const({c})"));
        s.decay = Some(DecayCertificate::new(T::zero(), T::zero(), c.norm()));
        s.bound = Some(c.norm());
        s.homogeneous = true;
        s
    }

    pub fn one() -> Self {
        Self::constant(cone())
    }

    /// `t^θ`.
    pub fn power(theta: T) -> Self {
        let mut s = Self::leaf(Node::Power(theta), format!("power({theta})"));
        s.decay = Some(DecayCertificate::new(theta, -theta, T::one()));
        s.homogeneous = true;
        s
    }

    /// `ρ(t) = t(1+t)⁻²`.
    pub fn rho() -> Self {
        let mut s = Self::leaf(Node::Rho, "rho".into());
        s.decay = Some(DecayCertificate::new(T::one(), T::one(), T::one()));
        s.bound = Some(T::lit(0.25));
        s
    }

    /// `e^{−rate·t}`.
    pub fn exp_decay(rate: C<T>) -> Self {
        let mut s = Self::leaf(Node::Exp(rate), format!("exp(-{rate}t)"));
        let r = rate.re;
        s.decay = if r > T::zero() {
            // e^{−rt} ≤ (2/(e r))² t⁻² for t ≥ 1.
            let c = (T::lit(2.0) / (T::E() * r)).powi(2).max(T::one());
            Some(DecayCertificate::new(T::zero(), T::lit(2.0), c))
        } else if r == T::zero() {
            Some(DecayCertificate::new(T::zero(), T::zero(), T::one()))
        } else {
            None
        };
        if r >= T::zero() {
            s.bound = Some(T::one());
        }
        s.sector = if rate == czero() {
            T::PI()
        } else {
            (T::FRAC_PI_2() - rate.arg().abs()).max(T::zero())
        };
        s
    }

    /// `ψ_exp(t) = t^a exp(−t^b)`.
    pub fn psi_exp(a: T, b: T) -> Self {
        let mut s = Self::leaf(Node::PsiExp { a, b }, format!("psi_exp({a},{b})"));
        // For t ≥ 1: t^a e^{−t^b} ≤ C t^{−(a+4)} with C = sup t^{2a+4} e^{−t^b}.
        let p = T::lit(2.0) * a + T::lit(4.0);
        let tstar = (p / b).powf(b.recip());
        let c = if tstar > T::one() {
            (p * tstar.ln() - p / b).exp()
        } else {
            (-T::one()).exp()
        };
        s.decay = Some(DecayCertificate::new(a, a + T::lit(4.0), c.max(T::one())));
        s.bound = Some((a / b).powf(a / b) * (-a / b).exp());
        s.sector = (T::FRAC_PI_2() / b).min(T::PI());
        s
    }

    /// `ψ_res(t) = t^a (λ₀ − t)^{−b}`.
    pub fn psi_res(a: T, b: T, pole: C<T>) -> Self {
        let mut s = Self::leaf(Node::PsiRes { a, b, pole }, format!("psi_res({a},{b},{pole})"));
        // κ = inf_{t ≥ 0} |λ₀ − t| / (1 + t), attained at 0, ∞ or a root of
        // u² − (1+x)u + y² = 0 with u = t − x.
        let (x, y) = (pole.re, pole.im);
        let ratio2 = |t: T| ((t - x).powi(2) + y * y) / (T::one() + t).powi(2);
        let mut k2 = ratio2(T::zero()).min(T::one());
        let disc = (T::one() + x).powi(2) - T::lit(4.0) * y * y;
        if disc >= T::zero() {
            for sgn in [T::one(), -T::one()] {
                let t = x + ((T::one() + x) + sgn * disc.sqrt()) / T::lit(2.0);
                if t >= T::zero() {
                    k2 = k2.min(ratio2(t));
                }
            }
        }
        if k2 > T::zero() {
            s.decay = Some(DecayCertificate::new(a, b - a, k2.sqrt().powf(-b)));
        }
        s.sector = pole.arg().abs();
        s
    }

    /// `t^{is}`.
    pub fn imag_power(sv: T) -> Self {
        let mut s = Self::leaf(Node::ImagPower(sv), format!("imag_power({sv})"));
        s.decay = Some(DecayCertificate::new(T::zero(), T::zero(), T::one()));
        s.bound = Some(T::one());
        s.homogeneous = true;
        s
    }

    /// `t^a (1+t)^{−b}`.
    pub fn rational_power(a: T, b: T) -> Self {
        let mut s = Self::leaf(Node::RationalPower { a, b }, format!("rational({a},{b})"));
        s.decay = Some(DecayCertificate::new(a, b - a, T::one()));
        s
    }

    fn window_like(partition: PartitionOfUnity, n: i32, tilde: bool) -> Self {
        let name = if tilde { format!("tilde_{n}") } else { format!("window_{n}") };
        let node = if tilde {
            Node::Tilde { partition, n }
        } else {
            Node::Window { partition, n }
        };
        let mut s = Self::leaf(node, name);
        s.holomorphic = false;
        s.sector = T::zero();
        s.bound = Some(T::one());
        let span = if tilde { n - 1..=n + 1 } else { n..=n };
        let supports: Vec<(T, T)> = span
            .filter(|k| partition.min_index().is_none_or(|m| *k >= m))
            .map(|k| partition.support::<T>(k))
            .collect();
        let lo = supports.iter().map(|s| s.0).fold(T::infinity(), T::min);
        let hi = supports.iter().map(|s| s.1).fold(T::neg_infinity(), T::max);
        match partition.kind() {
            PartitionKind::Equidistant => {
                s.domain = Domain::Real;
                s.support = Some((lo, hi));
            }
            PartitionKind::EvenBisectorial(_) => {
                s.domain = Domain::Real;
            }
            _ => {
                s.support = Some((lo, hi));
                s.decay = Some(DecayCertificate::from_compact_support(lo, hi, T::one()));
            }
        }
        s
    }

    /// The `n`-th window of a partition as a symbol.
    pub fn window(partition: PartitionOfUnity, n: i32) -> Self {
        Self::window_like(partition, n, false)
    }

    /// `φ̃_n = φ_{n−1} + φ_n + φ_{n+1}`.
    pub fn tilde(partition: PartitionOfUnity, n: i32) -> Self {
        Self::window_like(partition, n, true)
    }

    /// Wraps a closure. Derivatives fall back to finite differences.
    pub fn custom<F>(name: &str, f: F, holomorphic: bool, decay: Option<DecayCertificate<T>>) -> Self
    where
        F: Fn(C<T>) -> C<T> + Send + Sync + 'static,
    {
        let mut s = Self::leaf(Node::Custom(Arc::new(f)), name.to_string());
        s.holomorphic = holomorphic;
        s.sector = if holomorphic { T::FRAC_PI_2() } else { T::zero() };
        s.decay = decay;
        s
    }

    fn combine(node: Node<T>, name: String, parts: &[&Symbol<T>]) -> Self {
        let mut s = Self::leaf(node, name);
        s.holomorphic = parts.iter().all(|p| p.holomorphic);
        s.sector = parts.iter().map(|p| p.sector).fold(T::PI(), T::min);
        s.domain = if parts.iter().any(|p| p.domain == Domain::Real) {
            Domain::Real
        } else {
            Domain::Positive
        };
        s
    }

    /// Pointwise product.
    pub fn mul(&self, other: &Symbol<T>) -> Self {
        let mut s = Self::combine(
            Node::Product(vec![self.clone(), other.clone()]),
            format!("({})*({})", self.name, other.name),
            &[self, other],
        );
        s.decay = match (self.decay, other.decay) {
            (Some(a), Some(b)) => Some(a.product(&b)),
            _ => None,
        };
        s.support = match (self.support, other.support) {
            (Some(a), Some(b)) => Some((a.0.max(b.0), a.1.min(b.1).max(a.0.max(b.0)))),
            (Some(a), None) | (None, Some(a)) => Some(a),
            _ => None,
        };
        if let (Some(a), Some(b)) = (self.bound, other.bound) {
            s.bound = Some(a * b);
        }
        if s.domain == Domain::Positive {
            if let (Some((lo, hi)), Some(m)) = (s.support, s.bound) {
                let compact = DecayCertificate::from_compact_support(lo, hi, m);
                s.decay = Some(match s.decay {
                    Some(d) if d.c <= compact.c && d.eps0 >= compact.eps0 && d.eps_inf >= compact.eps_inf => d,
                    _ => compact,
                });
            }
        }
        s.homogeneous = self.homogeneous && other.homogeneous;
        s
    }

    /// Pointwise sum of several symbols.
    pub fn sum(parts: &[Symbol<T>]) -> Self {
        assert!(!parts.is_empty(), "empty symbol sum");
        let refs: Vec<&Symbol<T>> = parts.iter().collect();
        let name = parts.iter().map(|p| p.name.to_string()).collect::<Vec<_>>().join(" + ");
        let mut s = Self::combine(Node::Sum(parts.to_vec()), name, &refs);
        s.decay = parts
            .iter()
            .map(|p| p.decay)
            .reduce(|a, b| match (a, b) {
                (Some(a), Some(b)) => a.sum(&b),
                _ => None,
            })
            .flatten();
        if parts.iter().all(|p| p.support.is_some()) {
            let lo = parts.iter().map(|p| p.support.unwrap().0).fold(T::infinity(), T::min);
            let hi = parts.iter().map(|p| p.support.unwrap().1).fold(T::neg_infinity(), T::max);
            s.support = Some((lo, hi));
        }
        if parts.iter().all(|p| p.bound.is_some()) {
            s.bound = Some(parts.iter().map(|p| p.bound.unwrap()).sum());
        }
        if s.decay.is_none() && s.domain == Domain::Positive {
            if let (Some((lo, hi)), Some(m)) = (s.support, s.bound) {
                s.decay = Some(DecayCertificate::from_compact_support(lo, hi, m));
            }
        }
        s
    }

    pub fn add(&self, other: &Symbol<T>) -> Self {
        Self::sum(&[self.clone(), other.clone()])
    }

    /// `c · f`.
    pub fn scale(&self, c: C<T>) -> Self {
        let mut s = Self::combine(Node::Scaled(c, self.clone()), format!("{c}*({})", self.name), &[self]);
        s.decay = self.decay.map(|d| d.scaled(c.norm()));
        s.support = self.support;
        s.bound = self.bound.map(|b| b * c.norm());
        s.homogeneous = self.homogeneous;
        s
    }

    /// `t ↦ f(s t)` for `s > 0`.
    pub fn dilate(&self, sv: T) -> Self {
        let mut s = Self::combine(Node::Dilate(sv, self.clone()), format!("({})({sv}·t)", self.name), &[self]);
        s.decay = self.decay.map(|d| d.dilated(sv));
        s.support = self.support.map(|(a, b)| (a / sv, b / sv));
        s.bound = self.bound;
        s.homogeneous = self.homogeneous;
        s
    }

    /// `|f|²` on the real domain.
    pub fn abs_square(&self) -> Self {
        let mut s = Self::combine(Node::AbsSquare(self.clone()), format!("|{}|^2", self.name), &[self]);
        s.holomorphic = false;
        s.sector = T::zero();
        s.decay = self.decay.map(|d| d.squared());
        s.support = self.support;
        s.bound = self.bound.map(|b| b * b);
        s.homogeneous = self.homogeneous;
        s
    }

    /// Even extension `t ↦ f(|t|)`; for complex arguments `z ↦ f(±z)` with the
    /// sign chosen so that `Re(±z) ≥ 0`.
    pub fn even(&self) -> Self {
        let mut s = Self::combine(Node::Even(self.clone()), format!("even({})", self.name), &[self]);
        s.domain = Domain::Real;
        s.bound = self.bound;
        s.holomorphic = false;
        s.sector = T::zero();
        s
    }

    /// `t ↦ f(log t)`, turning a strip symbol into a sectorial one.
    pub fn compose_log(&self) -> Self {
        let mut s = Self::combine(Node::ComposeLog(self.clone()), format!("({})∘log", self.name), &[self]);
        s.domain = Domain::Positive;
        s.sector = if self.holomorphic { T::FRAC_PI_2() } else { T::zero() };
        s.bound = self.bound;
        s.support = self.support.map(|(a, b)| (a.exp(), b.exp()));
        if let (Some((lo, hi)), Some(m)) = (s.support, s.bound) {
            s.decay = Some(DecayCertificate::from_compact_support(lo, hi, m));
        }
        s
    }

    /// `f^{(k)}` as a symbol. Its jets carry `JET_ORDER − k` valid orders;
    /// the rest are NaN.
    pub fn derivative_symbol(&self, k: usize) -> Self {
        assert!(k <= JET_ORDER, "derivative order {k} exceeds {JET_ORDER}");
        let mut s = Self::combine(Node::Derivative(k, self.clone()), format!("d{k}({})", self.name), &[self]);
        s.support = self.support;
        s
    }

    /// Replaces the decay certificate.
    pub fn with_decay(mut self, decay: Option<DecayCertificate<T>>) -> Self {
        self.decay = decay;
        self
    }

    pub fn with_name(mut self, name: &str) -> Self {
        self.name = name.into();
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn decay(&self) -> Option<DecayCertificate<T>> {
        self.decay
    }

    /// Closed interval outside which `f` vanishes, if known.
    pub fn support(&self) -> Option<(T, T)> {
        self.support
    }

    /// Known bound on `sup |f|` over the real domain.
    pub fn bound(&self) -> Option<T> {
        self.bound
    }

    /// `f(s t) = s^θ f(t)` for some `θ`.
    pub fn is_homogeneous(&self) -> bool {
        self.homogeneous
    }

    /// Extends holomorphically off the real axis.
    pub fn is_holomorphic(&self) -> bool {
        self.holomorphic
    }

    /// Half-angle of the sector on which `f` is holomorphic with the decay
    /// of its certificate (0 when not holomorphic).
    pub fn sector_limit(&self) -> T {
        self.sector
    }

    fn value(&self, z: C<T>) -> C<T> {
        let one = cone::<T>();
        match self.node.as_ref() {
            Node::Constant(c) => *c,
            Node::Power(th) => pow(z, cr(*th)),
            Node::Rho => z / ((one + z) * (one + z)),
            Node::Exp(r) => (-(*r) * z).exp(),
            Node::PsiExp { a, b } => pow(z, cr(*a)) * (-pow(z, cr(*b))).exp(),
            Node::PsiRes { a, b, pole } => pow(z, cr(*a)) * pow(*pole - z, cr(-*b)),
            Node::ImagPower(sv) => pow(z, C::new(T::zero(), *sv)),
            Node::RationalPower { a, b } => pow(z, cr(*a)) * pow(one + z, cr(-*b)),
            Node::Window { partition, n } => cr(partition.window(*n, z.re)),
            Node::Tilde { partition, n } => cr(partition.tilde(*n, z.re)),
            Node::Product(ps) => ps.iter().fold(one, |acc, p| acc * p.value(z)),
            Node::Sum(ps) => ps.iter().fold(czero(), |acc, p| acc + p.value(z)),
            Node::Scaled(c, p) => *c * p.value(z),
            Node::Dilate(sv, p) => p.value(z * *sv),
            Node::AbsSquare(p) => cr(p.value(z).norm_sqr()),
            Node::Even(p) => p.value(if z.re < T::zero() { -z } else { z }),
            Node::ComposeLog(p) => {
                if z == czero() {
                    p.value(cr(T::neg_infinity()))
                } else {
                    p.value(z.ln())
                }
            }
            Node::Derivative(k, p) => p.jet(Jet::variable(z)).derivative(*k),
            Node::Custom(f) => f(z),
        }
    }

    /// Taylor jet of `f ∘ u`.
    pub fn jet(&self, u: Jet<T>) -> Jet<T> {
        let one = Jet::constant(cone::<T>());
        match self.node.as_ref() {
            Node::Constant(c) => Jet::constant(*c),
            Node::Power(th) => pow_jet(u, cr(*th)),
            Node::Rho => u * ((one + u) * (one + u)).recip(),
            Node::Exp(r) => u.scale(-*r).exp(),
            Node::PsiExp { a, b } => pow_jet(u, cr(*a)) * (-pow_jet(u, cr(*b))).exp(),
            Node::PsiRes { a, b, pole } => pow_jet(u, cr(*a)) * pow_jet(Jet::constant(*pole) - u, cr(-*b)),
            Node::ImagPower(sv) => pow_jet(u, C::new(T::zero(), *sv)),
            Node::RationalPower { a, b } => pow_jet(u, cr(*a)) * pow_jet(one + u, cr(-*b)),
            Node::Window { partition, n } => partition.window_jet(*n, u),
            Node::Tilde { partition, n } => partition.tilde_jet(*n, u),
            Node::Product(ps) => ps.iter().fold(one, |acc, p| acc * p.jet(u)),
            Node::Sum(ps) => ps.iter().fold(Jet::constant(czero()), |acc, p| acc + p.jet(u)),
            Node::Scaled(c, p) => p.jet(u).scale(*c),
            Node::Dilate(sv, p) => p.jet(u.scale(cr(*sv))),
            Node::AbsSquare(p) => {
                let j = p.jet(u);
                j * j.conj()
            }
            Node::Even(p) => p.jet(if u.value().re < T::zero() { -u } else { u }),
            Node::ComposeLog(p) => p.jet(u.ln()),
            Node::Derivative(k, p) => {
                let t0 = u.value();
                let base = p.jet(Jet::variable(t0));
                let mut c = [cr(T::nan()); JET_ORDER + 1];
                let mut ratio = T::one();
                for j in 0..=JET_ORDER - k {
                    // (j+k)!/j!
                    if j == 0 {
                        ratio = (1..=*k).fold(T::one(), |a, i| a * T::from_usize_lossy(i));
                    } else {
                        ratio = ratio * T::from_usize_lossy(j + k) / T::from_usize_lossy(j);
                    }
                    c[j] = base.coeff(j + k) * ratio;
                }
                Jet::from_coeffs(c).compose(&u)
            }
            Node::Custom(f) => difference_jet(f, u.value()).compose(&u),
        }
    }

    /// `f(t)` at a real point.
    pub fn eval(&self, t: T) -> C<T> {
        self.value(cr(t))
    }

    /// `f(z)` off the real axis; requires a holomorphic symbol.
    pub fn eval_complex(&self, z: C<T>) -> Result<C<T>> {
        if z.im != T::zero() && !self.holomorphic {
            return Err(Error::SymbolDomain(format!("{} is not holomorphic", self.name)));
        }
        Ok(self.value(z))
    }

    /// Taylor jet of `f` at `t`.
    pub fn jet_at(&self, t: C<T>) -> Jet<T> {
        self.jet(Jet::variable(t))
    }

    /// `f^{(k)}(t)` for `k ≤ 8`.
    pub fn derivative(&self, k: usize, t: T) -> C<T> {
        if k == 0 {
            return self.eval(t);
        }
        self.jet_at(cr(t)).derivative(k)
    }
}


#[cfg(test)]
fn besov_binomial(n: usize, k: usize) -> f64 {
    binomial(n, k)
}
