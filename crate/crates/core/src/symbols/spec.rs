use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::scalar::{cr, Real, C};

use super::Symbol;

fn one() -> f64 {
    1.0
}

/// JSON description of a shipped symbol kind.
///
/// `theta` on the ψ kinds is the smoothness index the symbol will be used
/// with; it only enters the parameter checks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SymbolSpec {
    Constant {
        value: f64,
    },
    Power {
        theta: f64,
    },
    Rho,
    /// `e^{−t·λ}`.
    Exp {
        #[serde(default = "one")]
        t: f64,
    },
    PsiExp {
        a: f64,
        b: f64,
        #[serde(default)]
        theta: f64,
    },
    PsiRes {
        a: f64,
        b: f64,
        pole: [f64; 2],
        #[serde(default)]
        theta: f64,
    },
    ImagPower {
        s: f64,
    },
    /// `t^a (1+t)^{−b}`.
    Rational {
        a: f64,
        b: f64,
    },
}

fn finite(name: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        invalid(format!("{name} must be finite, got {v}"))
    }
}

/// Builds a symbol, checking parameter ranges.
pub fn make_symbol<T: Real>(spec: &SymbolSpec) -> Result<Symbol<T>> {
    let lit = T::lit;
    match *spec {
        SymbolSpec::Constant { value } => {
            finite("value", value)?;
            Ok(Symbol::constant(cr(lit(value))))
        }
        SymbolSpec::Power { theta } => {
            finite("theta", theta)?;
            Ok(Symbol::power(lit(theta)))
        }
        SymbolSpec::Rho => Ok(Symbol::rho()),
        SymbolSpec::Exp { t } => {
            if !(t >= 0.0 && t.is_finite()) {
                return invalid(format!("semigroup time must be finite and ≥ 0, got {t}"));
            }
            Ok(Symbol::exp_decay(cr(lit(t))))
        }
        SymbolSpec::PsiExp { a, b, theta } => {
            finite("theta", theta)?;
            if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) {
                return invalid(format!("psi_exp needs a, b > 0, got a = {a}, b = {b}"));
            }
            if !(a / b > theta) {
                return invalid(format!("psi_exp needs a/b > θ, got a/b = {}, θ = {theta}", a / b));
            }
            Ok(Symbol::psi_exp(lit(a), lit(b)))
        }
        SymbolSpec::PsiRes { a, b, pole, theta } => {
            finite("theta", theta)?;
            let [re, im] = pole;
            finite("pole", re)?;
            finite("pole", im)?;
            if im == 0.0 && re >= 0.0 {
                return invalid(format!("psi_res pole {re} lies on [0, ∞)"));
            }
            if !(theta < a && a < b + theta) {
                return invalid(format!("psi_res needs θ < a < b + θ, got a = {a}, b = {b}, θ = {theta}"));
            }
            Ok(Symbol::psi_res(lit(a), lit(b), C::new(lit(re), lit(im))))
        }
        SymbolSpec::ImagPower { s } => {
            finite("s", s)?;
            Ok(Symbol::imag_power(lit(s)))
        }
        SymbolSpec::Rational { a, b } => {
            finite("a", a)?;
            finite("b", b)?;
            Ok(Symbol::rational_power(lit(a), lit(b)))
        }
    }
}
