//! JSON configuration of equivalence experiments and the norms they compare.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::calculus::{fractional_power_apply, log_operator};
use crate::error::{invalid, Result};
use crate::linalg::lp_norm;
use crate::norms::{
    besov_continuous_norm, besov_discrete_norm, continuous_square_norm, pl_inhomogeneous_norm, pl_random_norm,
    pl_square_norm, pl_sup_norm, real_interpolation_norm, PlVariant, QuadratureSpec, RandomEnsemble,
};
use crate::operators::{ModelOperator, OperatorSpec, Spectral};
use crate::partitions::{
    build_bump, build_equidistant, build_homogeneous_dyadic, even_extension, to_inhomogeneous, PartitionOfUnity,
};
use crate::scalar::{Real, C};
use crate::symbols::{make_symbol, Symbol, SymbolSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PartitionSpec {
    #[default]
    Homogeneous,
    Inhomogeneous,
    Equidistant,
    Even,
    EvenInhomogeneous,
}

impl PartitionSpec {
    pub fn build(&self) -> PartitionOfUnity {
        let hom = build_homogeneous_dyadic(build_bump());
        match self {
            Self::Homogeneous => hom,
            Self::Inhomogeneous => to_inhomogeneous(hom),
            Self::Equidistant => build_equidistant(build_bump()),
            Self::Even => even_extension(hom),
            Self::EvenInhomogeneous => even_extension(to_inhomogeneous(hom)),
        }
    }
}

/// A shipped symbol, or a single partition window `{"window": n}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FunctionSpec {
    Window {
        window: i32,
        #[serde(default)]
        partition: PartitionSpec,
    },
    Symbol(SymbolSpec),
}

impl FunctionSpec {
    pub fn build<T: Real>(&self) -> Result<Symbol<T>> {
        match self {
            Self::Window { window, partition } => Ok(Symbol::window(partition.build(), *window)),
            Self::Symbol(s) => make_symbol(s),
        }
    }
}

/// Exponents in `[1, ∞]`; infinity is written `"inf"`.
pub mod exponent {
    use super::*;

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Raw {
        Num(f64),
        Text(String),
    }

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
        if v.is_infinite() {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(*v)
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
        match Raw::deserialize(d)? {
            Raw::Num(v) => Ok(v),
            Raw::Text(t) if matches!(t.as_str(), "inf" | "infinity" | "Infinity") => Ok(f64::INFINITY),
            Raw::Text(t) => Err(serde::de::Error::custom(format!("expected a number or \"inf\", got {t:?}"))),
        }
    }
}

fn zero() -> f64 {
    0.0
}

fn one() -> f64 {
    1.0
}

fn two() -> f64 {
    2.0
}

/// One of the norms an experiment compares. Missing `p` and ensembles are
/// filled from the experiment (see [`NormSpec::resolved`]).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum NormSpec {
    /// `‖x‖_p`.
    Ambient {
        #[serde(default)]
        p: Option<f64>,
    },
    /// `‖A^θ x‖_p` on the injective part.
    FractionalPower {
        theta: f64,
        #[serde(default)]
        p: Option<f64>,
    },
    PlSquare {
        #[serde(default)]
        partition: PartitionSpec,
        #[serde(default = "zero")]
        theta: f64,
        #[serde(default)]
        p: Option<f64>,
        /// Add `‖Px‖_p` for the kernel component.
        #[serde(default)]
        kernel_term: bool,
    },
    PlRandom {
        #[serde(default)]
        partition: PartitionSpec,
        #[serde(default = "zero")]
        theta: f64,
        #[serde(default)]
        p: Option<f64>,
        #[serde(default)]
        ensemble: Option<RandomEnsemble>,
        #[serde(default)]
        kernel_term: bool,
    },
    PlSup {
        #[serde(default)]
        partition: PartitionSpec,
        #[serde(default = "zero")]
        theta: f64,
        #[serde(default)]
        p: Option<f64>,
        #[serde(default)]
        ensemble: Option<RandomEnsemble>,
    },
    PlInhomogeneous {
        #[serde(default = "zero")]
        theta: f64,
        #[serde(default)]
        p: Option<f64>,
        /// Random variant when present, square variant otherwise.
        #[serde(default)]
        ensemble: Option<RandomEnsemble>,
    },
    ContinuousSquare {
        psi: FunctionSpec,
        #[serde(default = "zero")]
        theta: f64,
        #[serde(default)]
        p: Option<f64>,
        #[serde(default)]
        quadrature: QuadratureSpec,
    },
    BesovDiscrete {
        #[serde(default)]
        partition: PartitionSpec,
        theta: f64,
        #[serde(with = "exponent")]
        q: f64,
        #[serde(default)]
        p: Option<f64>,
    },
    BesovContinuous {
        f: FunctionSpec,
        theta: f64,
        #[serde(with = "exponent")]
        q: f64,
        #[serde(default)]
        p: Option<f64>,
        #[serde(default)]
        quadrature: QuadratureSpec,
    },
    /// Real interpolation between `Ẋ_{θ₀}` and `Ẋ_{θ₁}` (`p = 2` only).
    RealInterpolation {
        vartheta: f64,
        #[serde(with = "exponent", default = "two")]
        q: f64,
        #[serde(default = "zero")]
        theta0: f64,
        #[serde(default = "one")]
        theta1: f64,
        #[serde(default)]
        quadrature: QuadratureSpec,
    },
    /// Equidistant square norm of `B = log A`.
    StripPlSquare {
        #[serde(default = "zero")]
        theta: f64,
        #[serde(default)]
        p: Option<f64>,
    },
}

fn fill(p: &mut Option<f64>, pnorm: f64) {
    p.get_or_insert(pnorm);
}

fn fill_ensemble(e: &mut Option<RandomEnsemble>, seed: u64) {
    e.get_or_insert(RandomEnsemble::rademacher(seed, 256));
}

impl NormSpec {
    /// Fills every default from the experiment's exponent and seed.
    pub fn resolved(&self, pnorm: f64, seed: u64) -> Self {
        let mut s = self.clone();
        match &mut s {
            Self::Ambient { p }
            | Self::FractionalPower { p, .. }
            | Self::PlSquare { p, .. }
            | Self::ContinuousSquare { p, .. }
            | Self::BesovDiscrete { p, .. }
            | Self::BesovContinuous { p, .. }
            | Self::StripPlSquare { p, .. } => fill(p, pnorm),
            Self::PlRandom { p, ensemble, .. } | Self::PlSup { p, ensemble, .. } => {
                fill(p, pnorm);
                fill_ensemble(ensemble, seed);
            }
            Self::PlInhomogeneous { p, .. } => fill(p, pnorm),
            Self::RealInterpolation { .. } => {}
        }
        s
    }

    /// Evaluates the norm of `x`. Unresolved `p` means 2.
    pub fn evaluate<T: Real>(&self, op: &ModelOperator<T>, x: &[C<T>]) -> Result<T> {
        let lit = T::lit;
        let pn = |p: &Option<f64>| lit(p.unwrap_or(2.0));
        let kernel_part = |p: T| -> Result<T> { lp_norm(&op.kernel().apply(x)?, p, op.measure()) };
        let default_ens = RandomEnsemble::rademacher(0, 256);
        match self {
            Self::Ambient { p } => lp_norm(x, pn(p), op.measure()),
            Self::FractionalPower { theta, p } => {
                lp_norm(&fractional_power_apply(op, lit(*theta), x)?, pn(p), op.measure())
            }
            Self::PlSquare {
                partition,
                theta,
                p,
                kernel_term,
            } => {
                let v = pl_square_norm(op, &partition.build(), x, pn(p), lit(*theta))?;
                Ok(if *kernel_term { v + kernel_part(pn(p))? } else { v })
            }
            Self::PlRandom {
                partition,
                theta,
                p,
                ensemble,
                kernel_term,
            } => {
                let ens = ensemble.as_ref().unwrap_or(&default_ens);
                let v = pl_random_norm(op, &partition.build(), x, pn(p), ens, lit(*theta))?.mean;
                Ok(if *kernel_term { v + kernel_part(pn(p))? } else { v })
            }
            Self::PlSup {
                partition,
                theta,
                p,
                ensemble,
            } => {
                let ens = ensemble.as_ref().unwrap_or(&default_ens);
                pl_sup_norm(op, &partition.build(), x, pn(p), ens, lit(*theta))
            }
            Self::PlInhomogeneous { theta, p, ensemble } => {
                let variant = match ensemble {
                    Some(e) => PlVariant::Random(e.clone()),
                    None => PlVariant::Square,
                };
                pl_inhomogeneous_norm(op, &PartitionSpec::Inhomogeneous.build(), x, pn(p), lit(*theta), &variant)
            }
            Self::ContinuousSquare {
                psi,
                theta,
                p,
                quadrature,
            } => continuous_square_norm(op, &psi.build()?, lit(*theta), x, pn(p), quadrature),
            Self::BesovDiscrete { partition, theta, q, p } => {
                besov_discrete_norm(op, &partition.build(), x, lit(*theta), lit(*q), pn(p))
            }
            Self::BesovContinuous {
                f,
                theta,
                q,
                p,
                quadrature,
            } => besov_continuous_norm(op, x, lit(*theta), lit(*q), &f.build()?, pn(p), quadrature),
            Self::RealInterpolation {
                vartheta,
                q,
                theta0,
                theta1,
                quadrature,
            } => real_interpolation_norm(op, x, lit(*vartheta), lit(*q), lit(*theta0), lit(*theta1), quadrature),
            Self::StripPlSquare { theta, p } => {
                let b = log_operator(op)?;
                pl_square_norm(&b, &PartitionSpec::Equidistant.build(), x, pn(p), lit(*theta))
            }
        }
    }
}

fn default_name() -> String {
    "equivalence".into()
}

fn default_true() -> bool {
    true
}

/// `{"operator": …, "norm_a": …, "norm_b": …, "samples": n, "seed": s,
/// "assert_bracket": [lo, hi] | null}` plus optional `name`, `pnorm` and
/// `corner_cases`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "default_name")]
    pub name: String,
    pub operator: OperatorSpec,
    pub norm_a: NormSpec,
    pub norm_b: NormSpec,
    pub samples: usize,
    pub seed: u64,
    /// Exponent used to normalize samples and for norms without their own.
    #[serde(default = "two")]
    pub pnorm: f64,
    #[serde(default)]
    pub assert_bracket: Option<[f64; 2]>,
    /// Append eigenvectors at the spectral edges and nearest a dyadic
    /// crossover.
    #[serde(default = "default_true")]
    pub corner_cases: bool,
}

impl ExperimentConfig {
    /// The same configuration with every default written out.
    pub fn resolved(&self) -> Self {
        Self {
            operator: self.operator.resolved(),
            norm_a: self.norm_a.resolved(self.pnorm, self.seed),
            norm_b: self.norm_b.resolved(self.pnorm, self.seed),
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.samples == 0 && !self.corner_cases {
            return invalid("experiment has no samples");
        }
        if !(self.pnorm >= 1.0) {
            return invalid(format!("Lp exponent {} < 1", self.pnorm));
        }
        if let Some([lo, hi]) = self.assert_bracket {
            if !(lo <= hi) {
                return invalid(format!("bracket [{lo}, {hi}] is empty"));
            }
        }
        Ok(())
    }
}
