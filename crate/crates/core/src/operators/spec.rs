use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::linalg::MeasureSpace;
use crate::scalar::{Real, C};

use super::{
    build_bisectorial, build_dirichlet_laplacian_1d, build_graph_laplacian, build_hermite_operator,
    build_nonnormal_sectorial, build_schrodinger_1d, ModelOperator,
};

fn default_h() -> f64 {
    1.0
}

fn default_seed() -> u64 {
    0
}

/// Uniform grid for the Hermite operator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
}

impl GridSpec {
    /// Grid that resolves the first `modes` Hermite functions: half-width
    /// `√(2K+1) + 8`, spacing `0.35/√(2K+1)`.
    pub fn for_hermite(modes: usize) -> Self {
        let r = ((2 * modes + 1) as f64).sqrt();
        let half = r + 8.0;
        let dx = 0.35 / r;
        Self {
            lo: -half,
            hi: half,
            points: (2.0 * half / dx).ceil() as usize + 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PotentialSpec {
    Values(Vec<f64>),
    /// `V(x) = scale · x²` on the grid centred at zero.
    Quadratic { quadratic: f64 },
}

/// JSON description of a model operator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum OperatorSpec {
    Dirichlet1d {
        n: usize,
        #[serde(default = "default_h")]
        h: f64,
    },
    Graph {
        sigma: Vec<Vec<f64>>,
    },
    Hermite {
        d: u32,
        modes: usize,
        #[serde(default)]
        grid: Option<GridSpec>,
    },
    Schrodinger {
        n: usize,
        #[serde(default = "default_h")]
        h: f64,
        potential: PotentialSpec,
    },
    Nonnormal {
        eigenvalues: Vec<[f64; 2]>,
        conditioning: f64,
        #[serde(default = "default_seed")]
        seed: u64,
    },
    Bisectorial {
        eigenvalues: Vec<[f64; 2]>,
        conditioning: f64,
        #[serde(default = "default_seed")]
        seed: u64,
    },
}

impl OperatorSpec {
    /// Fills in defaults so the spec echoes exactly what was built.
    pub fn resolved(&self) -> Self {
        match self {
            OperatorSpec::Hermite { d, modes, grid: None } => OperatorSpec::Hermite {
                d: *d,
                modes: *modes,
                grid: Some(GridSpec::for_hermite(*modes)),
            },
            other => other.clone(),
        }
    }

    pub fn build<T: Real>(&self) -> Result<ModelOperator<T>> {
        let lit = T::lit;
        let complex = |v: &[[f64; 2]]| -> Vec<C<T>> { v.iter().map(|[a, b]| C::new(lit(*a), lit(*b))).collect() };
        match self.resolved() {
            OperatorSpec::Dirichlet1d { n, h } => build_dirichlet_laplacian_1d(n, lit(h)),
            OperatorSpec::Graph { sigma } => {
                let s: Vec<Vec<T>> = sigma.iter().map(|r| r.iter().map(|v| lit(*v)).collect()).collect();
                build_graph_laplacian(&s).map(|(op, _)| op)
            }
            OperatorSpec::Hermite { d, modes, grid } => {
                let g = grid.expect("resolved");
                let (nodes, measure) = MeasureSpace::uniform_grid(lit(g.lo), lit(g.hi), g.points)?;
                build_hermite_operator(d, modes, &nodes, measure)
            }
            OperatorSpec::Schrodinger { n, h, potential } => {
                let v: Vec<T> = match potential {
                    PotentialSpec::Values(v) => v.iter().map(|x| lit(*x)).collect(),
                    PotentialSpec::Quadratic { quadratic } => {
                        let centre = (n as f64 + 1.0) * h / 2.0;
                        (1..=n)
                            .map(|i| {
                                let x = i as f64 * h - centre;
                                lit(quadratic * x * x)
                            })
                            .collect()
                    }
                };
                build_schrodinger_1d(n, lit(h), &v)
            }
            OperatorSpec::Nonnormal {
                eigenvalues,
                conditioning,
                seed,
            } => build_nonnormal_sectorial(&complex(&eigenvalues), lit(conditioning), seed),
            OperatorSpec::Bisectorial {
                eigenvalues,
                conditioning,
                seed,
            } => build_bisectorial(&complex(&eigenvalues), lit(conditioning), seed),
        }
    }
}
