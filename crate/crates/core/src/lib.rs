//! Spectral multipliers, Paley-Littlewood decompositions and the norms they
//! induce, on finite-dimensional model operators.
//!
//! Everything is generic over the scalar `T: Real` (`f32` or `f64`). The
//! aliases below fix `T = f64`.

// `!(x > 0)` is used on purpose so that NaN is rejected with the bad values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod calculus;
pub mod error;
pub mod experiments;
pub mod jet;
pub mod linalg;
pub mod norms;
pub mod operators;
pub mod partitions;
pub mod random;
pub mod scalar;
pub mod symbols;
pub mod tol;

pub use error::{Error, Result};
pub use scalar::Real;

pub type Complex64 = scalar::C<f64>;
pub type MeasureSpace = linalg::MeasureSpace<f64>;
pub type Mat = linalg::Mat<f64>;
pub type ModelOperator = operators::ModelOperator<f64>;
pub type KernelProjection = operators::KernelProjection<f64>;
pub type Symbol = symbols::Symbol<f64>;
pub type DecayCertificate = symbols::DecayCertificate<f64>;
pub type Block = norms::Block<f64>;
