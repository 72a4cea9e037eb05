//! Named tolerances shared by constructors, validators and tests.

/// Relative defect allowed when checking weighted self-adjointness.
pub const SELF_ADJOINT: f64 = 1e-10;
/// Weighted orthonormality of computed eigenvectors.
pub const ORTHONORMAL: f64 = 1e-10;
/// Eigen reconstruction residual, relative to the operator norm.
pub const RECONSTRUCTION: f64 = 1e-9;
/// Pivot threshold of the complex LU, relative to the matrix scale.
pub const PIVOT: f64 = 1e-14;
/// Relative residual of `solve_complex` on well-conditioned systems.
pub const SOLVE_RESIDUAL: f64 = 1e-10;
/// Eigenvalues below this fraction of the largest one count as zero.
pub const ZERO_EIGENVALUE: f64 = 1e-10;
/// Spectral distance below which a resolvent point is rejected.
pub const RESOLVENT_GAP: f64 = 1e-12;
/// `‖S S⁻¹ − I‖` for similarity-form operators.
pub const SIMILARITY: f64 = 1e-10;
/// Orthonormality defect of discretized Hermite functions before
/// re-orthonormalization.
pub const HERMITE_GRAM: f64 = 1e-6;
/// Sum-to-one defect of partitions of unity.
pub const PARTITION_SUM: f64 = 1e-10;
/// Relative change allowed between an estimate and its refinement.
pub const REFINEMENT_GATE: f64 = 0.05;
/// Default tail tolerance for contour and log-quadratures.
pub const QUADRATURE_TAIL: f64 = 1e-10;
/// Cyclic Jacobi sweep cap.
pub const JACOBI_MAX_SWEEPS: usize = 100;
