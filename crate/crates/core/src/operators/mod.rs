//! Finite-dimensional model operators: discrete Laplacians, graph Laplacians,
//! the Hermite operator, Schrödinger operators and synthetic non-normal
//! sectorial or bisectorial operators.

mod build;
mod spec;

pub use build::{
    build_bisectorial, build_dirichlet_laplacian_1d, build_graph_laplacian, build_hermite_operator,
    build_nonnormal_sectorial, build_schrodinger_1d,
};
pub use spec::{GridSpec, OperatorSpec, PotentialSpec};

use crate::error::{Error, Result};
use crate::linalg::{self, solve_complex, CVector, Mat, MeasureSpace};
use crate::scalar::{cr, czero, Real, C};
use crate::tol;

/// Concrete representation of an operator.
#[derive(Debug, Clone)]
pub enum OperatorForm<T> {
    /// `A = Σ_k λ_k e_k ⟨·, e_k⟩_μ` with `μ`-orthonormal `e_k`. The state
    /// space is the span of the listed eigenvectors.
    SpectralSelfAdjoint {
        eigenvalues: Vec<T>,
        eigenvectors: Vec<CVector<T>>,
    },
    /// `A = S diag(λ) S⁻¹`.
    SimilarityDiagonal {
        s: Mat<T>,
        s_inv: Mat<T>,
        eigenvalues: Vec<C<T>>,
    },
    MatrixOnly(Mat<T>),
}

/// Projection onto `N(A)` along `R(A)`.
#[derive(Debug, Clone)]
pub struct KernelProjection<T> {
    matrix: Mat<T>,
    rank: usize,
}

impl<T: Real> KernelProjection<T> {
    pub fn zero(n: usize) -> Self {
        Self {
            matrix: Mat::zeros(n),
            rank: 0,
        }
    }

    /// `P = Σ_k e_k ⟨·, e_k⟩_μ` over the given orthonormal kernel basis.
    pub fn from_basis(basis: &[CVector<T>], m: &MeasureSpace<T>) -> Self {
        let n = m.len();
        let w = m.weights();
        let mut matrix = Mat::zeros(n);
        for e in basis {
            for i in 0..n {
                for j in 0..n {
                    matrix[(i, j)] += e[i] * e[j].conj() * w[j];
                }
            }
        }
        Self {
            matrix,
            rank: basis.len(),
        }
    }

    pub fn matrix(&self) -> &Mat<T> {
        &self.matrix
    }

    /// Dimension of `N(A)`.
    pub fn rank(&self) -> usize {
        self.rank
    }

    /// `P x`.
    pub fn apply(&self, x: &[C<T>]) -> Result<CVector<T>> {
        self.matrix.mul_vec(x)
    }

    /// `(I − P) x`.
    pub fn complement(&self, x: &[C<T>]) -> Result<CVector<T>> {
        Ok(linalg::sub(x, &self.apply(x)?))
    }
}

pub fn kernel_projection_apply<T: Real>(kp: &KernelProjection<T>, x: &[C<T>]) -> Result<CVector<T>> {
    kp.apply(x)
}

/// Anything with a diagonalizing basis in which functions are applied.
pub trait Spectral<T: Real>: Sync {
    fn measure(&self) -> &MeasureSpace<T>;
    /// Points at which symbols are evaluated, one per mode.
    fn modes(&self) -> Result<Vec<C<T>>>;
    /// Coordinates of `x` in the eigenbasis.
    fn analyze(&self, x: &[C<T>]) -> Result<CVector<T>>;
    /// Inverse of [`Spectral::analyze`].
    fn synthesize(&self, coeffs: &[C<T>]) -> CVector<T>;
    /// Marks modes lying in `N(A)`.
    fn kernel_modes(&self) -> Vec<bool>;
}

/// A finite-dimensional sectorial (or bisectorial) operator.
#[derive(Debug, Clone)]
pub struct ModelOperator<T> {
    pub(crate) form: OperatorForm<T>,
    pub(crate) measure: MeasureSpace<T>,
    pub(crate) sector_angle: T,
    pub(crate) injective: bool,
    pub(crate) bisectorial: bool,
    pub(crate) spectral_bounds: (T, T),
    pub(crate) kernel: KernelProjection<T>,
    pub(crate) label: &'static str,
}

impl<T: Real> ModelOperator<T> {
    pub fn form(&self) -> &OperatorForm<T> {
        &self.form
    }

    pub fn dim(&self) -> usize {
        self.measure.len()
    }

    pub fn label(&self) -> &'static str {
        self.label
    }

    /// Half-opening `ω` of the closed sector containing the spectrum.
    pub fn sector_angle(&self) -> T {
        self.sector_angle
    }

    pub fn is_injective(&self) -> bool {
        self.injective
    }

    pub fn is_bisectorial(&self) -> bool {
        self.bisectorial
    }

    /// Smallest and largest modulus over the nonzero spectrum.
    pub fn spectral_bounds(&self) -> (T, T) {
        self.spectral_bounds
    }

    pub fn kernel(&self) -> &KernelProjection<T> {
        &self.kernel
    }

    /// Number of modes of the state space (the rank of the eigenbasis).
    pub fn rank(&self) -> usize {
        match &self.form {
            OperatorForm::SpectralSelfAdjoint { eigenvectors, .. } => eigenvectors.len(),
            _ => self.dim(),
        }
    }

    pub fn eigenvalues(&self) -> Option<Vec<C<T>>> {
        match &self.form {
            OperatorForm::SpectralSelfAdjoint { eigenvalues, .. } => {
                Some(eigenvalues.iter().map(|v| cr(*v)).collect())
            }
            OperatorForm::SimilarityDiagonal { eigenvalues, .. } => Some(eigenvalues.clone()),
            OperatorForm::MatrixOnly(_) => None,
        }
    }

    /// Dense matrix of `A`.
    pub fn matrix(&self) -> Mat<T> {
        match &self.form {
            OperatorForm::SpectralSelfAdjoint {
                eigenvalues,
                eigenvectors,
            } => {
                let n = self.dim();
                let w = self.measure.weights();
                let mut a = Mat::zeros(n);
                for (lam, e) in eigenvalues.iter().zip(eigenvectors) {
                    if *lam == T::zero() {
                        continue;
                    }
                    for i in 0..n {
                        let li = e[i] * *lam;
                        for j in 0..n {
                            a[(i, j)] += li * e[j].conj() * w[j];
                        }
                    }
                }
                a
            }
            OperatorForm::SimilarityDiagonal {
                s,
                s_inv,
                eigenvalues,
            } => s
                .matmul(&Mat::from_diag(eigenvalues))
                .and_then(|m| m.matmul(s_inv))
                .expect("square factors"),
            OperatorForm::MatrixOnly(m) => m.clone(),
        }
    }

    /// The same operator stripped down to its dense matrix.
    pub fn as_matrix_only(&self) -> Self {
        Self {
            form: OperatorForm::MatrixOnly(self.matrix()),
            ..self.clone()
        }
    }

    /// `A x`.
    pub fn apply(&self, x: &[C<T>]) -> Result<CVector<T>> {
        linalg::check_len(x, self.dim())?;
        match &self.form {
            OperatorForm::MatrixOnly(m) => m.mul_vec(x),
            _ => {
                let modes = self.modes()?;
                let c = self.analyze(x)?;
                let scaled: Vec<_> = c.iter().zip(&modes).map(|(a, l)| *a * *l).collect();
                Ok(self.synthesize(&scaled))
            }
        }
    }

    /// Orthogonal projection onto the state space (identity at full rank).
    pub fn project_to_domain(&self, x: &[C<T>]) -> Result<CVector<T>> {
        match &self.form {
            OperatorForm::SpectralSelfAdjoint { eigenvectors, .. } if eigenvectors.len() < self.dim() => {
                let c = self.analyze(x)?;
                Ok(self.synthesize(&c))
            }
            _ => {
                linalg::check_len(x, self.dim())?;
                Ok(x.to_vec())
            }
        }
    }

    fn spectral_scale(&self) -> T {
        self.spectral_bounds.1.max(T::min_positive_value())
    }

    /// `(λ − A)⁻¹ x`.
    pub fn resolvent_apply(&self, lambda: C<T>, x: &[C<T>]) -> Result<CVector<T>> {
        linalg::check_len(x, self.dim())?;
        if let Some(eigs) = self.eigenvalues() {
            let gap = eigs.iter().map(|l| (lambda - *l).norm()).fold(T::infinity(), T::min);
            if gap <= T::lit(tol::RESOLVENT_GAP) * self.spectral_scale() {
                return Err(Error::OnSpectrum(format!("{lambda}")));
            }
        }
        match &self.form {
            OperatorForm::MatrixOnly(m) => {
                let shifted = Mat::identity(self.dim()).scale(lambda).sub(m);
                solve_complex(&shifted, x).map_err(|e| match e {
                    Error::Singular { .. } => Error::OnSpectrum(format!("{lambda}")),
                    other => other,
                })
            }
            _ => {
                let modes = self.modes()?;
                let c = self.analyze(x)?;
                let scaled: Vec<_> = c.iter().zip(&modes).map(|(a, l)| *a / (lambda - *l)).collect();
                Ok(self.synthesize(&scaled))
            }
        }
    }

    /// `max_k |λ| / |λ − λ_k|`: the exact `‖λR(λ,A)‖` for normal operators.
    pub fn normal_resolvent_bound(&self, lambda: C<T>) -> Result<T> {
        let eigs = self.eigenvalues().ok_or(Error::NoSpectralForm)?;
        Ok(eigs
            .iter()
            .map(|l| lambda.norm() / (lambda - *l).norm())
            .fold(T::zero(), T::max))
    }
}

impl<T: Real> Spectral<T> for ModelOperator<T> {
    fn measure(&self) -> &MeasureSpace<T> {
        &self.measure
    }

    fn modes(&self) -> Result<Vec<C<T>>> {
        self.eigenvalues().ok_or(Error::NoSpectralForm)
    }

    fn analyze(&self, x: &[C<T>]) -> Result<CVector<T>> {
        linalg::check_len(x, self.dim())?;
        match &self.form {
            OperatorForm::SpectralSelfAdjoint { eigenvectors, .. } => {
                Ok(eigenvectors.iter().map(|e| self.measure.inner(x, e)).collect())
            }
            OperatorForm::SimilarityDiagonal { s_inv, .. } => s_inv.mul_vec(x),
            OperatorForm::MatrixOnly(_) => Err(Error::NoSpectralForm),
        }
    }

    fn synthesize(&self, coeffs: &[C<T>]) -> CVector<T> {
        let n = self.dim();
        match &self.form {
            OperatorForm::SpectralSelfAdjoint { eigenvectors, .. } => {
                let mut y = vec![czero(); n];
                for (c, e) in coeffs.iter().zip(eigenvectors) {
                    if *c != czero() {
                        linalg::axpy(*c, e, &mut y);
                    }
                }
                y
            }
            OperatorForm::SimilarityDiagonal { s, .. } => s.mul_vec(coeffs).expect("coefficient length"),
            OperatorForm::MatrixOnly(_) => panic!("synthesize on a matrix-only operator"),
        }
    }

    fn kernel_modes(&self) -> Vec<bool> {
        match self.eigenvalues() {
            Some(e) => e.iter().map(|l| *l == czero()).collect(),
            None => Vec::new(),
        }
    }
}
