//! Measure-weighted vectors, dense complex matrices, the weighted Hermitian
//! eigensolver and complex LU.

mod eig;
mod lu;
mod mat;
mod measure;

pub use eig::{weighted_symmetric_eig, SymmetricEigen};
pub use lu::{solve_complex, Lu};
pub use mat::Mat;
pub use measure::{lp_norm, MeasureSpace};

use crate::scalar::{Real, C};

/// Complex vector indexed by the points of a [`MeasureSpace`].
pub type CVector<T> = Vec<C<T>>;

pub(crate) fn check_len<T>(x: &[T], n: usize) -> crate::Result<()> {
    if x.len() != n {
        return Err(crate::Error::DimensionMismatch {
            expected: n,
            got: x.len(),
        });
    }
    Ok(())
}

/// `x + y` entrywise.
pub fn axpy<T: Real>(alpha: C<T>, x: &[C<T>], y: &mut [C<T>]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * *xi;
    }
}

/// Euclidean (unweighted) norm.
pub fn norm2<T: Real>(x: &[C<T>]) -> T {
    x.iter().map(|v| v.norm_sqr()).sum::<T>().sqrt()
}

pub fn sub<T: Real>(x: &[C<T>], y: &[C<T>]) -> CVector<T> {
    x.iter().zip(y).map(|(a, b)| *a - *b).collect()
}

pub fn scale<T: Real>(alpha: C<T>, x: &[C<T>]) -> CVector<T> {
    x.iter().map(|v| alpha * *v).collect()
}
