use crate::error::{Error, Result};
use crate::scalar::{czero, Real, C};
use crate::tol;

use super::{check_len, CVector, Mat};

/// Partial-pivot LU factorization `PA = LU` of a complex matrix.
#[derive(Debug, Clone)]
pub struct Lu<T> {
    lu: Mat<T>,
    perm: Vec<usize>,
}

impl<T: Real> Lu<T> {
    pub fn factor(a: &Mat<T>) -> Result<Self> {
        let n = a.dim();
        let scale = a.max_abs();
        let threshold = T::lit(tol::PIVOT) * scale;
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let (p, pivot) = (k..n)
                .map(|i| (i, lu[(i, k)].norm()))
                .fold((k, T::neg_infinity()), |best, cur| if cur.1 > best.1 { cur } else { best });
            if !(pivot > threshold) || scale == T::zero() {
                return Err(Error::Singular {
                    pivot: pivot.to_f64_lossy(),
                    column: k,
                });
            }
            if p != k {
                for j in 0..n {
                    let tmp = lu[(k, j)];
                    lu[(k, j)] = lu[(p, j)];
                    lu[(p, j)] = tmp;
                }
                perm.swap(k, p);
            }
            let d = lu[(k, k)];
            for i in k + 1..n {
                let f = lu[(i, k)] / d;
                lu[(i, k)] = f;
                if f == czero() {
                    continue;
                }
                for j in k + 1..n {
                    let u = lu[(k, j)];
                    lu[(i, j)] -= f * u;
                }
            }
        }
        Ok(Self { lu, perm })
    }

    pub fn solve(&self, b: &[C<T>]) -> Result<CVector<T>> {
        let n = self.lu.dim();
        check_len(b, n)?;
        let mut y: CVector<T> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let mut acc = y[i];
            for j in 0..i {
                acc -= self.lu[(i, j)] * y[j];
            }
            y[i] = acc;
        }
        for i in (0..n).rev() {
            let mut acc = y[i];
            for j in i + 1..n {
                acc -= self.lu[(i, j)] * y[j];
            }
            y[i] = acc / self.lu[(i, i)];
        }
        Ok(y)
    }
}

/// Solves `a x = b` by partial-pivot LU.
pub fn solve_complex<T: Real>(a: &Mat<T>, b: &[C<T>]) -> Result<CVector<T>> {
    check_len(b, a.dim())?;
    Lu::factor(a)?.solve(b)
}
