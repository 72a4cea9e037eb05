use std::ops::{Index, IndexMut};

use crate::error::{Error, Result};
use crate::scalar::{cone, cr, czero, Real, C};

use super::{check_len, CVector, MeasureSpace};

/// Dense complex square matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Mat<T> {
    n: usize,
    data: Vec<C<T>>,
}

impl<T: Real> Mat<T> {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![czero(); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = cone();
        }
        m
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> C<T>) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Self { n, data }
    }

    /// Builds a matrix from real rows; every row must have length `rows.len()`.
    pub fn from_real_rows(rows: &[Vec<T>]) -> Result<Self> {
        let n = rows.len();
        for r in rows {
            check_len(r, n)?;
        }
        Ok(Self::from_fn(n, |i, j| cr(rows[i][j])))
    }

    pub fn from_diag(d: &[C<T>]) -> Self {
        let mut m = Self::zeros(d.len());
        for (i, v) in d.iter().enumerate() {
            m[(i, i)] = *v;
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn row(&self, i: usize) -> &[C<T>] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn col(&self, j: usize) -> CVector<T> {
        (0..self.n).map(|i| self[(i, j)]).collect()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.re.is_finite() && v.im.is_finite())
    }

    pub fn mul_vec(&self, x: &[C<T>]) -> Result<CVector<T>> {
        check_len(x, self.n)?;
        Ok((0..self.n)
            .map(|i| {
                let mut acc = czero();
                for (a, b) in self.row(i).iter().zip(x) {
                    acc += *a * *b;
                }
                acc
            })
            .collect())
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if other.n != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: other.n,
            });
        }
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == czero() {
                    continue;
                }
                let orow = other.row(k);
                let dst = &mut out.data[i * n..(i + 1) * n];
                for (d, b) in dst.iter_mut().zip(orow) {
                    *d += a * *b;
                }
            }
        }
        Ok(out)
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.n, |i, j| self[(j, i)].conj())
    }

    /// Adjoint with respect to `⟨x,y⟩ = Σ w_i x_i ȳ_i`: `W⁻¹ A* W`.
    pub fn weighted_adjoint(&self, m: &MeasureSpace<T>) -> Self {
        let w = m.weights();
        Self::from_fn(self.n, |i, j| self[(j, i)].conj() * w[j] / w[i])
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().zip(&other.data).map(|(a, b)| *a - *b).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().zip(&other.data).map(|(a, b)| *a + *b).collect(),
        }
    }

    pub fn scale(&self, alpha: C<T>) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().map(|a| *a * alpha).collect(),
        }
    }

    pub fn frobenius(&self) -> T {
        self.data.iter().map(|v| v.norm_sqr()).sum::<T>().sqrt()
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |acc, v| acc.max(v.norm()))
    }

    /// Operator norm on weighted L², estimated by power iteration on `A^♯A`.
    pub fn weighted_op_norm(&self, m: &MeasureSpace<T>, iterations: usize) -> T {
        let n = self.n;
        if n == 0 {
            return T::zero();
        }
        let adj = self.weighted_adjoint(m);
        // Deterministic, generic start vector.
        let mut v: CVector<T> = (0..n)
            .map(|i| cr(T::one() + T::lit(0.37) * T::from_usize_lossy(i % 7)))
            .collect();
        let mut estimate = T::zero();
        for _ in 0..iterations.max(1) {
            let nv = m.norm(&v);
            if nv == T::zero() {
                return T::zero();
            }
            v.iter_mut().for_each(|x| *x /= nv);
            let av = self.mul_vec(&v).expect("square");
            estimate = m.norm(&av);
            v = adj.mul_vec(&av).expect("square");
        }
        estimate
    }
}

impl<T> Index<(usize, usize)> for Mat<T> {
    type Output = C<T>;
    fn index(&self, (i, j): (usize, usize)) -> &C<T> {
        &self.data[i * self.n + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Mat<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C<T> {
        &mut self.data[i * self.n + j]
    }
}
