use crate::error::{Error, Result};
use crate::scalar::{cr, czero, Real, C};
use crate::tol;

use super::{Mat, MeasureSpace};

/// Eigenpairs of a weighted self-adjoint matrix.
///
/// `vectors` holds the eigenvectors as columns, orthonormal in the weighted
/// inner product, so that `A = Q Λ Q* W`.
#[derive(Debug, Clone)]
pub struct SymmetricEigen<T> {
    pub values: Vec<T>,
    pub vectors: Mat<T>,
}

/// Eigendecomposition of `a`, self-adjoint with respect to the weights of `m`.
///
/// Runs cyclic Jacobi on `W^{1/2} A W^{-1/2}` and maps the eigenvectors back.
/// Eigenvalues are returned in ascending order.
pub fn weighted_symmetric_eig<T: Real>(a: &Mat<T>, m: &MeasureSpace<T>) -> Result<SymmetricEigen<T>> {
    let n = a.dim();
    if m.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: m.len(),
        });
    }
    if !a.is_finite() {
        return Err(Error::InvalidParameter("matrix has non-finite entries".into()));
    }
    let w = m.weights();

    // W A must be Hermitian.
    let mut defect = T::zero();
    let mut scale = T::zero();
    for i in 0..n {
        for j in 0..n {
            let wa = a[(i, j)] * w[i];
            scale = scale.max(wa.norm());
            defect = defect.max((wa - a[(j, i)].conj() * w[j]).norm());
        }
    }
    if scale > T::zero() && defect > T::tol(tol::SELF_ADJOINT) * scale {
        return Err(Error::NotSelfAdjoint {
            defect: (defect / scale).to_f64_lossy(),
        });
    }

    let sw: Vec<T> = w.iter().map(|x| x.sqrt()).collect();
    let half = T::lit(0.5);
    let mut h = Mat::from_fn(n, |i, j| {
        let b_ij = a[(i, j)] * sw[i] / sw[j];
        let b_ji = a[(j, i)] * sw[j] / sw[i];
        (b_ij + b_ji.conj()) * half
    });
    let mut u = Mat::identity(n);
    jacobi_hermitian(&mut h, &mut u)?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&p, &q| h[(p, p)].re.partial_cmp(&h[(q, q)].re).expect("finite eigenvalues"));
    let values = order.iter().map(|&k| h[(k, k)].re).collect();
    let vectors = Mat::from_fn(n, |i, j| u[(i, order[j])] / sw[i]);
    Ok(SymmetricEigen { values, vectors })
}

fn off_diagonal<T: Real>(h: &Mat<T>) -> T {
    let n = h.dim();
    let mut s = T::zero();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += h[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// In-place cyclic Jacobi. On return `h` is diagonal and `h_in = U h U*`.
fn jacobi_hermitian<T: Real>(h: &mut Mat<T>, u: &mut Mat<T>) -> Result<()> {
    let n = h.dim();
    let total = h.frobenius();
    if n < 2 || total == T::zero() {
        return Ok(());
    }
    let target = T::epsilon() * total;
    for _sweep in 0..tol::JACOBI_MAX_SWEEPS {
        if off_diagonal(h) <= target {
            return Ok(());
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                rotate(h, u, p, q);
            }
        }
    }
    if off_diagonal(h) <= target * T::lit(16.0) {
        return Ok(());
    }
    Err(Error::NoConvergence {
        sweeps: tol::JACOBI_MAX_SWEEPS,
    })
}

fn rotate<T: Real>(h: &mut Mat<T>, u: &mut Mat<T>, p: usize, q: usize) {
    let hpq = h[(p, q)];
    let g = hpq.norm();
    if g == T::zero() {
        return;
    }
    let app = h[(p, p)].re;
    let aqq = h[(q, q)].re;
    if g <= T::epsilon() * T::lit(1e-3) * (app.abs() + aqq.abs()) {
        h[(p, q)] = czero();
        h[(q, p)] = czero();
        return;
    }
    // Phase making the pivot real, followed by the real symmetric rotation.
    let e = hpq / g;
    let tau = (aqq - app) / (g + g);
    let t = if tau >= T::zero() {
        T::one() / (tau + (T::one() + tau * tau).sqrt())
    } else {
        -T::one() / (-tau + (T::one() + tau * tau).sqrt())
    };
    let c = T::one() / (T::one() + t * t).sqrt();
    let s = t * c;
    let upp = cr(c);
    let upq = cr(s);
    let uqp = e.conj() * (-s);
    let uqq = e.conj() * c;

    let n = h.dim();
    for k in 0..n {
        let hkp = h[(k, p)];
        let hkq = h[(k, q)];
        h[(k, p)] = hkp * upp + hkq * uqp;
        h[(k, q)] = hkp * upq + hkq * uqq;
    }
    for k in 0..n {
        let hpk = h[(p, k)];
        let hqk = h[(q, k)];
        h[(p, k)] = upp.conj() * hpk + uqp.conj() * hqk;
        h[(q, k)] = upq.conj() * hpk + uqq.conj() * hqk;
    }
    h[(p, q)] = czero();
    h[(q, p)] = czero();
    h[(p, p)] = cr(h[(p, p)].re);
    h[(q, q)] = cr(h[(q, q)].re);
    for k in 0..n {
        let ukp = u[(k, p)];
        let ukq = u[(k, q)];
        u[(k, p)] = ukp * upp + ukq * uqp;
        u[(k, q)] = ukp * upq + ukq * uqq;
    }
}

impl<T: Real> SymmetricEigen<T> {
    /// `Q Λ Q* W`.
    pub fn reconstruct(&self, m: &MeasureSpace<T>) -> Mat<T> {
        let n = self.vectors.dim();
        let w = m.weights();
        let mut out = Mat::zeros(n);
        for (k, lam) in self.values.iter().enumerate() {
            for i in 0..n {
                let qi = self.vectors[(i, k)] * *lam;
                for j in 0..n {
                    out[(i, j)] += qi * self.vectors[(j, k)].conj() * w[j];
                }
            }
        }
        out
    }

    /// Largest entry of `|Q* W Q − I|`.
    pub fn orthonormality_defect(&self, m: &MeasureSpace<T>) -> T {
        let n = self.vectors.dim();
        let mut worst = T::zero();
        for a in 0..n {
            for b in 0..n {
                let col_a = self.vectors.col(a);
                let col_b = self.vectors.col(b);
                let g: C<T> = m.inner(&col_b, &col_a);
                let target = if a == b { T::one() } else { T::zero() };
                worst = worst.max((g - cr(target)).norm());
            }
        }
        worst
    }
}
