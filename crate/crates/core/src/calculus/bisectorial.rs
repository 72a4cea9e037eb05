use crate::error::{Error, Result};
use crate::linalg::{CVector, Mat};
use crate::operators::{ModelOperator, OperatorForm, Spectral};
use crate::scalar::{cone, czero, Real, C};
use crate::symbols::Symbol;

use super::symbol_at;

/// Spectral projections onto the right (`Re λ > 0`) and left half-plane
/// parts of a bisectorial operator.
#[derive(Debug, Clone)]
pub struct BisectorialProjections<T> {
    pub p1: Mat<T>,
    pub p2: Mat<T>,
}

fn half_plane_masks<T: Real>(op: &ModelOperator<T>) -> Result<(Vec<bool>, Vec<C<T>>)> {
    let eigs = op.modes()?;
    if let Some(l) = eigs.iter().find(|l| l.re == T::zero()) {
        return Err(Error::OnSpectrum(format!("eigenvalue {l} on the imaginary axis")));
    }
    Ok((eigs.iter().map(|l| l.re > T::zero()).collect(), eigs))
}

fn spectral_mask_matrix<T: Real>(op: &ModelOperator<T>, diag: &[C<T>]) -> Mat<T> {
    match op.form() {
        OperatorForm::SimilarityDiagonal { s, s_inv, .. } => s
            .matmul(&Mat::from_diag(diag))
            .and_then(|m| m.matmul(s_inv))
            .expect("square factors"),
        _ => {
            let n = op.dim();
            let mut cols = Vec::with_capacity(n);
            for j in 0..n {
                let mut e = vec![czero(); n];
                e[j] = cone();
                let c = op.analyze(&e).expect("dimension");
                let scaled: Vec<C<T>> = c.iter().zip(diag).map(|(a, d)| *a * *d).collect();
                cols.push(op.synthesize(&scaled));
            }
            Mat::from_fn(n, |i, j| cols[j][i])
        }
    }
}

/// `P₁`, `P₂` built from the eigenvector matrix.
pub fn bisectorial_projections<T: Real>(op: &ModelOperator<T>) -> Result<BisectorialProjections<T>> {
    let (right, _) = half_plane_masks(op)?;
    let d1: Vec<C<T>> = right.iter().map(|r| if *r { cone() } else { czero() }).collect();
    let d2: Vec<C<T>> = right.iter().map(|r| if *r { czero() } else { cone() }).collect();
    Ok(BisectorialProjections {
        p1: spectral_mask_matrix(op, &d1),
        p2: spectral_mask_matrix(op, &d2),
    })
}

/// Even calculus through the projections:
/// `f(A₁)P₁x + f(−A₂)P₂x` for a symbol `f` on `(0, ∞)`.
pub fn bisectorial_even_apply<T: Real>(op: &ModelOperator<T>, f: &Symbol<T>, x: &[C<T>]) -> Result<CVector<T>> {
    let (right, eigs) = half_plane_masks(op)?;
    let proj = bisectorial_projections(op)?;
    let x1 = proj.p1.mul_vec(x)?;
    let x2 = proj.p2.mul_vec(x)?;
    let mut f1 = Vec::with_capacity(eigs.len());
    let mut f2 = Vec::with_capacity(eigs.len());
    for (l, r) in eigs.iter().zip(&right) {
        if *r {
            f1.push(symbol_at(f, *l)?);
            f2.push(czero());
        } else {
            f1.push(czero());
            f2.push(symbol_at(f, -*l)?);
        }
    }
    let apply = |vals: &[C<T>], v: &[C<T>]| -> Result<CVector<T>> {
        let c = op.analyze(v)?;
        let scaled: Vec<C<T>> = c.iter().zip(vals).map(|(a, b)| *a * *b).collect();
        Ok(op.synthesize(&scaled))
    };
    let y1 = apply(&f1, &x1)?;
    let y2 = apply(&f2, &x2)?;
    Ok(y1.iter().zip(&y2).map(|(a, b)| *a + *b).collect())
}
