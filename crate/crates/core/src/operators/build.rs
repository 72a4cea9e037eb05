use crate::error::{invalid, Error, Result};
use crate::linalg::{weighted_symmetric_eig, CVector, Mat, MeasureSpace};
use crate::random::{self, SeededRng};
use crate::scalar::{cr, czero, Real, C};
use crate::tol;

use super::{KernelProjection, ModelOperator, OperatorForm};

fn bounds_of<T: Real>(values: impl Iterator<Item = T>) -> (T, T) {
    values
        .filter(|v| *v > T::zero())
        .fold((T::infinity(), T::zero()), |(lo, hi), v| (lo.min(v), hi.max(v)))
}

fn self_adjoint<T: Real>(
    eigenvalues: Vec<T>,
    eigenvectors: Vec<CVector<T>>,
    measure: MeasureSpace<T>,
    kernel: KernelProjection<T>,
    label: &'static str,
) -> ModelOperator<T> {
    let spectral_bounds = bounds_of(eigenvalues.iter().copied());
    let injective = eigenvalues.iter().all(|v| *v != T::zero());
    ModelOperator {
        form: OperatorForm::SpectralSelfAdjoint {
            eigenvalues,
            eigenvectors,
        },
        measure,
        sector_angle: T::zero(),
        injective,
        bisectorial: false,
        spectral_bounds,
        kernel,
        label,
    }
}

fn tridiagonal_laplacian<T: Real>(n: usize, h: T, potential: Option<&[T]>) -> Mat<T> {
    let inv_h2 = (h * h).recip();
    Mat::from_fn(n, |i, j| {
        let v = if i == j {
            T::lit(2.0) * inv_h2 + potential.map_or(T::zero(), |p| p[i])
        } else if i.abs_diff(j) == 1 {
            -inv_h2
        } else {
            T::zero()
        };
        cr(v)
    })
}

/// Discrete Dirichlet Laplacian `(2, −1, −1)/h²` on `n` interior points.
///
/// The measure gives each point mass `h`. Eigenpairs are in closed form:
/// `λ_k = (2 − 2cos(kπ/(n+1)))/h²` with sine eigenvectors.
pub fn build_dirichlet_laplacian_1d<T: Real>(n: usize, h: T) -> Result<ModelOperator<T>> {
    if n == 0 || !(h > T::zero()) {
        return invalid("dirichlet1d needs n >= 1 and h > 0");
    }
    let measure = MeasureSpace::new(vec![h; n])?;
    let np1 = T::from_usize_lossy(n + 1);
    let norm = (T::lit(2.0) / (np1 * h)).sqrt();
    let pi = T::PI();
    let mut eigenvalues = Vec::with_capacity(n);
    let mut eigenvectors = Vec::with_capacity(n);
    for k in 1..=n {
        let kf = T::from_usize_lossy(k);
        eigenvalues.push((T::lit(2.0) - T::lit(2.0) * (kf * pi / np1).cos()) / (h * h));
        eigenvectors.push(
            (1..=n)
                .map(|j| cr(norm * (T::from_usize_lossy(j) * kf * pi / np1).sin()))
                .collect(),
        );
    }
    Ok(self_adjoint(
        eigenvalues,
        eigenvectors,
        measure,
        KernelProjection::zero(n),
        "dirichlet1d",
    ))
}

/// Graph Laplacian `A = I − P`, `(Pf)(x) = Σ_y σ(x,y) f(y) / μ(x)`, with
/// `μ(x) = Σ_y σ(x,y)`.
///
/// Returns the operator together with the projection onto its kernel (the
/// constants, orthogonally with respect to `μ`).
pub fn build_graph_laplacian<T: Real>(sigma: &[Vec<T>]) -> Result<(ModelOperator<T>, KernelProjection<T>)> {
    let n = sigma.len();
    if n == 0 {
        return invalid("graph needs at least one vertex");
    }
    for (i, row) in sigma.iter().enumerate() {
        if row.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: row.len(),
            });
        }
        if !(row[i] > T::zero()) {
            return invalid(format!("sigma({i},{i}) must be positive"));
        }
        for (j, v) in row.iter().enumerate() {
            if *v < T::zero() || !v.is_finite() {
                return invalid(format!("sigma({i},{j}) must be finite and nonnegative"));
            }
            if (*v - sigma[j][i]).abs() > T::tol(tol::SELF_ADJOINT) * v.abs().max(sigma[j][i].abs()) {
                return invalid(format!("sigma is not symmetric at ({i},{j})"));
            }
        }
    }
    let mu: Vec<T> = sigma.iter().map(|r| r.iter().copied().sum()).collect();
    let measure = MeasureSpace::new(mu.clone())?;
    let a = Mat::from_fn(n, |i, j| {
        let delta = if i == j { T::one() } else { T::zero() };
        cr(delta - sigma[i][j] / mu[i])
    });
    let eig = weighted_symmetric_eig(&a, &measure)?;
    let scale = eig.values.iter().fold(T::one(), |m, v| m.max(v.abs()));
    let zero_tol = T::tol(tol::ZERO_EIGENVALUE) * scale;
    let kernel_dim = eig.values.iter().filter(|v| v.abs() <= zero_tol).count();
    if kernel_dim != 1 {
        return Err(Error::DisconnectedGraph { kernel_dim });
    }
    let constant: CVector<T> = vec![cr(measure.total_mass().sqrt().recip()); n];
    let mut eigenvalues = Vec::with_capacity(n);
    let mut eigenvectors = Vec::with_capacity(n);
    for (k, v) in eig.values.iter().enumerate() {
        if v.abs() <= zero_tol {
            eigenvalues.push(T::zero());
            eigenvectors.push(constant.clone());
        } else {
            eigenvalues.push(*v);
            eigenvectors.push(eig.vectors.col(k));
        }
    }
    let kp = KernelProjection::from_basis(std::slice::from_ref(&constant), &measure);
    let op = self_adjoint(eigenvalues, eigenvectors, measure, kp.clone(), "graph");
    Ok((op, kp))
}

/// Hermite operator `A h_k = (2k + d) h_k` on the span of the first `modes`
/// discretized Hermite functions.
///
/// The functions come from the normalized three-term recurrence and are
/// re-orthonormalized against the grid weights. On a one-dimensional grid `d`
/// only shifts the eigenvalues.
pub fn build_hermite_operator<T: Real>(
    d: u32,
    modes: usize,
    nodes: &[T],
    measure: MeasureSpace<T>,
) -> Result<ModelOperator<T>> {
    if d == 0 || modes == 0 {
        return invalid("hermite needs d >= 1 and at least one mode");
    }
    if nodes.len() != measure.len() {
        return Err(Error::DimensionMismatch {
            expected: measure.len(),
            got: nodes.len(),
        });
    }
    if modes > nodes.len() {
        return invalid("more Hermite modes than grid points");
    }
    let n = nodes.len();
    let c0 = T::PI().powf(T::lit(-0.25));
    let mut raw: Vec<Vec<T>> = Vec::with_capacity(modes);
    raw.push(nodes.iter().map(|x| c0 * (-(*x * *x) * T::lit(0.5)).exp()).collect());
    for k in 0..modes.saturating_sub(1) {
        let kf = T::from_usize_lossy(k);
        let a = (T::lit(2.0) / (kf + T::one())).sqrt();
        let b = (kf / (kf + T::one())).sqrt();
        let next: Vec<T> = (0..n)
            .map(|i| {
                let prev = if k == 0 { T::zero() } else { raw[k - 1][i] };
                a * nodes[i] * raw[k][i] - b * prev
            })
            .collect();
        raw.push(next);
    }
    let w = measure.weights();
    let mut gram_defect = T::zero();
    for a in 0..modes {
        for b in 0..=a {
            let g: T = (0..n).map(|i| w[i] * raw[a][i] * raw[b][i]).sum();
            let target = if a == b { T::one() } else { T::zero() };
            gram_defect = gram_defect.max((g - target).abs());
        }
    }
    if gram_defect > T::lit(tol::HERMITE_GRAM) {
        return Err(Error::Invariant(format!(
            "discretized Hermite functions have Gram defect {gram_defect:e}; grid too coarse or narrow"
        )));
    }
    // Modified Gram-Schmidt in the weighted inner product.
    let mut eigenvectors: Vec<CVector<T>> = Vec::with_capacity(modes);
    for f in raw {
        let mut v: CVector<T> = f.into_iter().map(cr).collect();
        for e in &eigenvectors {
            let p = measure.inner(&v, e);
            for (vi, ei) in v.iter_mut().zip(e) {
                *vi -= p * *ei;
            }
        }
        let nv = measure.norm(&v);
        v.iter_mut().for_each(|x| *x /= nv);
        eigenvectors.push(v);
    }
    let eigenvalues = (0..modes)
        .map(|k| T::from_usize_lossy(2 * k) + T::from_u32(d).expect("u32"))
        .collect();
    Ok(self_adjoint(
        eigenvalues,
        eigenvectors,
        measure,
        KernelProjection::zero(n),
        "hermite",
    ))
}

/// Discrete `−Δ + V` with Dirichlet conditions and a nonnegative potential.
pub fn build_schrodinger_1d<T: Real>(n: usize, h: T, potential: &[T]) -> Result<ModelOperator<T>> {
    if n == 0 || !(h > T::zero()) {
        return invalid("schrodinger needs n >= 1 and h > 0");
    }
    if potential.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: potential.len(),
        });
    }
    if let Some(i) = potential.iter().position(|v| !(*v >= T::zero()) || !v.is_finite()) {
        return invalid(format!("potential entry {i} is negative or not finite"));
    }
    let measure = MeasureSpace::new(vec![h; n])?;
    let a = tridiagonal_laplacian(n, h, Some(potential));
    let eig = weighted_symmetric_eig(&a, &measure)?;
    let eigenvectors = (0..n).map(|k| eig.vectors.col(k)).collect();
    Ok(self_adjoint(
        eig.values,
        eigenvectors,
        measure,
        KernelProjection::zero(n),
        "schrodinger",
    ))
}

fn random_orthogonal<T: Real>(rng: &mut SeededRng, n: usize) -> Mat<T> {
    let mut cols: Vec<Vec<T>> = Vec::with_capacity(n);
    while cols.len() < n {
        let mut v: Vec<T> = (0..n).map(|_| random::gaussian(rng)).collect();
        for _ in 0..2 {
            for c in &cols {
                let p: T = v.iter().zip(c).map(|(a, b)| *a * *b).sum();
                v.iter_mut().zip(c).for_each(|(a, b)| *a -= p * *b);
            }
        }
        let nv = v.iter().map(|a| *a * *a).sum::<T>().sqrt();
        if nv > T::lit(1e-6) {
            v.iter_mut().for_each(|a| *a /= nv);
            cols.push(v);
        }
    }
    Mat::from_fn(n, |i, j| cr(cols[j][i]))
}

/// `S = U diag(σ) Vᵀ` with `σ` geometric from 1 to `κ`, hence `cond₂(S) = κ`.
fn conditioned_similarity<T: Real>(n: usize, kappa: T, seed: u64) -> Result<(Mat<T>, Mat<T>)> {
    let mut rng = random::rng(seed);
    let u = random_orthogonal::<T>(&mut rng, n);
    let v = random_orthogonal::<T>(&mut rng, n);
    let sigma: Vec<T> = (0..n)
        .map(|i| {
            if n == 1 {
                T::one()
            } else {
                kappa.powf(T::from_usize_lossy(i) / T::from_usize_lossy(n - 1))
            }
        })
        .collect();
    let vt = v.adjoint();
    let s = u
        .matmul(&Mat::from_diag(&sigma.iter().map(|x| cr(*x)).collect::<Vec<_>>()))?
        .matmul(&vt)?;
    let s_inv = v
        .matmul(&Mat::from_diag(&sigma.iter().map(|x| cr(x.recip())).collect::<Vec<_>>()))?
        .matmul(&u.adjoint())?;
    let defect = s.matmul(&s_inv)?.sub(&Mat::identity(n)).max_abs();
    if defect > T::tol(tol::SIMILARITY) {
        return Err(Error::Invariant(format!("similarity defect {defect:e}")));
    }
    Ok((s, s_inv))
}

fn similarity_operator<T: Real>(
    lambdas: &[C<T>],
    kappa: T,
    seed: u64,
    sector_angle: T,
    bisectorial: bool,
    label: &'static str,
) -> Result<ModelOperator<T>> {
    let n = lambdas.len();
    let (s, s_inv) = conditioned_similarity(n, kappa, seed)?;
    let spectral_bounds = bounds_of(lambdas.iter().map(|l| l.norm()));
    Ok(ModelOperator {
        form: OperatorForm::SimilarityDiagonal {
            s,
            s_inv,
            eigenvalues: lambdas.to_vec(),
        },
        measure: MeasureSpace::counting(n)?,
        sector_angle,
        injective: true,
        bisectorial,
        spectral_bounds,
        kernel: KernelProjection::zero(n),
        label,
    })
}

fn check_similarity_inputs<T: Real>(lambdas: &[C<T>], kappa: T) -> Result<()> {
    if lambdas.is_empty() {
        return invalid("need at least one eigenvalue");
    }
    if !(kappa >= T::one()) {
        return invalid("conditioning must be >= 1");
    }
    if lambdas.iter().any(|l| *l == czero() || !l.re.is_finite() || !l.im.is_finite()) {
        return invalid("eigenvalues must be finite and nonzero");
    }
    Ok(())
}

/// Non-normal `A = S diag(λ) S⁻¹` with `cond₂(S) = κ` and `|arg λ_k| < π/2`.
pub fn build_nonnormal_sectorial<T: Real>(lambdas: &[C<T>], kappa: T, seed: u64) -> Result<ModelOperator<T>> {
    check_similarity_inputs(lambdas, kappa)?;
    let omega = lambdas.iter().map(|l| l.arg().abs()).fold(T::zero(), T::max);
    if omega >= T::FRAC_PI_2() {
        return invalid("eigenvalues must lie in an open sector of angle < π/2");
    }
    similarity_operator(lambdas, kappa, seed, omega, false, "nonnormal")
}

/// Like [`build_nonnormal_sectorial`] but with spectrum in the double sector
/// `|arg(±λ)| < π/2`, i.e. off the imaginary axis.
pub fn build_bisectorial<T: Real>(lambdas: &[C<T>], kappa: T, seed: u64) -> Result<ModelOperator<T>> {
    check_similarity_inputs(lambdas, kappa)?;
    if lambdas.iter().any(|l| l.re == T::zero()) {
        return invalid("bisectorial spectrum must avoid the imaginary axis");
    }
    let omega = lambdas
        .iter()
        .map(|l| if l.re > T::zero() { l.arg().abs() } else { (-*l).arg().abs() })
        .fold(T::zero(), T::max);
    similarity_operator(lambdas, kappa, seed, omega, true, "bisectorial")
}
