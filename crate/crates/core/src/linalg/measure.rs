use crate::error::{invalid, Error, Result};
use crate::scalar::{Real, C};

use super::check_len;

/// Finite measure space: `n` points with positive weights.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasureSpace<T> {
    weights: Vec<T>,
}

impl<T: Real> MeasureSpace<T> {
    pub fn new(weights: Vec<T>) -> Result<Self> {
        if weights.is_empty() {
            return invalid("measure space needs at least one point");
        }
        if let Some(i) = weights.iter().position(|w| !(*w > T::zero()) || !w.is_finite()) {
            return invalid(format!("weight {i} is not a positive finite number"));
        }
        Ok(Self { weights })
    }

    /// Counting measure on `n` points.
    pub fn counting(n: usize) -> Result<Self> {
        Self::new(vec![T::one(); n])
    }

    /// Uniform probability measure on `n` points.
    pub fn probability(n: usize) -> Result<Self> {
        Self::new(vec![T::one() / T::from_usize_lossy(n.max(1)); n])
    }

    /// `points` equispaced nodes on `[lo, hi]`, each carrying the mesh width.
    pub fn uniform_grid(lo: T, hi: T, points: usize) -> Result<(Vec<T>, Self)> {
        if points < 2 || !(hi > lo) {
            return invalid("uniform grid needs lo < hi and at least two points");
        }
        let dx = (hi - lo) / T::from_usize_lossy(points - 1);
        let nodes = (0..points).map(|i| lo + dx * T::from_usize_lossy(i)).collect();
        Ok((nodes, Self::new(vec![dx; points])?))
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn total_mass(&self) -> T {
        self.weights.iter().copied().sum()
    }

    /// `⟨x, y⟩ = Σ w_i x_i conj(y_i)`.
    pub fn inner(&self, x: &[C<T>], y: &[C<T>]) -> C<T> {
        let mut acc = C::new(T::zero(), T::zero());
        for ((w, a), b) in self.weights.iter().zip(x).zip(y) {
            acc += *a * b.conj() * *w;
        }
        acc
    }

    /// Weighted L² norm.
    pub fn norm(&self, x: &[C<T>]) -> T {
        self.weights
            .iter()
            .zip(x)
            .map(|(w, v)| *w * v.norm_sqr())
            .sum::<T>()
            .sqrt()
    }
}

/// `(Σ w_i |x_i|^p)^{1/p}`, or `max |x_i|` for `p = ∞`.
pub fn lp_norm<T: Real>(x: &[C<T>], p: T, m: &MeasureSpace<T>) -> Result<T> {
    check_len(x, m.len())?;
    if p.is_nan() || p < T::one() {
        return Err(Error::InvalidParameter(format!("Lp exponent {p} < 1")));
    }
    if p.is_infinite() {
        return Ok(x.iter().fold(T::zero(), |acc, v| acc.max(v.norm())));
    }
    let two = T::lit(2.0);
    if p == two {
        return Ok(m.norm(x));
    }
    // Scale by the largest modulus so |x_i|^p stays representable.
    let peak = x.iter().fold(T::zero(), |acc, v| acc.max(v.norm()));
    if peak == T::zero() {
        return Ok(T::zero());
    }
    let sum: T = m
        .weights()
        .iter()
        .zip(x)
        .map(|(w, v)| *w * (v.norm() / peak).powf(p))
        .sum();
    Ok(peak * sum.powf(p.recip()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C<f64> {
        C::new(re, 0.0)
    }

    #[test]
    fn pythagorean() {
        let m = MeasureSpace::<f64>::counting(2).unwrap();
        assert!((lp_norm(&[c(3.0), c(4.0)], 2.0, &m).unwrap() - 5.0).abs() < 1e-15);
    }

    #[test]
    fn normalized_ones() {
        let m = MeasureSpace::<f64>::probability(7).unwrap();
        let x = vec![c(1.0); 7];
        for p in [1.0, 1.5, 2.0, 3.0, 10.0, f64::INFINITY] {
            assert!((lp_norm(&x, p, &m).unwrap() - 1.0).abs() < 1e-14, "p = {p}");
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        let m = MeasureSpace::<f64>::counting(2).unwrap();
        assert!(matches!(
            lp_norm(&[c(1.0)], 2.0, &m),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(lp_norm(&[c(1.0), c(1.0)], 0.5, &m).is_err());
        assert!(MeasureSpace::<f64>::new(vec![1.0, 0.0]).is_err());
        assert!(MeasureSpace::<f64>::new(vec![]).is_err());
    }

    #[test]
    fn single_precision() {
        let m = MeasureSpace::<f32>::counting(2).unwrap();
        let v = lp_norm(&[C::new(3.0f32, 0.0), C::new(0.0, 4.0)], 2.0, &m).unwrap();
        assert!((v - 5.0).abs() < 1e-6);
    }
}
