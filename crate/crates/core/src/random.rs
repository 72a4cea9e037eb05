//! Seeded random streams. ChaCha8 keeps streams identical across platforms.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::scalar::{Real, C};

pub type SeededRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian<T: Real>(rng: &mut SeededRng) -> T {
    T::lit(rng.sample::<f64, _>(StandardNormal))
}

/// Standard complex Gaussian: independent real and imaginary parts.
pub fn complex_gaussian<T: Real>(rng: &mut SeededRng) -> C<T> {
    C::new(gaussian(rng), gaussian(rng))
}

pub fn complex_gaussian_vec<T: Real>(rng: &mut SeededRng, n: usize) -> Vec<C<T>> {
    (0..n).map(|_| complex_gaussian(rng)).collect()
}

pub fn rademacher<T: Real>(rng: &mut SeededRng) -> T {
    if rng.gen::<bool>() {
        T::one()
    } else {
        -T::one()
    }
}
