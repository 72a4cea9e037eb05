use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::random::{gaussian, rademacher, rng};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SignKind {
    #[default]
    Rademacher,
    Gaussian,
}

/// A seeded family of random coefficient sequences.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomEnsemble {
    pub seed: u64,
    #[serde(default = "default_count")]
    pub count: usize,
    #[serde(default)]
    pub kind: SignKind,
}

fn default_count() -> usize {
    256
}

impl RandomEnsemble {
    pub fn rademacher(seed: u64, count: usize) -> Self {
        Self {
            seed,
            count,
            kind: SignKind::Rademacher,
        }
    }

    pub fn gaussian(seed: u64, count: usize) -> Self {
        Self {
            seed,
            count,
            kind: SignKind::Gaussian,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.count == 0 {
            return invalid("ensemble needs at least one sample");
        }
        Ok(())
    }

    /// `count` coefficient sequences of length `len`, drawn sample by sample
    /// from one stream.
    pub fn draw<T: Real>(&self, len: usize) -> Vec<Vec<T>> {
        let mut r = rng(self.seed);
        (0..self.count)
            .map(|_| {
                (0..len)
                    .map(|_| match self.kind {
                        SignKind::Rademacher => rademacher(&mut r),
                        SignKind::Gaussian => gaussian(&mut r),
                    })
                    .collect()
            })
            .collect()
    }
}
