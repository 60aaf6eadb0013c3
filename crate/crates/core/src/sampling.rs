//! Seeded sampling boxes `[-R, R]^n`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Sample set specification. Identical fields always give identical points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleDomain {
    pub n: usize,
    pub radius: f64,
    pub seed: u64,
    pub count: usize,
}

impl SampleDomain {
    pub fn new(n: usize, radius: f64, seed: u64, count: usize) -> Result<Self> {
        let dom = Self { n, radius, seed, count };
        dom.validate()?;
        Ok(dom)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::DimensionTooSmall { got: 0, min: 1 });
        }
        if !(self.radius.is_finite() && self.radius > 0.0) {
            return Err(Error::InvalidArgument(format!("radius must be positive, got {}", self.radius)));
        }
        if self.count == 0 {
            return Err(Error::InvalidArgument("sample count must be at least 1".into()));
        }
        Ok(())
    }

    /// ChaCha8 stream seeded from `seed`.
    pub fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }

    pub fn points_f64(&self) -> Vec<Vec<f64>> {
        let mut rng = self.rng();
        let r = self.radius;
        (0..self.count)
            .map(|_| (0..self.n).map(|_| rng.random_range(-r..=r)).collect())
            .collect()
    }

    pub fn points<T: Scalar>(&self) -> Vec<Vec<T>> {
        self.points_f64()
            .into_iter()
            .map(|p| p.into_iter().map(T::from_f64_lossy).collect())
            .collect()
    }
}
