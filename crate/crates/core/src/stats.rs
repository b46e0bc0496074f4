//! Single-pass sample statistics and the figure of merit.

use crate::error::{Error, Result};
use crate::real::Real;

/// Running mean and sum of squared deviations (Welford), mergeable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleAccumulator<T> {
    n: u64,
    mean: T,
    m2: T,
}

impl<T: Real> Default for SampleAccumulator<T> {
    fn default() -> Self {
        Self::new()
    }
}

/// Sample mean, unbiased sample variance `σ²`, and variance of the mean `Σ² = σ²/N`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments<T> {
    pub mean: T,
    pub sigma2: T,
    pub mean_variance: T,
}

impl<T: Real> SampleAccumulator<T> {
    pub fn new() -> Self {
        Self { n: 0, mean: T::zero(), m2: T::zero() }
    }

    pub fn count(&self) -> u64 {
        self.n
    }

    pub fn mean(&self) -> T {
        self.mean
    }

    pub fn push(&mut self, x: T) {
        self.n += 1;
        let delta = x - self.mean;
        self.mean = self.mean + delta / T::lit(self.n as f64);
        self.m2 = self.m2 + delta * (x - self.mean);
    }

    /// Pushes `k` copies of `x` at once.
    pub fn push_repeated(&mut self, x: T, k: u64) {
        if k > 0 {
            let mut other = Self { n: k, mean: x, m2: T::zero() };
            std::mem::swap(self, &mut other);
            self.merge_from(&other);
        }
    }

    /// Combines two disjoint sample streams (Chan et al. pairwise update).
    pub fn merge(mut self, other: &Self) -> Self {
        self.merge_from(other);
        self
    }

    fn merge_from(&mut self, other: &Self) {
        if other.n == 0 {
            return;
        }
        if self.n == 0 {
            *self = *other;
            return;
        }
        let n = self.n + other.n;
        let (na, nb, nt) = (T::lit(self.n as f64), T::lit(other.n as f64), T::lit(n as f64));
        let delta = other.mean - self.mean;
        self.mean = self.mean + delta * nb / nt;
        self.m2 = self.m2 + other.m2 + delta * delta * na * nb / nt;
        self.n = n;
    }

    pub fn finalize(&self) -> Result<Moments<T>> {
        if self.n < 2 {
            return Err(Error::InsufficientSamples(self.n));
        }
        let sigma2 = (self.m2 / T::lit((self.n - 1) as f64)).max(T::zero());
        Ok(Moments {
            mean: self.mean,
            sigma2,
            mean_variance: sigma2 / T::lit(self.n as f64),
        })
    }
}

impl<T: Real> FromIterator<T> for SampleAccumulator<T> {
    fn from_iter<I: IntoIterator<Item = T>>(iter: I) -> Self {
        let mut acc = Self::new();
        for x in iter {
            acc.push(x);
        }
        acc
    }
}

/// `1 / (Σ² · time)`.
pub fn figure_of_merit(mean_variance: f64, wall_time: f64) -> Result<f64> {
    if !(mean_variance > 0.0) || !(wall_time > 0.0) {
        return Err(Error::Domain(format!(
            "figure of merit needs positive variance and time, got {mean_variance:e}, {wall_time:e}"
        )));
    }
    Ok(1.0 / (mean_variance * wall_time))
}
