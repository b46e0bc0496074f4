use crate::error::{Error, Result};
use crate::real::Real;

/// Decay constant and direction density of the slab-geometry importance
/// `e^{Kx}Φ_K(μ)` for a constant isotropic kernel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlanarEigen<T> {
    pub k: T,
    pub kappa_s: T,
    pub kappa_t: T,
}

impl<T: Real> PlanarEigen<T> {
    /// `Φ_K(μ) = κ_s / (2(κ_t − Kμ))`, a probability density on `[-1, 1]`.
    pub fn density(&self, mu: T) -> T {
        self.kappa_s * T::lit(0.5) / (self.kappa_t - self.k * mu)
    }
}

/// Solves `(κ_s/(2K)) ln((κ_t+K)/(κ_t−K)) = 1` for `K ∈ [0, κ_t)`.
pub fn planar_eigenvalue<T: Real>(kappa_s: T, kappa_t: T) -> Result<PlanarEigen<T>> {
    if !(kappa_s > T::zero()) || kappa_s > kappa_t {
        return Err(Error::Domain(format!(
            "need 0 < kappa_s <= kappa_t, got {kappa_s:e}, {kappa_t:e}"
        )));
    }
    let c = (kappa_s / kappa_t).to_f64_lossy();
    let k = if c >= 1.0 { 0.0 } else { scaled_root(c) };
    Ok(PlanarEigen { k: T::lit(k) * kappa_t, kappa_s, kappa_t })
}

/// Root of `c·atanh(k)/k = 1` on `(0, 1)`. Written as `k = tanh(u)` with
/// `tanh(u)/u = c`, which is monotone in `u` and stays well conditioned as
/// `k` approaches 1.
fn scaled_root(c: f64) -> f64 {
    let g = |u: f64| u.tanh() / u - c;
    let (mut lo, mut hi) = (f64::EPSILON, 1.0);
    while g(hi) > 0.0 {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 2.0 * f64::EPSILON * hi {
            break;
        }
    }
    (0.5 * (lo + hi)).tanh()
}
