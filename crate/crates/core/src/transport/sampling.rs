//! Random draws used by both engines. All take uniforms from the caller's
//! RNG as `f64` and convert to the scalar type.

use rand::Rng;

use crate::real::Real;

/// Uniform on `[0, 1)`.
#[inline]
pub fn uniform<T: Real, R: Rng + ?Sized>(rng: &mut R) -> T {
    T::lit(rng.random::<f64>())
}

/// Exponential flight distance with rate `kappa_s`; infinite when the rate is zero.
pub fn sample_collision_distance<T: Real, R: Rng + ?Sized>(rng: &mut R, kappa_s: T) -> T {
    if !(kappa_s > T::zero()) {
        return T::infinity();
    }
    let u: f64 = rng.random();
    T::lit(-(1.0 - u).ln()) / kappa_s
}

/// Isotropic direction cosine on `[-1, 1]`.
pub fn scatter_direction<T: Real, R: Rng + ?Sized>(rng: &mut R) -> T {
    T::lit(2.0 * rng.random::<f64>() - 1.0)
}

/// Incoming direction at the outer sphere with density `2|μ|` on `[-1, 0)`.
pub fn sample_lambert_incoming<T: Real, R: Rng + ?Sized>(rng: &mut R) -> T {
    let u: f64 = rng.random();
    T::lit(-(1.0 - u).sqrt())
}

/// `w·exp(−κ_a s)`.
#[inline]
pub fn attenuate_weight<T: Real>(w: T, kappa_a: T, s: T) -> T {
    if kappa_a == T::zero() || s == T::zero() {
        w
    } else {
        w * (-kappa_a * s).exp()
    }
}
