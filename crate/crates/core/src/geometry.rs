//! Straight-line kinematics in spherical shells.
//!
//! A flight is described in the plane containing the ray and the origin:
//! `x = r·μ` grows at unit rate along the path and `y = r·√(1−μ²)` (the
//! impact parameter) stays fixed.

use crate::error::{Error, Result};
use crate::real::Real;

/// Cosine of the direction that grazes the inner sphere of radius `r0` from radius `r`.
pub fn mu_d<T: Real>(r: T, r0: T) -> Result<T> {
    if r < r0 || r0 < T::zero() {
        return Err(Error::Domain(format!("mu_d needs r >= r0 >= 0, got r = {r:e}, r0 = {r0:e}")));
    }
    if r0 == T::zero() {
        return Ok(-T::one());
    }
    let q = r0 / r;
    Ok(-((T::one() - q) * (T::one() + q)).max(T::zero()).sqrt())
}

#[inline]
pub fn impact_parameter<T: Real>(r: T, mu: T) -> T {
    r * ((T::one() - mu) * (T::one() + mu)).max(T::zero()).sqrt()
}

/// Position and direction after flying a distance `s` from `(r, μ)`.
pub fn advance_free_flight<T: Real>(r: T, mu: T, s: T) -> (T, T) {
    let x = r * mu + s;
    let y = impact_parameter(r, mu);
    let r_new = (x * x + y * y).sqrt();
    if r_new == T::zero() {
        return (T::zero(), T::one());
    }
    (r_new, (x / r_new).max(-T::one()).min(T::one()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shell {
    Inner,
    Outer,
}

/// Distance along `μ` to the first sphere hit, and which one.
pub fn distance_to_shells<T: Real>(r: T, mu: T, r0: T, r1: T) -> Result<(T, Shell)> {
    let tol = T::lit(1e-12) * r1;
    if r < r0 - tol || r > r1 + tol {
        return Err(Error::Domain(format!(
            "r = {r:e} outside [{r0:e}, {r1:e}]"
        )));
    }
    let r = r.max(r0).min(r1);
    let x = r * mu;
    let y2 = r * r * (T::one() - mu) * (T::one() + mu);
    if r0 > T::zero() && mu < mu_d(r, r0)? {
        let s = -x - (r0 * r0 - y2).max(T::zero()).sqrt();
        return Ok((s.max(T::zero()), Shell::Inner));
    }
    let s = -x + (r1 * r1 - y2).max(T::zero()).sqrt();
    Ok((s.max(T::zero()), Shell::Outer))
}

/// Index of the cell `[edges[k], edges[k+1])` containing `v`, clamped to the mesh.
pub fn locate<T: Real>(edges: &[T], v: T) -> usize {
    let n = edges.len() - 1;
    let k = edges.partition_point(|e| *e <= v);
    k.saturating_sub(1).min(n - 1)
}

/// Splits the straight path `x ∈ [x_start, x_end]` at impact parameter `y`
/// into pieces that each stay inside one radial cell of `edges`, calling
/// `f(cell, xa, xb)` in path order. Pieces outside the mesh are skipped.
/// The turning point `x = 0` is always a break.
pub fn for_each_chord<T: Real, F: FnMut(usize, T, T)>(
    edges: &[T],
    x_start: T,
    x_end: T,
    y: T,
    mut f: F,
) {
    if !(x_end > x_start) {
        return;
    }
    let mut breaks: Vec<T> = Vec::with_capacity(2 * edges.len() + 3);
    breaks.push(x_start);
    if x_start < T::zero() && x_end > T::zero() {
        breaks.push(T::zero());
    }
    for &e in edges {
        if e > y {
            let h = ((e - y) * (e + y)).sqrt();
            for xb in [-h, h] {
                if xb > x_start && xb < x_end {
                    breaks.push(xb);
                }
            }
        }
    }
    breaks.push(x_end);
    breaks.sort_by(|a, b| a.partial_cmp(b).expect("finite breakpoints"));
    let lo = edges[0];
    let hi = edges[edges.len() - 1];
    for w in breaks.windows(2) {
        let (xa, xb) = (w[0], w[1]);
        if !(xb > xa) {
            continue;
        }
        let xm = (xa + xb) * T::lit(0.5);
        let rm = (xm * xm + y * y).sqrt();
        if rm < lo || rm > hi {
            continue;
        }
        f(locate(edges, rm), xa, xb);
    }
}
