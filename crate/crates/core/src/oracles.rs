//! Deterministic reference values for the verification runs.
//!
//! The unsteady cases emit a unit Lambert inflow at `r = R1` and collect it
//! on an inner sphere of radius `R0(t) = α + βt`. A particle emitted at time
//! `t` with direction cosine `μ` reaches the inner sphere at `τ(t, μ)` if
//! `μ ≤ μ(t)`; the flux is `∫∫ |μ| e^{−κ_t (τ−t)} dμ dt` over that wedge.

use std::cell::Cell;

use crate::adjoint::ImportanceTable;
use crate::error::{Error, Result};
use crate::quadrature::{adaptive_gauss, adaptive_simpson};
use crate::real::Real;
use crate::specfun::expint_ei;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    ClosedForm,
    Quadrature,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleValue {
    pub value: f64,
    pub abs_tolerance: f64,
    pub provenance: Provenance,
    /// Change of the value when the quadrature tolerance is tightened 16×.
    pub error_estimate: f64,
}

impl OracleValue {
    fn closed(value: f64) -> Self {
        Self { value, abs_tolerance: 4.0 * f64::EPSILON * value.abs().max(1.0), provenance: Provenance::ClosedForm, error_estimate: 0.0 }
    }

    /// Runs `f(tol)` and `f(tol/16)`, keeps the finer value and records the gap.
    fn step_halved<F: FnMut(f64) -> Result<f64>>(tol: f64, mut f: F) -> Result<Self> {
        let coarse = f(tol)?;
        let fine = f(tol / 16.0)?;
        let gap = (fine - coarse).abs();
        Ok(Self { value: fine, abs_tolerance: tol.max(gap), provenance: Provenance::Quadrature, error_estimate: gap })
    }

    pub fn contains(&self, x: f64) -> bool {
        (x - self.value).abs() <= self.abs_tolerance
    }
}

/// Wedge-geometry parameters `R0(t) = alpha + beta·t` inside `r = r1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MovingSphere {
    pub alpha: f64,
    pub beta: f64,
    pub r1: f64,
}

impl MovingSphere {
    pub fn new(alpha: f64, beta: f64, r1: f64) -> Result<Self> {
        if !(r1 > 0.0) || !(beta.abs() < 1.0) {
            return Err(Error::Domain(format!("moving sphere needs r1 > 0 and |beta| < 1, got r1={r1}, beta={beta}")));
        }
        Ok(Self { alpha, beta, r1 })
    }

    pub fn r0(&self, t: f64) -> f64 {
        self.alpha + self.beta * t
    }

    /// Last emission time whose radial ray still reaches the inner sphere by `t_final`.
    pub fn tmax(&self, t_final: f64) -> Result<OracleValue> {
        let r0 = self.r0(t_final);
        let radicand = r0 * r0 * self.beta * self.beta - r0 * r0 + self.r1 * self.r1;
        if radicand < 0.0 {
            return Err(Error::Domain(format!("negative radicand {radicand:e} in the last emission time")));
        }
        Ok(OracleValue::closed(t_final - r0 * self.beta - radicand.sqrt()))
    }

    /// Largest direction cosine at emission time `t` that still hits the inner sphere.
    pub fn mu_max(&self, t: f64) -> f64 {
        let r0 = self.r0(t);
        let b = self.beta;
        (b * r0 - ((1.0 - b * b) * (self.r1 * self.r1 - r0 * r0)).max(0.0).sqrt()) / self.r1
    }

    /// Arrival time on the inner sphere, or `None` if the ray misses it.
    pub fn tau(&self, t: f64, mu: f64) -> Option<f64> {
        let r0 = self.r0(t);
        let b = self.beta;
        let a = 1.0 - b * b;
        let half_b = self.r1 * mu - b * r0;
        let c = self.r1 * self.r1 - r0 * r0;
        let disc = half_b * half_b - a * c;
        if disc < 0.0 || half_b >= 0.0 {
            return None;
        }
        // Smaller root, written to avoid cancellation.
        let s = c / (-half_b + disc.sqrt());
        (s >= 0.0).then_some(t + s)
    }
}

pub fn exact_tmax(alpha: f64, beta: f64, r1: f64, t_final: f64) -> Result<OracleValue> {
    MovingSphere::new(alpha, beta, r1)?.tmax(t_final)
}

pub fn mu_max(t: f64, alpha: f64, beta: f64, r1: f64) -> f64 {
    MovingSphere { alpha, beta, r1 }.mu_max(t)
}

/// Inner-sphere flux of a unit Lambert inflow through vacuum, source on `[0, T_max]`.
pub fn exact_flux_streaming(alpha: f64, beta: f64, r1: f64, t_final: f64) -> Result<OracleValue> {
    let geo = MovingSphere::new(alpha, beta, r1)?;
    let tmax = geo.tmax(t_final)?.value;
    OracleValue::step_halved(1e-11, |tol| {
        adaptive_simpson(
            |t| {
                let m = geo.mu_max(t);
                0.5 * (1.0 - m * m)
            },
            0.0,
            tmax,
            tol,
        )
    })
}

/// As [`exact_flux_streaming`] with a purely absorbing medium of rate `kappa_t`.
pub fn exact_flux_absorbing(alpha: f64, beta: f64, r1: f64, kappa_t: f64, t_final: f64) -> Result<OracleValue> {
    let geo = MovingSphere::new(alpha, beta, r1)?;
    let tmax = geo.tmax(t_final)?.value;
    OracleValue::step_halved(1e-9, |tol| {
        let failure: Cell<Option<Error>> = Cell::new(None);
        let inner_tol = tol / tmax.max(1.0);
        let outer = adaptive_simpson(
            |t| {
                let m = geo.mu_max(t);
                // μ = μ(t) − v² removes the square-root behaviour at the wedge tip.
                let v_end = (m + 1.0).max(0.0).sqrt();
                let inner = adaptive_simpson(
                    |v| {
                        let mu = m - v * v;
                        match geo.tau(t, mu) {
                            Some(tau) => 2.0 * v * mu.abs() * (-kappa_t * (tau - t)).exp(),
                            None => 0.0,
                        }
                    },
                    0.0,
                    v_end,
                    inner_tol,
                );
                inner.unwrap_or_else(|e| {
                    failure.set(Some(e));
                    0.0
                })
            },
            0.0,
            tmax,
            tol,
        )?;
        match failure.into_inner() {
            Some(e) => Err(e),
            None => Ok(outer),
        }
    })
}

/// Flux predicted by the adjoint identity: `T` times the importance-weighted
/// boundary inflow on the table's direction mesh.
pub fn duality_flux<T: Real>(table: &ImportanceTable<T>, t_final: T) -> OracleValue {
    OracleValue::closed((t_final * table.boundary_emission_weight()).to_f64_lossy())
}

/// Scalar flux at `r` from a unit isotropic source on the sphere `r_source`
/// in an infinite pure absorber, by quadrature over the arrival direction.
pub fn uncollided_shell_flux(r: f64, r_source: f64, kappa_t: f64) -> Result<f64> {
    Ok(uncollided_shell_flux_checked(r, r_source, kappa_t)?.value)
}

/// [`uncollided_shell_flux`] with its step-halving error estimate.
pub fn uncollided_shell_flux_checked(r: f64, r_source: f64, kappa_t: f64) -> Result<OracleValue> {
    check_shell(r, r_source, kappa_t)?;
    let rs = r_source;
    let k = kappa_t;
    if r > rs {
        // Rays arriving from the source sphere; y = rs·sinθ is the impact parameter.
        OracleValue::step_halved(1e-10, |tol| {
            let integral = adaptive_gauss(
                |th| {
                    let (s, c) = th.sin_cos();
                    let x = (r * r - rs * rs * s * s).sqrt();
                    s / x * ((-k * (x - rs * c)).exp() + (-k * (x + rs * c)).exp())
                },
                0.0,
                std::f64::consts::FRAC_PI_2,
                tol * 8.0 * std::f64::consts::PI * r,
            )?;
            Ok(integral / (8.0 * std::f64::consts::PI * r))
        })
    } else {
        OracleValue::step_halved(1e-10, |tol| {
            let f = |mu: f64| {
                let w = (rs * rs - r * r * (1.0 - mu * mu)).sqrt();
                (-k * (r * mu + w)).exp() / w
            };
            let scale = 8.0 * std::f64::consts::PI * rs;
            let integral = adaptive_gauss(f, -1.0, 0.0, 0.5 * tol * scale)? + adaptive_gauss(f, 0.0, 1.0, 0.5 * tol * scale)?;
            Ok(integral / scale)
        })
    }
}

/// Closed form of the same flux:
/// `(E1(κ|r−rs|) − E1(κ(r+rs))) / (8π r rs)`, with the logarithmic limit at κ = 0.
pub fn uncollided_shell_flux_closed(r: f64, r_source: f64, kappa_t: f64) -> Result<f64> {
    check_shell(r, r_source, kappa_t)?;
    let rs = r_source;
    if r == 0.0 {
        return Ok((-kappa_t * rs).exp() / (4.0 * std::f64::consts::PI * rs * rs));
    }
    let g = if kappa_t == 0.0 {
        ((r + rs) / (r - rs).abs()).ln()
    } else {
        e1(kappa_t * (r - rs).abs())? - e1(kappa_t * (r + rs))?
    };
    Ok(g / (8.0 * std::f64::consts::PI * r * rs))
}

/// Volume average of the shell-source flux over `a ≤ r ≤ b`; finite even if
/// the cell contains the source sphere.
pub fn uncollided_shell_cell_average(a: f64, b: f64, r_source: f64, kappa_t: f64) -> Result<OracleValue> {
    if !(0.0 <= a && a < b) {
        return Err(Error::Domain(format!("bad cell [{a}, {b}]")));
    }
    let rs = r_source;
    let volume = 4.0 / 3.0 * std::f64::consts::PI * (b * b * b - a * a * a);
    let density = |r: f64| -> f64 {
        let r = r.max(0.0);
        4.0 * std::f64::consts::PI * r * r * uncollided_shell_flux_closed(r, rs, kappa_t).unwrap_or(0.0)
    };
    OracleValue::step_halved(1e-11, |tol| {
        let mut total = 0.0;
        if rs > a && rs < b {
            // r = rs ∓ t² turns the logarithmic peak into t·log t.
            total += adaptive_gauss(|t| 2.0 * t * density(rs - t * t), 0.0, (rs - a).sqrt(), 0.5 * tol * volume)?;
            total += adaptive_gauss(|t| 2.0 * t * density(rs + t * t), 0.0, (b - rs).sqrt(), 0.5 * tol * volume)?;
        } else if rs == a {
            total += adaptive_gauss(|t| 2.0 * t * density(rs + t * t), 0.0, (b - rs).sqrt(), tol * volume)?;
        } else if rs == b {
            total += adaptive_gauss(|t| 2.0 * t * density(rs - t * t), 0.0, (rs - a).sqrt(), tol * volume)?;
        } else {
            total += adaptive_gauss(density, a, b, tol * volume)?;
        }
        Ok(total / volume)
    })
}

fn check_shell(r: f64, r_source: f64, kappa_t: f64) -> Result<()> {
    if !(r_source > 0.0) || !(r >= 0.0) || !(kappa_t >= 0.0) {
        return Err(Error::Domain(format!("shell flux needs r ≥ 0, r_source > 0, kappa_t ≥ 0 (r={r}, r_source={r_source}, kappa_t={kappa_t})")));
    }
    if r == r_source {
        return Err(Error::SingularPoint(r));
    }
    Ok(())
}

fn e1(x: f64) -> Result<f64> {
    Ok(-expint_ei(-x)?)
}
