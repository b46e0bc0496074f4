//! Exponential integral on the negative real axis.
//!
//! Every Ei evaluation in the adjoint kernels goes through [`expint_ei`].

use crate::error::{Error, Result};
use crate::real::Real;

/// |x| at or below which the power series is used; above it, the continued
/// fraction. The series loses digits to cancellation once |x| grows past a
/// few units, and the continued fraction needs many terms below 1.
const SERIES_LIMIT: f64 = 1.5;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const MAX_TERMS: usize = 500;

/// Ei(x) = -∫_{-x}^∞ e^{-t}/t dt for x < 0.
///
/// Returns a finite, strictly negative value with relative error of order
/// machine epsilon (below `1e-12` in `f64`).
pub fn expint_ei<T: Real>(x: T) -> Result<T> {
    if x.is_nan() || x >= T::zero() {
        return Err(Error::Domain(format!("Ei requires x < 0, got {x:e}")));
    }
    if x > -T::lit(1e-300) {
        return Err(Error::OverflowToNegInfinity(x.to_f64_lossy()));
    }
    let z = -x;
    let e1 = if z <= T::lit(SERIES_LIMIT) {
        e1_series(z)
    } else {
        e1_continued_fraction(z)
    };
    Ok(-e1)
}

/// E1(z) = -γ - ln z - Σ_{k≥1} (-z)^k / (k·k!)
fn e1_series<T: Real>(z: T) -> T {
    let eps = T::epsilon();
    let mut sum = T::zero();
    let mut fact = T::one();
    for k in 1..MAX_TERMS {
        let kf = T::from_usize_lossy(k);
        fact = fact * (-z) / kf;
        let term = fact / kf;
        sum = sum + term;
        if term.abs() < eps * sum.abs() {
            break;
        }
    }
    -T::lit(EULER_GAMMA) - z.ln() - sum
}

/// Modified Lentz evaluation of E1(z) = e^{-z} / (z + 1 - 1²/(z + 3 - 2²/(z + 5 - ...))).
fn e1_continued_fraction<T: Real>(z: T) -> T {
    let tiny = T::min_positive_value() / T::epsilon();
    let eps = T::epsilon();
    let two = T::lit(2.0);
    let mut b = z + T::one();
    let mut c = T::one() / tiny;
    let mut d = T::one() / b;
    let mut h = d;
    for i in 1..MAX_TERMS {
        let fi = T::from_usize_lossy(i);
        let a = -fi * fi;
        b = b + two;
        d = T::one() / (a * d + b);
        c = b + a / c;
        let del = c * d;
        h = h * del;
        if (del - T::one()).abs() < eps {
            break;
        }
    }
    h * (-z).exp()
}
