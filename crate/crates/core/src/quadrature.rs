//! Gauss–Legendre rules and adaptive integrators.

use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::real::Real;

/// Gauss–Legendre nodes and weights on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre<T> {
    nodes: Vec<T>,
    weights: Vec<T>,
}

impl<T: Real> GaussLegendre<T> {
    /// Builds an `n`-point rule by Newton iteration on P_n, in `f64`.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![T::zero(); n];
        let mut weights = vec![T::zero(); n];
        let m = n.div_ceil(2);
        for i in 0..m {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = T::lit(-x);
            nodes[n - 1 - i] = T::lit(x);
            weights[i] = T::lit(w);
            weights[n - 1 - i] = T::lit(w);
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[T] {
        &self.nodes
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    /// ∫_a^b f.
    pub fn integrate<F: FnMut(T) -> T>(&self, a: T, b: T, mut f: F) -> T {
        let half = (b - a) * T::lit(0.5);
        let mid = (b + a) * T::lit(0.5);
        let mut s = T::zero();
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            s = s + *w * f(mid + half * *x);
        }
        s * half
    }

    /// ∫_a^b f split into `panels` equal pieces.
    pub fn integrate_composite<F: FnMut(T) -> T>(&self, a: T, b: T, panels: usize, mut f: F) -> T {
        let h = (b - a) / T::from_usize_lossy(panels);
        (0..panels)
            .map(|k| {
                let lo = a + h * T::from_usize_lossy(k);
                self.integrate(lo, lo + h, &mut f)
            })
            .sum()
    }
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Adaptive Simpson quadrature to absolute tolerance `tol`.
pub fn adaptive_simpson<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, tol: f64) -> Result<f64> {
    const MAX_DEPTH: u32 = 50;
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    let mut ok = true;
    let v = simpson_step(&mut f, a, b, fa, fm, fb, whole, tol, MAX_DEPTH, &mut ok);
    if ok && v.is_finite() {
        Ok(v)
    } else {
        Err(Error::QuadratureNonConvergence { a, b, estimate: v })
    }
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<F: FnMut(f64) -> f64>(
    f: &mut F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
    ok: &mut bool,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if delta.abs() <= 15.0 * tol || delta.abs() <= 8.0 * f64::EPSILON * (left + right).abs() {
        return left + right + delta / 15.0;
    }
    if depth == 0 {
        *ok = false;
        return left + right + delta / 15.0;
    }
    simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1, ok)
        + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1, ok)
}

/// Globally adaptive Gauss–Legendre: keeps bisecting the panel with the
/// largest error estimate (10-point panel vs its two halves) until the
/// summed estimate drops below `tol`.
pub fn adaptive_gauss<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, tol: f64) -> Result<f64> {
    const MAX_PANELS: usize = 200_000;
    let rule = GaussLegendre::<f64>::new(10);
    let mut heap = BinaryHeap::new();
    let push = |heap: &mut BinaryHeap<Panel>, f: &mut F, lo: f64, hi: f64, whole: f64| {
        let m = 0.5 * (lo + hi);
        let left = rule.integrate(lo, m, &mut *f);
        let right = rule.integrate(m, hi, &mut *f);
        let value = left + right;
        let err = (value - whole).abs();
        heap.push(Panel { err, lo, hi, left, right, value });
    };
    let whole = rule.integrate(a, b, &mut f);
    push(&mut heap, &mut f, a, b, whole);
    let mut panels = 1;
    loop {
        let total_err: f64 = heap.iter().map(|p| p.err).sum();
        let total: f64 = heap.iter().map(|p| p.value).sum();
        let noise = 64.0 * f64::EPSILON * heap.iter().map(|p| p.value.abs()).sum::<f64>();
        if total_err <= tol.max(noise) {
            return if total.is_finite() {
                Ok(total)
            } else {
                Err(Error::QuadratureNonConvergence { a, b, estimate: total })
            };
        }
        if panels >= MAX_PANELS {
            return Err(Error::QuadratureNonConvergence { a, b, estimate: total });
        }
        let worst = heap.pop().expect("at least one panel");
        let m = 0.5 * (worst.lo + worst.hi);
        if !(m > worst.lo && m < worst.hi) {
            return Err(Error::QuadratureNonConvergence { a, b, estimate: total });
        }
        push(&mut heap, &mut f, worst.lo, m, worst.left);
        push(&mut heap, &mut f, m, worst.hi, worst.right);
        panels += 1;
    }
}

struct Panel {
    err: f64,
    lo: f64,
    hi: f64,
    left: f64,
    right: f64,
    value: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.err.total_cmp(&other.err).is_eq()
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.err.total_cmp(&other.err)
    }
}
