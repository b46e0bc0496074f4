//! Piecewise-constant importance I(r, μ) and the biased transport rates derived from it.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{for_each_chord, impact_parameter};
use crate::quadrature::GaussLegendre;
use crate::real::Real;

use super::mesh::{DirectionMesh, RadialMesh};

const CHORD_ORDER: usize = 8;
const DIRECTION_ORDER: usize = 8;

/// Importance at `(r, μ)` reconstructed from the cell values of `φ`:
/// the uncollided chance of reaching the inner sphere plus the source
/// `φ/r` integrated along the forward characteristic.
pub fn evaluate_importance<T: Real>(
    r: T,
    mu: T,
    phi: &[T],
    mesh: &RadialMesh<T>,
    kappa_t: T,
    rule: &GaussLegendre<T>,
) -> T {
    let r0 = mesh.r_inner();
    let r1 = mesh.r_outer();
    let x0 = r * mu;
    let y = impact_parameter(r, mu);
    let hits_inner = r0 > T::zero() && y < r0 && x0 < T::zero();
    let x_end = if hits_inner {
        -((r0 - y) * (r0 + y)).sqrt()
    } else {
        ((r1 - y) * (r1 + y)).max(T::zero()).sqrt()
    };
    let mut total = if hits_inner {
        (kappa_t * (x0 - x_end)).exp()
    } else {
        T::zero()
    };
    for_each_chord(mesh.edges(), x0, x_end, y, |i, xa, xb| {
        if phi[i] != T::zero() {
            let part = rule.integrate(xa, xb, |x| {
                (kappa_t * (x0 - x)).exp() / (x * x + y * y).sqrt()
            });
            total = total + phi[i] * part;
        }
    });
    total
}

/// Directions from radius `r` where `I(r, ·)` is not smooth: grazing the
/// inner sphere and tangent to each mesh edge below `r`. Sorted.
fn direction_kinks<T: Real>(r: T, mesh: &RadialMesh<T>) -> Vec<T> {
    let mut kinks = Vec::with_capacity(2 * mesh.edges().len());
    for &e in mesh.edges() {
        if e > T::zero() && e <= r {
            let q = e / r;
            let m = ((T::one() - q) * (T::one() + q)).max(T::zero()).sqrt();
            kinks.push(-m);
            kinks.push(m);
        }
    }
    kinks.sort_by(|a, b| a.partial_cmp(b).expect("finite kinks"));
    kinks.dedup();
    kinks
}

/// `∫_lo^hi w(μ) I(r, μ) dμ` with `w = 1` or `w = |μ|`, split at the kinks.
#[allow(clippy::too_many_arguments)]
fn integrate_directions<T: Real>(
    r: T,
    lo: T,
    hi: T,
    kinks: &[T],
    phi: &[T],
    mesh: &RadialMesh<T>,
    kappa_t: T,
    chord_rule: &GaussLegendre<T>,
    dir_rule: &GaussLegendre<T>,
    abs_weight: bool,
) -> T {
    let start = kinks.partition_point(|k| *k <= lo);
    let mut pts = Vec::with_capacity(4);
    pts.push(lo);
    pts.extend(kinks[start..].iter().copied().take_while(|k| *k < hi));
    pts.push(hi);
    let is_kink = |v: T| kinks.binary_search_by(|k| k.partial_cmp(&v).expect("finite")).is_ok();
    let eval = |mu: T| {
        let v = evaluate_importance(r, mu, phi, mesh, kappa_t, chord_rule);
        if abs_weight { v * mu.abs() } else { v }
    };
    // I behaves like sqrt(μ − μ_k) next to a tangency direction μ_k; a
    // quadratic (or smoothstep, if both ends are kinks) change of variable
    // makes the integrand smooth there.
    let (two, three, six) = (T::lit(2.0), T::lit(3.0), T::lit(6.0));
    pts.windows(2)
        .map(|w| {
            let (a, b) = (w[0], w[1]);
            let span = b - a;
            match (is_kink(a), is_kink(b)) {
                (false, false) => dir_rule.integrate(a, b, eval),
                (true, false) => dir_rule.integrate(T::zero(), T::one(), |t| two * t * span * eval(a + span * t * t)),
                (false, true) => dir_rule.integrate(T::zero(), T::one(), |t| two * t * span * eval(b - span * t * t)),
                (true, true) => dir_rule.integrate(T::zero(), T::one(), |t| {
                    six * t * (T::one() - t) * span * eval(a + span * t * t * (three - two * t))
                }),
            }
        })
        .sum()
}

/// Importance values per (radial, direction) cell plus everything the
/// biased engine samples from. Immutable once built.
#[derive(Debug, Clone)]
pub struct ImportanceTable<T> {
    rmesh: RadialMesh<T>,
    dmesh: DirectionMesh<T>,
    kappa_s: T,
    kappa_t: T,
    phi: Vec<T>,
    importance: Vec<T>,
    mean_importance: Vec<T>,
    source: Vec<T>,
    direction_cdf: Vec<T>,
    boundary_importance: Vec<T>,
    boundary_cdf: Vec<T>,
    boundary_weight: T,
    flagged: Vec<(usize, usize)>,
}

impl<T: Real> ImportanceTable<T> {
    /// Tabulates the importance at radial cell centers, averaged over each
    /// direction cell. Averaging (rather than sampling the cell center) keeps
    /// the narrow cone of directions that reach the inner sphere uncollided,
    /// so `κ_s⟨I⟩_j` stays consistent with `φ_j / r_j`.
    pub fn build(phi: &[T], rmesh: &RadialMesh<T>, dmesh: &DirectionMesh<T>, kappa_s: T, kappa_t: T) -> Result<Self> {
        assert_eq!(phi.len(), rmesh.n_cells(), "phi and mesh sizes differ");
        let chord_rule = GaussLegendre::new(CHORD_ORDER);
        let dir_rule = GaussLegendre::new(DIRECTION_ORDER);
        let nm = dmesh.n_cells();
        let edges = dmesh.edges();
        let importance: Vec<T> = rmesh
            .centers()
            .par_iter()
            .flat_map_iter(|&r| {
                let kinks = direction_kinks(r, rmesh);
                let (chord_rule, dir_rule) = (&chord_rule, &dir_rule);
                (0..nm).map(move |l| {
                    let (lo, hi) = (edges[l], edges[l + 1]);
                    integrate_directions(r, lo, hi, &kinks, phi, rmesh, kappa_t, chord_rule, dir_rule, false)
                        / (hi - lo)
                })
            })
            .collect();
        let r1 = rmesh.r_outer();
        let kinks = direction_kinks(r1, rmesh);
        let boundary: Vec<T> = (0..nm)
            .map(|l| {
                let lo = edges[l];
                let hi = edges[l + 1].min(T::zero());
                if hi > lo {
                    let m = integrate_directions(r1, lo, hi, &kinks, phi, rmesh, kappa_t, &chord_rule, &dir_rule, true);
                    m / incoming_moment(dmesh, l)
                } else {
                    T::zero()
                }
            })
            .collect();
        let source = phi
            .iter()
            .zip(rmesh.centers())
            .map(|(p, r)| *p / *r)
            .collect();
        Self::assemble(rmesh.clone(), dmesh.clone(), kappa_s, kappa_t, phi.to_vec(), importance, boundary, Some(source))
    }

    /// `I ≡ 1`: the biased engine then reproduces analog transport.
    pub fn uniform(rmesh: &RadialMesh<T>, dmesh: &DirectionMesh<T>, kappa_s: T, kappa_t: T) -> Self {
        let n = rmesh.n_cells() * dmesh.n_cells();
        Self::from_values(rmesh, dmesh, kappa_s, kappa_t, vec![T::one(); n], vec![T::one(); dmesh.n_cells()])
            .expect("uniform importance is valid")
    }

    /// Builds a table from arbitrary non-negative cell values (row-major in
    /// radial cell) and boundary values at the outer sphere.
    pub fn from_values(
        rmesh: &RadialMesh<T>,
        dmesh: &DirectionMesh<T>,
        kappa_s: T,
        kappa_t: T,
        importance: Vec<T>,
        boundary: Vec<T>,
    ) -> Result<Self> {
        assert_eq!(importance.len(), rmesh.n_cells() * dmesh.n_cells());
        assert_eq!(boundary.len(), dmesh.n_cells());
        let phi = vec![T::zero(); rmesh.n_cells()];
        Self::assemble(rmesh.clone(), dmesh.clone(), kappa_s, kappa_t, phi, importance, boundary, None)
    }

    #[allow(clippy::too_many_arguments)]
    fn assemble(
        rmesh: RadialMesh<T>,
        dmesh: DirectionMesh<T>,
        kappa_s: T,
        kappa_t: T,
        phi: Vec<T>,
        mut importance: Vec<T>,
        boundary: Vec<T>,
        source: Option<Vec<T>>,
    ) -> Result<Self> {
        let nr = rmesh.n_cells();
        let nm = dmesh.n_cells();
        if importance.iter().chain(&boundary).any(|v| !(*v >= T::zero()) || !v.is_finite()) {
            return Err(Error::Numerical("importance must be finite and non-negative".into()));
        }
        let floor = T::min_positive_value().max(T::lit(1e-300));
        let mut flagged = Vec::new();
        for j in 0..nr {
            for l in 0..nm {
                let v = &mut importance[j * nm + l];
                if *v < floor {
                    *v = floor;
                    flagged.push((j, l));
                }
            }
        }
        if flagged.len() == importance.len() {
            return Err(Error::DegenerateImportance { cells: flagged });
        }
        let half = T::lit(0.5);
        let mut mean_importance = Vec::with_capacity(nr);
        let mut direction_cdf = Vec::with_capacity(nr * nm);
        for j in 0..nr {
            let row = &importance[j * nm..(j + 1) * nm];
            let total: T = (0..nm).map(|l| row[l] * dmesh.width(l)).sum();
            mean_importance.push(half * total);
            let mut acc = T::zero();
            for (l, &v) in row.iter().enumerate() {
                acc = acc + v * dmesh.width(l) / total;
                direction_cdf.push(acc);
            }
            direction_cdf[j * nm + nm - 1] = T::one();
        }
        let source = source.unwrap_or_else(|| mean_importance.iter().map(|m| kappa_s * *m).collect());
        let mut boundary_cdf = Vec::with_capacity(nm);
        let mut acc = T::zero();
        for (l, b) in boundary.iter().enumerate() {
            acc = acc + *b * incoming_moment(&dmesh, l);
            boundary_cdf.push(acc);
        }
        let boundary_weight = acc;
        if boundary_weight > T::zero() {
            for c in &mut boundary_cdf {
                *c = *c / boundary_weight;
            }
            if let Some(last) = (0..nm).rev().find(|&l| incoming_moment(&dmesh, l) > T::zero()) {
                for c in &mut boundary_cdf[last..] {
                    *c = T::one();
                }
            }
        }
        Ok(Self {
            rmesh,
            dmesh,
            kappa_s,
            kappa_t,
            phi,
            importance,
            mean_importance,
            source,
            direction_cdf,
            boundary_importance: boundary,
            boundary_cdf,
            boundary_weight,
            flagged,
        })
    }

    pub fn rmesh(&self) -> &RadialMesh<T> {
        &self.rmesh
    }

    pub fn dmesh(&self) -> &DirectionMesh<T> {
        &self.dmesh
    }

    pub fn kappa_s(&self) -> T {
        self.kappa_s
    }

    pub fn kappa_t(&self) -> T {
        self.kappa_t
    }

    pub fn phi(&self) -> &[T] {
        &self.phi
    }

    #[inline]
    pub fn importance(&self, j: usize, l: usize) -> T {
        self.importance[j * self.dmesh.n_cells() + l]
    }

    pub fn mean_importance(&self, j: usize) -> T {
        self.mean_importance[j]
    }

    /// Collision rate of the biased walk in cell `(j, l)`.
    #[inline]
    pub fn kappa_s_tilde(&self, j: usize, l: usize) -> T {
        self.kappa_s * self.mean_importance[j] / self.importance(j, l)
    }

    /// `S_j / I_jl`: the total rate implied by the adjoint source. It equals
    /// [`Self::kappa_s_tilde`] for an exact adjoint and is reported as a
    /// diagnostic of the discretization.
    pub fn kappa_t_tilde(&self, j: usize, l: usize) -> T {
        self.source[j] / self.importance(j, l)
    }

    /// Weight decay rate along a flight inside cell `(j, l)`. With a
    /// piecewise-constant importance the streaming part of the adjoint
    /// operator lives entirely in the jumps between cells, so inside a cell
    /// the total rate stays `κ_t`.
    #[inline]
    pub fn attenuation(&self, j: usize, l: usize) -> T {
        self.kappa_t - self.kappa_s_tilde(j, l)
    }

    pub fn direction_cdf(&self, j: usize) -> &[T] {
        let nm = self.dmesh.n_cells();
        &self.direction_cdf[j * nm..(j + 1) * nm]
    }

    /// Post-collision direction in radial cell `j` from two uniforms.
    pub fn sample_direction(&self, j: usize, u_cell: T, u_mu: T) -> (usize, T) {
        let l = pick(self.direction_cdf(j), u_cell);
        let lo = self.dmesh.edges()[l];
        let hi = self.dmesh.edges()[l + 1];
        (l, lo + u_mu * (hi - lo))
    }

    /// `|μ|`-weighted average of the importance on the outer sphere over the
    /// incoming part of direction cell `l`.
    pub fn boundary_importance(&self, l: usize) -> T {
        self.boundary_importance[l]
    }

    /// `∫_{μ<0} |μ| I(R1, μ) dμ`.
    pub fn boundary_emission_weight(&self) -> T {
        self.boundary_weight
    }

    pub fn boundary_emission_cdf(&self) -> &[T] {
        &self.boundary_cdf
    }

    /// Incoming direction at the outer sphere with density ∝ |μ| I(R1, μ).
    pub fn sample_boundary(&self, u_cell: T, u_mu: T) -> Result<(usize, T)> {
        if !(self.boundary_weight > T::zero()) {
            return Err(Error::DegenerateImportance {
                cells: (0..self.dmesh.n_cells()).map(|l| (self.rmesh.n_cells() - 1, l)).collect(),
            });
        }
        let l = pick(&self.boundary_cdf, u_cell);
        let a = -self.dmesh.edges()[l];
        let b = -self.dmesh.edges()[l + 1].min(T::zero());
        let m2 = b * b + u_mu * (a * a - b * b);
        Ok((l, -m2.sqrt().min(a).max(b)))
    }

    /// Cells whose importance underflowed and was clamped.
    pub fn flagged(&self) -> &[(usize, usize)] {
        &self.flagged
    }

    /// Refuses tables whose outermost radial cell contains clamped entries:
    /// particles enter there, so the biased rates would be meaningless.
    pub fn check_usable(&self) -> Result<()> {
        let outer = self.rmesh.n_cells() - 1;
        let bad: Vec<_> = self.flagged.iter().copied().filter(|(j, _)| *j == outer).collect();
        if bad.is_empty() && self.boundary_weight > T::zero() {
            Ok(())
        } else {
            Err(Error::DegenerateImportance { cells: bad })
        }
    }
}

/// `∫ |μ| dμ` over the part of direction cell `l` with μ < 0.
fn incoming_moment<T: Real>(dmesh: &DirectionMesh<T>, l: usize) -> T {
    let lo = dmesh.edges()[l];
    let hi = dmesh.edges()[l + 1].min(T::zero());
    if hi > lo {
        (lo * lo - hi * hi) * T::lit(0.5)
    } else {
        T::zero()
    }
}

fn pick<T: Real>(cdf: &[T], u: T) -> usize {
    let k = cdf.partition_point(|c| *c <= u);
    if k < cdf.len() {
        k
    } else {
        cdf.partition_point(|c| *c < T::one()).min(cdf.len() - 1)
    }
}

/// Convenience wrapper: tabulate from a solved `φ` and fail on unusable tables.
pub fn importance_table<T: Real>(
    phi: &[T],
    rmesh: &RadialMesh<T>,
    dmesh: &DirectionMesh<T>,
    kappa_s: T,
    kappa_t: T,
) -> Result<ImportanceTable<T>> {
    ImportanceTable::build(phi, rmesh, dmesh, kappa_s, kappa_t)
}
