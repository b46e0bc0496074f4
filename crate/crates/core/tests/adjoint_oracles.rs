//! Adjoint-solver quantities checked against quadratures of their defining
//! integrals, written without the solver's closed forms.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use shellmc::adjoint::{
    assemble_matrix, assemble_outer, assemble_rhs, build_importance, kernel, planar_eigenvalue, solve_adjoint,
    uncollided_inner, uncollided_outer, DirectionMesh, RadialMesh,
};
use shellmc::quadrature::adaptive_gauss;
use shellmc::specfun::expint_ei;

/// E1(z) = e^{-z} ∫_0^∞ exp(-z(e^w - 1)) dw, truncated where the integrand drops below e^{-50}.
fn e1_by_quadrature(z: f64) -> f64 {
    let w_max = (1.0 + 50.0 / z).ln();
    let f = |w: f64| (-z * w.exp_m1()).exp();
    (-z).exp() * adaptive_gauss(f, 0.0, w_max, 1e-16).unwrap()
}

#[test]
fn ei_matches_quadrature_on_log_grid() {
    let mut worst = 0.0f64;
    for k in 0..=300 {
        let z = 10f64.powf(-6.0 + k as f64 * (30f64.log10() + 6.0) / 300.0);
        let got = expint_ei(-z).unwrap();
        let want = -e1_by_quadrature(z);
        worst = worst.max(((got - want) / want).abs());
    }
    assert!(worst <= 1e-12, "worst relative error {worst:e}");
}

#[test]
fn ei_reference_points() {
    let v = expint_ei(-1.0f64).unwrap();
    assert!((v / -0.219_383_934_395_520_27 - 1.0).abs() <= 1e-12);
    let v = expint_ei(-10.0f64).unwrap();
    assert!((v / -4.156_968_929_685_324e-6 - 1.0).abs() <= 1e-10);
}

#[test]
fn ei_is_negative_and_decreasing() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..10_000 {
        let a = -30.0 * rng.random::<f64>().powi(3) - 1e-9;
        let b = -30.0 * rng.random::<f64>().powi(3) - 1e-9;
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        if lo == hi {
            continue;
        }
        let (elo, ehi) = (expint_ei(lo).unwrap(), expint_ei(hi).unwrap());
        assert!(elo < 0.0 && ehi < 0.0);
        assert!(elo > ehi, "Ei({lo}) = {elo} vs Ei({hi}) = {ehi}");
    }
}

fn mu_grazing(r: f64, r0: f64) -> f64 {
    -(1.0 - r0 * r0 / (r * r)).sqrt()
}

#[test]
fn inner_source_matches_direct_angular_integral() {
    let (r, r0, ks, kt) = (0.55, 0.1, 0.9, 1.0);
    let md = mu_grazing(r, r0);
    // μ = μ_d − t² removes the square-root behaviour at the grazing direction.
    let f = |t: f64| {
        let mu = md - t * t;
        let w = (r * r * mu * mu - r * r + r0 * r0).max(0.0).sqrt();
        2.0 * t * (kt * (r * mu + w)).exp()
    };
    let want = 0.5 * ks * r * adaptive_gauss(f, 0.0, (md + 1.0).sqrt(), 1e-15).unwrap();
    let got = uncollided_inner(r, r0, ks, kt).unwrap();
    assert!(((got - want) / want).abs() <= 1e-8, "{got} vs {want}");
}

#[test]
fn outer_escape_matches_direct_angular_integral() {
    for &(r, r0, r1, kt) in &[(0.55, 0.1, 1.0, 1.0), (0.2, 0.1, 1.0, 3.0), (0.95, 0.3, 1.0, 0.5)] {
        let ks = 0.7;
        let md = mu_grazing(r, r0);
        let f = |mu: f64| (kt * (r * mu - (r * r * mu * mu - r * r + r1 * r1).sqrt())).exp();
        let want = 0.5 * ks * r * adaptive_gauss(f, md, 1.0, 1e-15).unwrap();
        let got = uncollided_outer(r, r0, r1, ks, kt).unwrap();
        assert!(((got - want) / want).abs() <= 1e-9, "r = {r}: {got} vs {want}");
    }
}

/// `(r κ_s / 2) ∫ dμ ∫ e^{-κ_t s} / r(s) ds` over path points inside `[a, b]`,
/// starting at `r` and stopping at the inner or outer sphere.
fn scattering_coupling(r: f64, a: f64, b: f64, r0: f64, r1: f64, ks: f64, kt: f64) -> f64 {
    let along_direction = |mu: f64| -> f64 {
        let x0 = r * mu;
        let y = r * ((1.0 - mu) * (1.0 + mu)).sqrt();
        let x_end = if y < r0 && x0 < 0.0 {
            -(r0 * r0 - y * y).sqrt()
        } else {
            (r1 * r1 - y * y).sqrt()
        };
        if b <= y {
            return 0.0;
        }
        let outer = (b * b - y * y).sqrt();
        let inner = (a * a - y * y).max(0.0).sqrt();
        let mut total = 0.0;
        for (lo, hi) in [(-outer, -inner), (inner, outer)] {
            let (lo, hi) = (lo.max(x0), hi.min(x_end));
            if hi > lo {
                let g = |x: f64| (-kt * (x - x0)).exp() / (x * x + y * y).sqrt();
                total += adaptive_gauss(g, lo, hi, 1e-15).unwrap();
            }
        }
        total
    };
    let mut cuts = vec![-1.0, 1.0, mu_grazing(r, r0)];
    for e in [a, b] {
        if e < r {
            let m = (1.0 - e * e / (r * r)).sqrt();
            cuts.extend([-m, m]);
        }
    }
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let integral: f64 = cuts
        .windows(2)
        .map(|w| adaptive_gauss(along_direction, w[0], w[1], 1e-13).unwrap())
        .sum();
    0.5 * ks * r * integral
}

#[test]
fn kernel_matches_brute_force_transport() {
    let (r0, r1, ks, kt) = (0.1, 1.0, 0.9, 1.0);
    for &(rj, ri) in &[(0.7, 0.3), (0.3, 0.7), (0.45, 0.2)] {
        let dr = 1e-3;
        let (a, b) = (ri - 0.5 * dr, ri + 0.5 * dr);
        let brute = scattering_coupling(rj, a, b, r0, r1, ks, kt);
        let exact_cell = adaptive_gauss(|rp| kernel(rj, rp, r0, ks, kt).unwrap(), a, b, 1e-18).unwrap();
        assert!(((brute - exact_cell) / exact_cell).abs() <= 1e-8, "{brute} vs {exact_cell}");
        let collocated = dr * kernel(rj, ri, r0, ks, kt).unwrap();
        assert!(((brute - collocated) / collocated).abs() <= 1e-6, "{brute} vs {collocated}");
    }
}

#[test]
fn matrix_entries_are_collocated_kernel() {
    let m = RadialMesh::<f64>::uniform(0.1, 1.0, 18).unwrap();
    let a = assemble_matrix(&m, 0.9, 1.0).unwrap();
    let c = m.centers();
    for (j, i) in [(3, 11), (11, 3), (0, 17), (17, 16)] {
        let want = m.width(i) * kernel(c[j], c[i], 0.1, 0.9, 1.0).unwrap();
        assert!((a[(j, i)] - want).abs() <= 1e-15 * want);
    }
}

#[test]
fn diagonal_closure_tracks_the_self_cell_integral() {
    // The closure is exact for a constant importance; the direct singular
    // self-cell integral agrees up to the mesh discretization.
    let n = 400;
    let m = RadialMesh::<f64>::uniform(0.1, 1.0, n).unwrap();
    let a = assemble_matrix(&m, 0.9, 1.0).unwrap();
    let j = 150;
    let rj = m.centers()[j];
    let (lo, hi) = (m.edges()[j], m.edges()[j + 1]);
    let k = |rp: f64| kernel(rj, rp, 0.1, 0.9, 1.0).unwrap() * rp / rj;
    let direct = adaptive_gauss(k, lo, rj, 1e-14).unwrap() + adaptive_gauss(k, rj, hi, 1e-14).unwrap();
    let closure = a[(j, j)];
    assert!(((closure - direct) / direct).abs() < 0.05, "{closure} vs {direct}");
}

#[test]
fn row_identity_and_sign_structure() {
    for &(ks, kt, r0) in &[(0.9, 1.0, 0.1), (0.1, 1.0, 0.1), (0.5, 4.0, 0.4)] {
        let m = RadialMesh::<f64>::uniform(r0, 1.0, 60).unwrap();
        let a = assemble_matrix(&m, ks, kt).unwrap();
        let b = assemble_rhs(&m, ks, kt).unwrap();
        let c = assemble_outer(&m, ks, kt).unwrap();
        let rc = m.centers();
        for j in 0..60 {
            assert!(b[j] >= 0.0 && c[j] >= 0.0);
            let mut s = 0.0;
            for i in 0..60 {
                if i != j {
                    assert!(a[(j, i)] >= 0.0);
                }
                s += a[(j, i)] * rc[i];
            }
            let lhs = rc[j] * ks;
            assert!((lhs - (b[j] + c[j] + kt * s)).abs() <= 1e-12 * lhs);
        }
    }
}

#[test]
fn phi_matches_neumann_iteration() {
    let m = RadialMesh::<f64>::uniform(0.1, 1.0, 90).unwrap();
    let sol = solve_adjoint(&m, 0.9, 1.0).unwrap();
    let mut phi = vec![0.0; 90];
    for _ in 0..10_000 {
        let next: Vec<f64> = sol.matrix.mul_vec(&phi).iter().zip(&sol.rhs).map(|(x, y)| x + y).collect();
        let change = next.iter().zip(&phi).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
        phi = next;
        if change < 1e-15 {
            break;
        }
    }
    let diff = phi.iter().zip(&sol.phi).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
    assert!(diff <= 1e-10, "{diff:e}");
    let bmax = sol.rhs.iter().fold(0.0f64, |m, v| m.max(*v));
    assert!(sol.residual_norm <= 1e-10 * bmax);
    assert!(sol.phi.iter().all(|&v| v >= 0.0));
}

/// Importance at (r, μ) with φ piecewise constant on `edges`, by adaptive
/// quadrature between analytically located cell crossings.
fn importance_by_quadrature(r: f64, mu: f64, phi: &[f64], edges: &[f64], kt: f64) -> f64 {
    let (r0, r1) = (edges[0], *edges.last().unwrap());
    let x0 = r * mu;
    let y = r * ((1.0 - mu) * (1.0 + mu)).sqrt();
    let hits = y < r0 && x0 < 0.0;
    let x_end = if hits { -(r0 * r0 - y * y).sqrt() } else { (r1 * r1 - y * y).sqrt() };
    let mut cuts = vec![x0, x_end];
    if x0 < 0.0 && x_end > 0.0 {
        cuts.push(0.0);
    }
    for &e in edges {
        if e > y {
            let h = (e * e - y * y).sqrt();
            cuts.extend([-h, h].into_iter().filter(|v| *v > x0 && *v < x_end));
        }
    }
    cuts.sort_by(f64::total_cmp);
    let mut total = if hits { (kt * (x0 - x_end)).exp() } else { 0.0 };
    for w in cuts.windows(2) {
        if w[1] <= w[0] {
            continue;
        }
        let xm = 0.5 * (w[0] + w[1]);
        let rm = (xm * xm + y * y).sqrt();
        let cell = edges.partition_point(|e| *e <= rm).saturating_sub(1).min(phi.len() - 1);
        let g = |x: f64| (kt * (x0 - x)).exp() / (x * x + y * y).sqrt();
        total += phi[cell] * adaptive_gauss(g, w[0], w[1], 1e-12).unwrap();
    }
    total
}

/// Average of the importance over `[lo, hi]` in μ at radius `r`, splitting
/// the adaptive quadrature wherever a chord grazes a sphere.
fn cell_average_by_quadrature(r: f64, lo: f64, hi: f64, phi: &[f64], edges: &[f64], kt: f64, abs_weight: bool) -> f64 {
    let mut cuts = vec![lo, hi];
    for &e in edges {
        if e <= r {
            let m = (1.0 - (e / r).powi(2)).max(0.0).sqrt();
            cuts.extend([-m, m].into_iter().filter(|v| *v > lo && *v < hi));
        }
    }
    cuts.sort_by(f64::total_cmp);
    let f = |mu: f64| {
        let v = importance_by_quadrature(r, mu, phi, edges, kt);
        if abs_weight { v * mu.abs() } else { v }
    };
    let total: f64 = cuts
        .windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| adaptive_gauss(f, w[0], w[1], 1e-11 * (w[1] - w[0])).unwrap())
        .sum();
    let norm = if abs_weight { 0.5 * (lo * lo - hi * hi).abs() } else { hi - lo };
    total / norm
}

#[test]
fn table_matches_quadrature_reconstruction() {
    let (ks, kt) = (0.9, 1.0);
    let rm = RadialMesh::<f64>::uniform(0.1, 1.0, 90).unwrap();
    let dm = DirectionMesh::new(24).unwrap();
    let table = build_importance(&rm, &dm, ks, kt).unwrap();
    let e = dm.edges();
    let mut worst = 0.0f64;
    // Every fifth radial cell keeps the adaptive oracle affordable.
    for (j, &r) in rm.centers().iter().enumerate().step_by(5) {
        for l in 0..dm.n_cells() {
            let want = cell_average_by_quadrature(r, e[l], e[l + 1], table.phi(), rm.edges(), kt, false);
            let got = table.importance(j, l);
            worst = worst.max(((got - want) / want).abs());
            assert!(table.kappa_s_tilde(j, l) >= 0.0 && table.kappa_t_tilde(j, l) >= 0.0);
        }
        let cdf = table.direction_cdf(j);
        assert!(cdf.windows(2).all(|w| w[1] >= w[0]));
        assert!((cdf[cdf.len() - 1] - 1.0).abs() <= 1e-12);
    }
    assert!(worst <= 1e-6, "worst relative error {worst:e}");
    assert!(table.flagged().is_empty());
    let mut moment = 0.0;
    for l in 0..dm.n_cells() / 2 {
        let avg = cell_average_by_quadrature(1.0, e[l], e[l + 1], table.phi(), rm.edges(), kt, true);
        let want_l = avg * 0.5 * (e[l] * e[l] - e[l + 1] * e[l + 1]);
        moment += want_l;
        assert!(((table.boundary_importance(l) - avg) / avg).abs() <= 1e-6);
    }
    assert!(((table.boundary_emission_weight() - moment) / moment).abs() <= 1e-6);
}

#[test]
fn rate_mismatch_shrinks_under_refinement() {
    // |κ̃_t − κ̃_s| / κ̃_s is the same in every direction cell of a radial
    // cell; its maximum over cells measures how far the tabulated importance
    // is from an exact adjoint solution.
    let (ks, kt) = (0.9, 1.0);
    let mut prev = f64::INFINITY;
    for n in [15, 30, 60] {
        let rm = RadialMesh::<f64>::uniform(0.1, 1.0, n).unwrap();
        let dm = DirectionMesh::new(n).unwrap();
        let t = build_importance(&rm, &dm, ks, kt).unwrap();
        let mut worst = 0.0f64;
        for j in 0..n {
            for l in 0..n {
                let (a, b) = (t.kappa_t_tilde(j, l), t.kappa_s_tilde(j, l));
                worst = worst.max((a - b).abs() / b);
            }
        }
        assert!(worst < prev, "n = {n}: {worst} not below {prev}");
        prev = worst;
    }
    assert!(prev < 2e-4);
}

#[test]
fn planar_eigenvalue_references() {
    let e = planar_eigenvalue(0.9f64, 1.0).unwrap();
    assert!((e.k - 0.525_430).abs() <= 1e-5);
    let e = planar_eigenvalue(0.5f64, 1.0).unwrap();
    assert!((e.k - 0.957_504).abs() <= 1e-5);
    assert_eq!(planar_eigenvalue(1.0f64, 1.0).unwrap().k, 0.0);
    // Independent check of the normalization equation by bisection on K itself.
    let c = 0.9f64;
    let g = |k: f64| c / (2.0 * k) * ((1.0 + k) / (1.0 - k)).ln() - 1.0;
    let (mut lo, mut hi) = (1e-9, 1.0 - 1e-12);
    for _ in 0..100 {
        let m = 0.5 * (lo + hi);
        if g(m) < 0.0 { lo = m } else { hi = m }
    }
    assert!((0.5 * (lo + hi) - planar_eigenvalue(0.9f64, 1.0).unwrap().k).abs() < 1e-12);
}
