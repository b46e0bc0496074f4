//! Collocation of the integral equation for φ = r·S on a radial mesh.
//!
//! Row `j` of the system reads
//! `φ_j = b_j + Σ_i A[j][i] φ_i`, where `b_j` collects particles that reach
//! the inner sphere without colliding and `A` is the scattering kernel
//! integrated over each cell.

use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;
use crate::real::Real;
use crate::specfun::expint_ei;

use super::mesh::RadialMesh;

fn check_rates<T: Real>(kappa_s: T, kappa_t: T) -> Result<()> {
    if !(kappa_t > T::zero()) || !(kappa_s >= T::zero()) || kappa_s > kappa_t {
        return Err(Error::Domain(format!(
            "need 0 <= kappa_s <= kappa_t and kappa_t > 0, got {kappa_s:e}, {kappa_t:e}"
        )));
    }
    Ok(())
}

fn ei_checked<T: Real>(x: T) -> Result<T> {
    if !(x < T::zero()) {
        return Err(Error::Numerical(format!(
            "exponential integral evaluated at non-negative argument {x:e}"
        )));
    }
    expint_ei(x)
}

/// Antiderivative in θ of `e^{κθ}·(1 + (rb² − r²)/θ²)`.
fn chord_antiderivative<T: Real>(theta: T, r: T, rb: T, kappa_t: T) -> Result<T> {
    let e = (kappa_t * theta).exp();
    let ei = ei_checked(kappa_t * theta)?;
    Ok(e / kappa_t + (rb - r) * (rb + r) * (kappa_t * ei - e / theta))
}

/// `(κ_s r/2) ∫ exp(−κ_t L(μ)) dμ` over the directions from `r` that reach
/// the inner sphere, `L` being the distance to it.
pub fn uncollided_inner<T: Real>(r: T, r0: T, kappa_s: T, kappa_t: T) -> Result<T> {
    if r0 == T::zero() || kappa_s == T::zero() {
        return Ok(T::zero());
    }
    let theta_a = r0 - r;
    let theta_b = -((r - r0) * (r + r0)).sqrt();
    let fb = chord_antiderivative(theta_b, r, r0, kappa_t)?;
    let fa = chord_antiderivative(theta_a, r, r0, kappa_t)?;
    Ok(kappa_s * T::lit(0.25) * (fb - fa))
}

/// Same as [`uncollided_inner`] for the directions that leave through the outer sphere.
pub fn uncollided_outer<T: Real>(r: T, r0: T, r1: T, kappa_s: T, kappa_t: T) -> Result<T> {
    if kappa_s == T::zero() {
        return Ok(T::zero());
    }
    let theta_a = -((r - r0) * (r + r0)).sqrt() - ((r1 - r0) * (r1 + r0)).sqrt();
    let theta_b = r - r1;
    let fb = chord_antiderivative(theta_b, r, r1, kappa_t)?;
    let fa = chord_antiderivative(theta_a, r, r1, kappa_t)?;
    Ok(kappa_s * T::lit(0.25) * (fb - fa))
}

/// Pointwise kernel: `φ(r)` receives `kernel(r, r')·φ(r') dr'` from scattering at `r'`.
pub fn kernel<T: Real>(r: T, rp: T, r0: T, kappa_s: T, kappa_t: T) -> Result<T> {
    let tangent = ((r - r0) * (r + r0)).sqrt() + ((rp - r0) * (rp + r0)).sqrt();
    let direct = (r - rp).abs();
    let far = ei_checked(-kappa_t * tangent)?;
    let near = ei_checked(-kappa_t * direct)?;
    Ok(kappa_s * T::lit(0.5) * (far - near))
}

pub fn assemble_rhs<T: Real>(mesh: &RadialMesh<T>, kappa_s: T, kappa_t: T) -> Result<Vec<T>> {
    check_rates(kappa_s, kappa_t)?;
    let r0 = mesh.r_inner();
    mesh.centers()
        .iter()
        .map(|&r| uncollided_inner(r, r0, kappa_s, kappa_t))
        .collect()
}

pub fn assemble_outer<T: Real>(mesh: &RadialMesh<T>, kappa_s: T, kappa_t: T) -> Result<Vec<T>> {
    check_rates(kappa_s, kappa_t)?;
    let (r0, r1) = (mesh.r_inner(), mesh.r_outer());
    mesh.centers()
        .iter()
        .map(|&r| uncollided_outer(r, r0, r1, kappa_s, kappa_t))
        .collect()
}

/// Off-diagonal entries by midpoint collocation of [`kernel`]; the diagonal
/// is fixed by requiring that a constant importance be reproduced exactly,
/// i.e. `r_j κ_s = b_j + c_j + κ_t Σ_i A[j][i] r_i`.
pub fn assemble_matrix<T: Real>(mesh: &RadialMesh<T>, kappa_s: T, kappa_t: T) -> Result<DenseMatrix<T>> {
    let b = assemble_rhs(mesh, kappa_s, kappa_t)?;
    let c = assemble_outer(mesh, kappa_s, kappa_t)?;
    let n = mesh.n_cells();
    let r0 = mesh.r_inner();
    let rc = mesh.centers();
    let mut a = DenseMatrix::zeros(n);
    if kappa_s == T::zero() {
        return Ok(a);
    }
    for j in 0..n {
        let mut off = T::zero();
        for i in 0..n {
            if i == j {
                continue;
            }
            let v = mesh.width(i) * kernel(rc[j], rc[i], r0, kappa_s, kappa_t)?;
            a[(j, i)] = v;
            off = off + v * rc[i];
        }
        a[(j, j)] = (rc[j] * kappa_s - b[j] - c[j]) / (kappa_t * rc[j]) - off / rc[j];
    }
    for j in 0..n {
        for i in 0..n {
            if !a[(j, i)].is_finite() {
                return Err(Error::Numerical(format!("non-finite matrix entry ({j}, {i})")));
            }
        }
    }
    Ok(a)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn no_scattering_means_no_coupling() {
        let m = RadialMesh::uniform(0.1f64, 1.0, 12).unwrap();
        assert!(assemble_rhs(&m, 0.0, 1.0).unwrap().iter().all(|&v| v == 0.0));
        let a = assemble_matrix(&m, 0.0, 1.0).unwrap();
        assert_eq!(a, DenseMatrix::zeros(12));
    }

    #[test]
    fn rejects_bad_rates() {
        let m = RadialMesh::uniform(0.1f64, 1.0, 4).unwrap();
        assert!(assemble_rhs(&m, 1.1, 1.0).is_err());
        assert!(assemble_rhs(&m, 0.5, 0.0).is_err());
    }

    #[test]
    fn off_diagonal_symmetry_on_uniform_mesh() {
        let m = RadialMesh::uniform(0.1f64, 1.0, 20).unwrap();
        let a = assemble_matrix(&m, 0.9, 1.0).unwrap();
        for i in 0..20 {
            for j in 0..20 {
                if i != j {
                    assert!((a[(i, j)] - a[(j, i)]).abs() <= 1e-13 * a[(i, j)].abs());
                    assert!(a[(i, j)] >= 0.0);
                }
            }
        }
    }

    #[test]
    fn row_identity_holds() {
        let m = RadialMesh::uniform(0.1f64, 1.0, 30).unwrap();
        let (ks, kt) = (0.9, 1.0);
        let a = assemble_matrix(&m, ks, kt).unwrap();
        let b = assemble_rhs(&m, ks, kt).unwrap();
        let c = assemble_outer(&m, ks, kt).unwrap();
        let rc = m.centers();
        for j in 0..30 {
            let s: f64 = (0..30).map(|i| a[(j, i)] * rc[i]).sum();
            let lhs = rc[j] * ks;
            let rhs = b[j] + c[j] + kt * s;
            assert!((lhs - rhs).abs() <= 1e-12 * lhs, "row {j}: {lhs} vs {rhs}");
        }
    }
}
