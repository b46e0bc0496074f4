//! Deterministic importance function: integral equation for φ, its
//! reconstruction on a (r, μ) grid, and the slab-geometry eigenvalue.

mod assembly;
mod mesh;
mod planar;
mod solve;
mod table;

pub use assembly::{assemble_matrix, assemble_outer, assemble_rhs, kernel, uncollided_inner, uncollided_outer};
pub use mesh::{DirectionMesh, RadialMesh};
pub use planar::{planar_eigenvalue, PlanarEigen};
pub use solve::{solve_adjoint, solve_phi, PhiSolution};
pub use table::{evaluate_importance, importance_table, ImportanceTable};

use crate::error::Result;
use crate::real::Real;

/// Solves for φ on `rmesh` and tabulates the importance on `rmesh × dmesh`.
/// Without scattering φ vanishes and only the uncollided term remains.
pub fn build_importance<T: Real>(
    rmesh: &RadialMesh<T>,
    dmesh: &DirectionMesh<T>,
    kappa_s: T,
    kappa_t: T,
) -> Result<ImportanceTable<T>> {
    let phi = if kappa_s == T::zero() {
        vec![T::zero(); rmesh.n_cells()]
    } else {
        solve_adjoint(rmesh, kappa_s, kappa_t)?.phi
    };
    ImportanceTable::build(&phi, rmesh, dmesh, kappa_s, kappa_t)
}
