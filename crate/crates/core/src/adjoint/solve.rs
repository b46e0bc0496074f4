use crate::error::Result;
use crate::linalg::{DenseMatrix, Lu};
use crate::real::Real;

use super::assembly::{assemble_matrix, assemble_rhs};
use super::mesh::RadialMesh;

/// Solution of `(Id − A)φ = b` together with the system it came from.
#[derive(Debug, Clone)]
pub struct PhiSolution<T> {
    pub phi: Vec<T>,
    pub rhs: Vec<T>,
    pub matrix: DenseMatrix<T>,
    pub residual_norm: T,
}

pub fn solve_phi<T: Real>(matrix: DenseMatrix<T>, rhs: Vec<T>) -> Result<PhiSolution<T>> {
    let n = matrix.dim();
    assert_eq!(rhs.len(), n, "matrix and right-hand side sizes differ");
    let mut m = DenseMatrix::identity(n);
    for i in 0..n {
        for j in 0..n {
            m[(i, j)] = m[(i, j)] - matrix[(i, j)];
        }
    }
    let phi = if rhs.iter().all(|v| *v == T::zero()) {
        vec![T::zero(); n]
    } else {
        Lu::factor(m.clone())?.solve(&rhs)?
    };
    let residual_norm = m
        .mul_vec(&phi)
        .iter()
        .zip(&rhs)
        .fold(T::zero(), |acc, (a, b)| acc.max((*a - *b).abs()));
    let floor = -T::lit(1e-12);
    if let Some((j, v)) = phi.iter().enumerate().find(|(_, v)| **v < floor) {
        log::warn!("negative phi {v:e} in cell {j}; the assembled system is suspect");
    }
    Ok(PhiSolution { phi, rhs, matrix, residual_norm })
}

/// Assembles and solves on `mesh` in one go.
pub fn solve_adjoint<T: Real>(mesh: &RadialMesh<T>, kappa_s: T, kappa_t: T) -> Result<PhiSolution<T>> {
    let rhs = assemble_rhs(mesh, kappa_s, kappa_t)?;
    let matrix = assemble_matrix(mesh, kappa_s, kappa_t)?;
    solve_phi(matrix, rhs)
}
