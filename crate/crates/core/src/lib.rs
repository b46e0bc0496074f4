//! Grey linear transport in a spherical shell: analog and importance-sampled
//! Monte Carlo, a deterministic adjoint solver, and reference solutions.
//!
//! Everything numerical is generic over [`Real`] (`f32` or `f64`); the
//! `*64` aliases below name the double-precision instantiations used by the
//! command-line tool.

// `!(a > b)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod adjoint;
pub mod biased;
pub mod error;
pub mod geometry;
pub mod linalg;
pub mod oracles;
pub mod quadrature;
pub mod real;
pub mod specfun;
pub mod stats;
pub mod transport;

pub use error::{Error, Result};
pub use real::Real;

pub type ImportanceTable64 = adjoint::ImportanceTable<f64>;
pub type RadialMesh64 = adjoint::RadialMesh<f64>;
pub type DirectionMesh64 = adjoint::DirectionMesh<f64>;
pub type ProblemConfig64 = transport::ProblemConfig<f64>;
pub type TallyResult64 = transport::TallyResult<f64>;
pub type ShellProfile64 = transport::ShellProfile<f64>;
pub type SampleAccumulator64 = stats::SampleAccumulator<f64>;
