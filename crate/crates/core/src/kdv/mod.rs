//! KdV-hierarchy structure and a pseudospectral integrator for periodic
//! evolution equations.

pub mod hierarchy;
pub mod solver;

pub use hierarchy::{hierarchy_match, i0, i1, i3, kappa3, kappa5, kappa5_doubled, vector_field, HierarchyField, MatchReport};
pub use solver::{integrate, FieldSystem, Scheme, SpectralSolverConfig, Trajectory};

use crate::algebra::{AlgebraError, EvalError};

#[derive(Debug, thiserror::Error)]
pub enum KdvError {
    #[error("not KdV at leading order: {0}")]
    NotKdv(String),
    #[error("invalid solver configuration: {0}")]
    Config(String),
    #[error("solution blew up at t = {t}")]
    BlowUp { t: f64 },
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Eval(#[from] EvalError),
}
