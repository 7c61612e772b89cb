//! FPU chain on `Z_N`: symplectic integration, mode energies, packet
//! localization and comparison with the normal-form flow.

pub mod chain;
pub mod compare;
pub mod localization;
pub mod spectrum;

pub use chain::{LatticeState, Potential, Stepper};
pub use compare::{compare_mu_grid, compare_with_normalform, lattice_size, CompareExperiment, CompareReport, MuScan};
pub use localization::{fit_packet, run_localization, LocalizationExperiment, LocalizationReport, PacketFit};
pub use spectrum::{mode_energies, mode_energies_from, ModeSpectrum};

use crate::algebra::AlgebraError;
use crate::kdv::KdvError;

#[derive(Debug, thiserror::Error)]
pub enum LatticeError {
    #[error("invalid lattice configuration: {0}")]
    Config(String),
    #[error("non-finite force at t = {t}")]
    BlowUp { t: f64 },
    #[error("only {0} supported harmonics, at least 4 are needed for a fit")]
    InsufficientModes(usize),
    #[error(transparent)]
    Solver(#[from] KdvError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}
