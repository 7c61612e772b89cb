//! Hamiltonian normal forms for weakly nonlinear waves near the 1D wave
//! equation, with FPU lattice and KdV-hierarchy numerics for comparison.

pub mod algebra;
pub mod kdv;
pub mod lattice;
pub mod models;
pub mod normalform;
pub mod spectral;
