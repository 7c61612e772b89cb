//! Exact symbolic algebra on periodic densities.

pub mod coeff;
pub mod density;
pub mod eval;
pub mod grade;
pub mod normalize;
pub mod poisson;
pub mod poly;
pub mod serialize;
pub mod variational;

pub use coeff::{parse_coeff, Coeff, CoeffError};
pub use density::{anti, loc, AlgebraError, AtomProduct, Density, Factor, Monomial, Observable, Term, Var};
pub use eval::{EvalError, Evaluator, PeriodicField};
pub use grade::{grade, homogeneous_grade};
pub use poisson::{lie_derivative, poisson_bracket, PoissonStructure, TensorEntry, TensorKind};
pub use poly::{Poly, PowerProduct, Symbol};
pub use variational::{variational_derivative, variational_derivative_obs};
