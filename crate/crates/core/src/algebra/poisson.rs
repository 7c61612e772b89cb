//! Constant Poisson tensors and brackets of observables.

use super::coeff::Coeff;
use super::density::{AlgebraError, Density, Observable, Var};
use super::variational::variational_derivative_obs;

/// One entry `c·∂ˣᵐ` of a Poisson tensor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TensorEntry {
    pub coeff: Coeff,
    pub order: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TensorKind {
    Standard,
    Gardner,
    Custom,
}

/// Skew-symmetric matrix of constant-coefficient differential operators.
#[derive(Clone, Debug)]
pub struct PoissonStructure {
    pub kind: TensorKind,
    vars: Vec<Var>,
    entries: Vec<Vec<Option<TensorEntry>>>,
}

fn entry(c: i64, order: u32) -> Option<TensorEntry> {
    Some(TensorEntry { coeff: Coeff::int(c), order })
}

impl PoissonStructure {
    /// Builds a tensor after checking skew-adjointness, `J = −J*`.
    pub fn custom(vars: Vec<Var>, entries: Vec<Vec<Option<TensorEntry>>>) -> Result<Self, AlgebraError> {
        let n = vars.len();
        if entries.len() != n || entries.iter().any(|r| r.len() != n) {
            return Err(AlgebraError::Other("tensor shape does not match variables".into()));
        }
        for i in 0..n {
            for j in 0..n {
                let ok = match (&entries[i][j], &entries[j][i]) {
                    (None, None) => true,
                    (Some(a), Some(b)) => {
                        let sign = if a.order % 2 == 0 { -1 } else { 1 };
                        a.order == b.order && a.coeff == b.coeff.scale(&num_rational::BigRational::from_integer(sign.into()))
                    }
                    (Some(a), None) | (None, Some(a)) => a.coeff.is_zero(),
                };
                if !ok {
                    return Err(AlgebraError::Other(format!("tensor is not skew-adjoint at ({i}, {j})")));
                }
            }
        }
        Ok(PoissonStructure { kind: TensorKind::Custom, vars, entries })
    }

    /// `diag(∂, −∂)` on `(u, v)`.
    pub fn gardner() -> Self {
        PoissonStructure {
            kind: TensorKind::Gardner,
            vars: vec![Var::U, Var::V],
            entries: vec![vec![entry(1, 1), None], vec![None, entry(-1, 1)]],
        }
    }

    /// `∂` on a single variable.
    pub fn gardner_single(var: Var) -> Self {
        PoissonStructure { kind: TensorKind::Gardner, vars: vec![var], entries: vec![vec![entry(1, 1)]] }
    }

    /// Canonical `J₂` on `(q, p)`; `Var::Qx` carries the `q` slot.
    pub fn standard() -> Self {
        PoissonStructure {
            kind: TensorKind::Standard,
            vars: vec![Var::Qx, Var::P],
            entries: vec![vec![None, entry(1, 0)], vec![entry(-1, 0), None]],
        }
    }

    /// `J₂` written in `(r, p)` with `r = q_x`.
    pub fn standard_rp() -> Self {
        PoissonStructure {
            kind: TensorKind::Standard,
            vars: vec![Var::R, Var::P],
            entries: vec![vec![None, entry(1, 1)], vec![entry(1, 1), None]],
        }
    }

    pub fn vars(&self) -> &[Var] {
        &self.vars
    }

    pub fn entry(&self, i: usize, j: usize) -> Option<&TensorEntry> {
        self.entries[i][j].as_ref()
    }

    /// `(J∇H)_i` as a density.
    pub fn apply(&self, grads: &[Density], i: usize) -> Density {
        let mut out = Density::zero();
        for (j, g) in grads.iter().enumerate() {
            if let Some(e) = &self.entries[i][j] {
                out = out.add(&g.dx_n(e.order).scale(&e.coeff));
            }
        }
        out
    }

    pub fn gradient(&self, f: &Observable) -> Result<Vec<Density>, AlgebraError> {
        for v in f.vars() {
            if !self.vars.contains(&v) {
                return Err(AlgebraError::UnknownVariable(v));
            }
        }
        self.vars.iter().map(|&v| variational_derivative_obs(f, v)).collect()
    }

    /// Hamiltonian vector field component for `vars()[i]`.
    pub fn vector_field(&self, h: &Observable, i: usize) -> Result<Density, AlgebraError> {
        Ok(self.apply(&self.gradient(h)?, i))
    }
}

/// `{F, G}_J = ∮ Σ δF/δvᵢ · Jᵢⱼ δG/δvⱼ`, extended to atom products by Leibniz.
pub fn poisson_bracket(f: &Observable, g: &Observable, j: &PoissonStructure) -> Result<Observable, AlgebraError> {
    let df = j.gradient(f)?;
    let dg = j.gradient(g)?;
    let mut dens = Density::zero();
    for (i, a) in df.iter().enumerate() {
        if a.is_zero() {
            continue;
        }
        dens = dens.add(&a.mul(&j.apply(&dg, i)));
    }
    Ok(dens.integrate())
}

/// Adjoint action `L_H F = {F, H}`.
pub fn lie_derivative(h: &Observable, f: &Observable, j: &PoissonStructure) -> Result<Observable, AlgebraError> {
    poisson_bracket(f, h, j)
}
