//! Numerical evaluation of densities and observables on sampled periodic fields.

use super::density::{Density, Factor, Observable, Var};
use super::poly::Symbol;
use crate::spectral::{mean, Transform};
use rand::Rng;
use std::cell::RefCell;
use std::collections::HashMap;
use std::f64::consts::PI;

/// Samples of a real field at `x_j = j/N`.
#[derive(Clone, Debug, PartialEq)]
pub struct PeriodicField {
    pub values: Vec<f64>,
}

impl PeriodicField {
    pub fn new(values: Vec<f64>) -> Self {
        PeriodicField { values }
    }

    pub fn from_fn(n: usize, f: impl Fn(f64) -> f64) -> Self {
        PeriodicField { values: (0..n).map(|j| f(j as f64 / n as f64)).collect() }
    }

    /// Random zero-mean trigonometric polynomial with harmonics `1..=k_max`
    /// and coefficients uniform in `[-1, 1]`.
    pub fn random_trig(rng: &mut impl Rng, n: usize, k_max: usize) -> Self {
        let coeffs: Vec<(f64, f64)> = (0..k_max).map(|_| (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        PeriodicField::from_fn(n, |x| {
            coeffs
                .iter()
                .enumerate()
                .map(|(k, (a, b))| {
                    let w = 2.0 * PI * (k + 1) as f64 * x;
                    a * w.cos() + b * w.sin()
                })
                .sum()
        })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn mean(&self) -> f64 {
        mean(&self.values)
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EvalError {
    #[error("variable {0:?} is not bound")]
    UnboundVariable(Var),
    #[error("parameter `{0}` has no value")]
    UnboundSymbol(String),
    #[error("antiderivative of {0:?} needs a zero-mean field")]
    NonZeroMean(Var),
    #[error("field length {got} differs from grid size {want}")]
    Length { got: usize, want: usize },
}

/// Spectral evaluator: derivatives and `∂⁻¹` by Fourier multipliers,
/// integrals by the grid mean (exact for band-limited products).
pub struct Evaluator {
    t: Transform,
    fields: HashMap<Var, Vec<f64>>,
    params: HashMap<String, f64>,
    derivs: RefCell<HashMap<(Var, u32), Vec<f64>>>,
}

impl Evaluator {
    pub fn new(n: usize) -> Self {
        Evaluator { t: Transform::new(n), fields: HashMap::new(), params: HashMap::new(), derivs: RefCell::default() }
    }

    pub fn n(&self) -> usize {
        self.t.len()
    }

    /// Binds the base field of `var` (for `Var::Qx` the samples of `q_x`).
    pub fn bind(&mut self, var: Var, f: &PeriodicField) -> Result<&mut Self, EvalError> {
        if f.len() != self.n() {
            return Err(EvalError::Length { got: f.len(), want: self.n() });
        }
        self.fields.insert(var, f.values.clone());
        self.derivs.borrow_mut().retain(|(v, _), _| *v != var);
        Ok(self)
    }

    pub fn param(&mut self, name: &str, value: f64) -> &mut Self {
        self.params.insert(name.to_string(), value);
        self
    }

    pub fn params(&self) -> &HashMap<String, f64> {
        &self.params
    }

    fn derivative(&self, var: Var, d: u32) -> Result<Vec<f64>, EvalError> {
        if let Some(v) = self.derivs.borrow().get(&(var, d)) {
            return Ok(v.clone());
        }
        let base = self.fields.get(&var).ok_or(EvalError::UnboundVariable(var))?;
        let v = self.t.derivative(base, d);
        self.derivs.borrow_mut().insert((var, d), v.clone());
        Ok(v)
    }

    pub fn monomial(&self, m: &[Factor]) -> Result<Vec<f64>, EvalError> {
        let mut acc = vec![1.0; self.n()];
        for f in m {
            let vals = match f {
                Factor::Local { var, d } => self.derivative(*var, *d)?,
                Factor::Anti { var, .. } => {
                    let base = self.fields.get(var).ok_or(EvalError::UnboundVariable(*var))?;
                    let scale = base.iter().fold(1.0f64, |a, x| a.max(x.abs()));
                    if mean(base).abs() > 1e-10 * scale {
                        return Err(EvalError::NonZeroMean(*var));
                    }
                    let inner = self.monomial(&f.inner_factors())?;
                    self.t.antiderivative(&inner)
                }
            };
            for (a, b) in acc.iter_mut().zip(vals) {
                *a *= b;
            }
        }
        Ok(acc)
    }

    fn coeff(&self, c: &super::Coeff) -> Result<f64, EvalError> {
        c.eval(&|s: &Symbol| self.params.get(s.name()).copied()).map_err(|s| EvalError::UnboundSymbol(s.name().to_string()))
    }

    pub fn atom(&self, m: &[Factor]) -> Result<f64, EvalError> {
        Ok(mean(&self.monomial(m)?))
    }

    pub fn density(&self, d: &Density) -> Result<Vec<f64>, EvalError> {
        let mut out = vec![0.0; self.n()];
        for (t, c) in d.terms() {
            let mut s = self.coeff(c)?;
            for a in &t.atoms {
                s *= self.atom(a)?;
            }
            let vals = self.monomial(&t.factors)?;
            for (o, v) in out.iter_mut().zip(vals) {
                *o += s * v;
            }
        }
        Ok(out)
    }

    pub fn integral(&self, d: &Density) -> Result<f64, EvalError> {
        Ok(mean(&self.density(d)?))
    }

    pub fn observable(&self, o: &Observable) -> Result<f64, EvalError> {
        let mut s = 0.0;
        for (k, c) in o.terms() {
            let mut p = self.coeff(c)?;
            for a in k {
                p *= self.atom(a)?;
            }
            s += p;
        }
        Ok(s)
    }
}
