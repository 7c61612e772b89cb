//! Pseudospectral time stepping for `w_t = L w + N(w)` on the unit circle.
//!
//! The linear part `L` collects terms `c·w^(d)` of a field's own right-hand
//! side and is treated exactly in Fourier space; everything else is evaluated
//! on the grid and dealiased.

use super::KdvError;
use crate::algebra::density::{Density, Factor, Observable, Var};
use crate::algebra::{Coeff, EvalError, Evaluator, PeriodicField, PoissonStructure, Symbol};
use crate::spectral::Transform;
use num_complex::Complex64;
use std::f64::consts::PI;

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    Ifrk4,
    Etdrk4,
}

#[derive(Clone, Debug, serde::Serialize, serde::Deserialize)]
pub struct SpectralSolverConfig {
    pub n: usize,
    pub dt: f64,
    pub t_end: f64,
    pub scheme: Scheme,
    /// Two-thirds rule on nonlinear terms.
    pub dealias: bool,
    /// Store every `save_every`-th step (the initial state is always kept).
    pub save_every: usize,
}

impl SpectralSolverConfig {
    pub fn new(n: usize, dt: f64, t_end: f64, scheme: Scheme) -> Self {
        SpectralSolverConfig { n, dt, t_end, scheme, dealias: true, save_every: 1 }
    }

    pub fn validate(&self) -> Result<(), KdvError> {
        if self.n < 16 || !self.n.is_power_of_two() {
            return Err(KdvError::Config(format!("grid size {} must be a power of two >= 16", self.n)));
        }
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(KdvError::Config(format!("time step {} must be positive", self.dt)));
        }
        if !(self.t_end >= 0.0) {
            return Err(KdvError::Config(format!("end time {} must be non-negative", self.t_end)));
        }
        if self.save_every == 0 {
            return Err(KdvError::Config("save_every must be at least 1".into()));
        }
        Ok(())
    }

    /// `dt·(2πN/2)³`, the explicit-stepping stability indicator for a third-order term.
    pub fn stiffness(&self) -> f64 {
        self.dt * (PI * self.n as f64).powi(3)
    }

    pub fn steps(&self) -> usize {
        (self.t_end / self.dt).round() as usize
    }
}

/// Right-hand sides for a set of fields.
#[derive(Clone, Debug)]
pub struct FieldSystem {
    pub vars: Vec<Var>,
    pub rhs: Vec<Density>,
    pub params: Vec<(String, f64)>,
}

impl FieldSystem {
    pub fn new(vars: Vec<Var>, rhs: Vec<Density>) -> Self {
        FieldSystem { vars, rhs, params: Vec::new() }
    }

    pub fn single(var: Var, rhs: Density) -> Self {
        FieldSystem::new(vec![var], vec![rhs])
    }

    /// Hamilton equations `v_t = (J∇H)_v` for every variable of `j`.
    pub fn from_hamiltonian(h: &Observable, j: &PoissonStructure) -> Result<Self, KdvError> {
        let rhs = (0..j.vars().len()).map(|i| j.vector_field(h, i)).collect::<Result<Vec<_>, _>>()?;
        Ok(FieldSystem::new(j.vars().to_vec(), rhs))
    }

    pub fn with_param(mut self, name: &str, value: f64) -> Self {
        self.params.push((name.to_string(), value));
        self
    }

    fn value(&self, c: &Coeff) -> Result<f64, KdvError> {
        c.eval(&|s: &Symbol| self.params.iter().find(|(n, _)| n == s.name()).map(|(_, v)| *v))
            .map_err(|s| KdvError::Eval(EvalError::UnboundSymbol(s.name().to_string())))
    }
}

/// Sampled states; `states[m][i]` is variable `i` at `times[m]`.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub vars: Vec<Var>,
    pub times: Vec<f64>,
    pub states: Vec<Vec<Vec<f64>>>,
}

impl Trajectory {
    pub fn last(&self) -> &[Vec<f64>] {
        self.states.last().expect("trajectory has the initial state")
    }

    /// Normalized Fourier magnitudes `|ĉ_k|/N`, `k = 0..k_max`, of variable `i` at each saved time.
    pub fn mode_magnitudes(&self, i: usize, k_max: usize) -> Vec<Vec<f64>> {
        let n = self.states[0][i].len();
        let t = Transform::new(n);
        self.states
            .iter()
            .map(|s| t.forward(&s[i]).iter().take(k_max + 1).map(|z| z.norm() / n as f64).collect())
            .collect()
    }

    /// CSV rows `t, w_0, …, w_{N−1}` for variable `i`.
    pub fn samples_csv(&self, i: usize) -> String {
        let mut out = String::from("t");
        for j in 0..self.states[0][i].len() {
            out.push_str(&format!(",x{j}"));
        }
        out.push('\n');
        for (t, s) in self.times.iter().zip(&self.states) {
            out.push_str(&format!("{t}"));
            for x in &s[i] {
                out.push_str(&format!(",{x}"));
            }
            out.push('\n');
        }
        out
    }

    /// CSV rows `t, |ĉ_0|, …, |ĉ_K|` for variable `i`.
    pub fn modes_csv(&self, i: usize, k_max: usize) -> String {
        let mut out = String::from("t");
        for k in 0..=k_max {
            out.push_str(&format!(",k{k}"));
        }
        out.push('\n');
        for (t, m) in self.times.iter().zip(self.mode_magnitudes(i, k_max)) {
            out.push_str(&format!("{t}"));
            for x in m {
                out.push_str(&format!(",{x}"));
            }
            out.push('\n');
        }
        out
    }
}

struct Compiled<'a> {
    sys: &'a FieldSystem,
    t: Transform,
    linear: Vec<Vec<Complex64>>,
    nonlinear: Vec<Density>,
    mask: Vec<f64>,
    eval: Evaluator,
}

impl<'a> Compiled<'a> {
    fn new(sys: &'a FieldSystem, cfg: &SpectralSolverConfig) -> Result<Self, KdvError> {
        let t = Transform::new(cfg.n);
        let mut linear = Vec::new();
        let mut nonlinear = Vec::new();
        for (i, rhs) in sys.rhs.iter().enumerate() {
            let var = sys.vars[i];
            let mut symbol = vec![Complex64::new(0.0, 0.0); cfg.n];
            let mut rest = Density::zero();
            for (term, c) in rhs.terms() {
                match (term.atoms.is_empty(), term.factors.as_slice()) {
                    (true, [Factor::Local { var: v, d }]) if *v == var => {
                        let c = sys.value(c)?;
                        for (k, s) in symbol.iter_mut().enumerate() {
                            *s += t.derivative_symbol(k, *d) * c;
                        }
                    }
                    _ => rest.add_term(term.clone(), c.clone()),
                }
            }
            linear.push(symbol);
            nonlinear.push(rest);
        }
        let mask = (0..cfg.n)
            .map(|k| if !cfg.dealias || 3 * t.wavenumber(k).unsigned_abs() < cfg.n as u64 { 1.0 } else { 0.0 })
            .collect();
        let mut eval = Evaluator::new(cfg.n);
        for (name, v) in &sys.params {
            eval.param(name, *v);
        }
        Ok(Compiled { sys, t, linear, nonlinear, mask, eval })
    }

    fn nonlinear(&mut self, state: &[Vec<Complex64>]) -> Result<Vec<Vec<Complex64>>, KdvError> {
        for (i, s) in state.iter().enumerate() {
            let f = PeriodicField::new(self.t.inverse(s.clone()));
            self.eval.bind(self.sys.vars[i], &f)?;
        }
        let mut out = Vec::with_capacity(state.len());
        for d in &self.nonlinear {
            if d.is_zero() {
                out.push(vec![Complex64::new(0.0, 0.0); self.t.len()]);
                continue;
            }
            let vals = self.eval.density(d)?;
            let mut c = self.t.forward(&vals);
            for (z, m) in c.iter_mut().zip(&self.mask) {
                *z *= *m;
            }
            out.push(c);
        }
        Ok(out)
    }
}

fn phi_coefficients(l: Complex64, dt: f64) -> [Complex64; 4] {
    // Kassam–Trefethen contour means for Q, f1, f2, f3.
    const M: usize = 32;
    let mut acc = [Complex64::new(0.0, 0.0); 4];
    for j in 0..M {
        let r = Complex64::from_polar(1.0, PI * (j as f64 + 0.5) / M as f64 * 2.0);
        let z = l * dt + r;
        let ez = z.exp();
        let z3 = z * z * z;
        acc[0] += ((z / 2.0).exp() - 1.0) / z;
        acc[1] += (-4.0 - z + ez * (4.0 - 3.0 * z + z * z)) / z3;
        acc[2] += (2.0 + z + ez * (z - 2.0)) / z3;
        acc[3] += (-4.0 - 3.0 * z - z * z + ez * (4.0 - z)) / z3;
    }
    acc.map(|a| a * dt / M as f64)
}

fn combine(a: &[Vec<Complex64>], f: impl Fn(usize, usize) -> Complex64) -> Vec<Vec<Complex64>> {
    a.iter().enumerate().map(|(i, row)| (0..row.len()).map(|k| f(i, k)).collect()).collect()
}

const BLOW_UP: f64 = 1e150;

/// Integrates `sys` from `init` (one field per variable).
pub fn integrate(sys: &FieldSystem, init: &[PeriodicField], cfg: &SpectralSolverConfig) -> Result<Trajectory, KdvError> {
    cfg.validate()?;
    if init.len() != sys.vars.len() || init.iter().any(|f| f.len() != cfg.n) {
        return Err(KdvError::Config("initial data do not match the variables or the grid".into()));
    }
    let mut c = Compiled::new(sys, cfg)?;
    let dt = cfg.dt;
    let e = combine(&c.linear, |i, k| (c.linear[i][k] * dt).exp());
    let e2 = combine(&c.linear, |i, k| (c.linear[i][k] * dt / 2.0).exp());
    let phi: Vec<Vec<[Complex64; 4]>> = match cfg.scheme {
        Scheme::Etdrk4 => c.linear.iter().map(|row| row.iter().map(|&l| phi_coefficients(l, dt)).collect()).collect(),
        Scheme::Ifrk4 => Vec::new(),
    };
    let mut v: Vec<Vec<Complex64>> = init.iter().map(|f| c.t.forward(&f.values)).collect();
    let mut traj = Trajectory { vars: sys.vars.clone(), times: vec![0.0], states: vec![init.iter().map(|f| f.values.clone()).collect()] };
    let steps = cfg.steps();
    for step in 1..=steps {
        v = match cfg.scheme {
            Scheme::Ifrk4 => {
                let a = c.nonlinear(&v)?;
                let s1 = combine(&v, |i, k| e2[i][k] * (v[i][k] + a[i][k] * (dt / 2.0)));
                let b = c.nonlinear(&s1)?;
                let s2 = combine(&v, |i, k| e2[i][k] * v[i][k] + b[i][k] * (dt / 2.0));
                let cc = c.nonlinear(&s2)?;
                let s3 = combine(&v, |i, k| e[i][k] * v[i][k] + e2[i][k] * cc[i][k] * dt);
                let d = c.nonlinear(&s3)?;
                combine(&v, |i, k| {
                    e[i][k] * v[i][k]
                        + (e[i][k] * a[i][k] + e2[i][k] * (b[i][k] + cc[i][k]) * 2.0 + d[i][k]) * (dt / 6.0)
                })
            }
            Scheme::Etdrk4 => {
                let nv = c.nonlinear(&v)?;
                let a = combine(&v, |i, k| e2[i][k] * v[i][k] + phi[i][k][0] * nv[i][k]);
                let na = c.nonlinear(&a)?;
                let b = combine(&v, |i, k| e2[i][k] * v[i][k] + phi[i][k][0] * na[i][k]);
                let nb = c.nonlinear(&b)?;
                let cc = combine(&v, |i, k| e2[i][k] * a[i][k] + phi[i][k][0] * (nb[i][k] * 2.0 - nv[i][k]));
                let nc = c.nonlinear(&cc)?;
                combine(&v, |i, k| {
                    let p = &phi[i][k];
                    e[i][k] * v[i][k] + nv[i][k] * p[1] + (na[i][k] + nb[i][k]) * p[2] * 2.0 + nc[i][k] * p[3]
                })
            }
        };
        let t = step as f64 * dt;
        if v.iter().flatten().any(|z| !(z.norm() < BLOW_UP)) {
            return Err(KdvError::BlowUp { t });
        }
        if step % cfg.save_every == 0 || step == steps {
            traj.times.push(t);
            traj.states.push(v.iter().map(|s| c.t.inverse(s.clone())).collect());
        }
    }
    Ok(traj)
}
