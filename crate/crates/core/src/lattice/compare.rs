//! Lattice dynamics against the decoupled normal-form flow.
//!
//! The lattice datum `(r, p)` is interpolated by `R, S` with
//! `r_j = √ε R(hj)`, `p_j = (√ε/h)(S(hj) − S(hj − h))`, then mapped to
//! `u = (S_x + R)/√2`, `v = (S_x − R)/√2` and evolved in `τ = ht` under
//! `K₀ + Σ Z_j`. Energies are read back by sampling at the lattice points.

use super::chain::{LatticeState, Potential, Stepper};
use super::spectrum::{mode_energies, mode_energies_from, single_mode_displacements, ModeSpectrum};
use super::LatticeError;
use crate::algebra::{Observable, PeriodicField, PoissonStructure, Var};
use crate::kdv::{integrate, FieldSystem, Scheme, SpectralSolverConfig};
use crate::normalform::{k0, NormalFormResult};
use crate::spectral::Transform;
use num_complex::Complex64;
use std::f64::consts::SQRT_2;

#[derive(Clone, Debug, serde::Serialize, serde::Deserialize)]
pub struct CompareExperiment {
    pub k0: usize,
    pub c0: f64,
    pub t_f: f64,
    pub alpha: f64,
    pub beta: f64,
    pub dt: f64,
    pub stepper: Stepper,
    /// Largest step in `τ` for the normal-form flow.
    pub spectral_dt: f64,
    /// Spectral grid; 0 picks `max(64, 4N)`.
    pub spectral_n: usize,
    pub samples: usize,
}

impl CompareExperiment {
    pub fn new(alpha: f64, beta: f64) -> Self {
        CompareExperiment {
            k0: 1,
            c0: 1.0,
            t_f: 1.0,
            alpha,
            beta,
            dt: 0.1,
            stepper: Stepper::Yoshida4,
            spectral_dt: 0.02,
            spectral_n: 0,
            samples: 100,
        }
    }
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct CompareReport {
    pub n: usize,
    pub mu: f64,
    pub eps: f64,
    pub times: Vec<f64>,
    /// `max_k |ℰ_κ^lattice − ℰ_κ^NF|` at each sample.
    pub per_time: Vec<f64>,
    pub discrepancy: f64,
    /// `discrepancy / μ⁴`, the size relative to the initial specific energy scale.
    pub normalized: f64,
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct MuScan {
    pub reports: Vec<CompareReport>,
    /// Least-squares slope of `log normalized` against `log μ`.
    pub exponent: f64,
}

impl MuScan {
    /// Collects reports (in any order) and fits the exponent.
    pub fn from_reports(reports: Vec<CompareReport>) -> Self {
        let pts: Vec<(f64, f64)> = reports.iter().filter(|r| r.normalized > 0.0).map(|r| (r.mu.ln(), r.normalized.ln())).collect();
        let exponent = if pts.len() >= 2 {
            let k = pts.len() as f64;
            let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
            let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
            let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
            let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
            sxy / sxx
        } else {
            f64::NAN
        };
        MuScan { reports, exponent }
    }

    /// Normalized discrepancy strictly decreases as `μ` decreases.
    pub fn monotone(&self) -> bool {
        let mut r: Vec<&CompareReport> = self.reports.iter().collect();
        r.sort_by(|a, b| b.mu.total_cmp(&a.mu));
        r.windows(2).all(|w| w[1].normalized < w[0].normalized)
    }
}

/// Band-limited interpolant of lattice samples on an `m`-point grid, `m` a multiple of `f.len()`.
fn interpolate(f: &[f64], m: usize) -> Vec<f64> {
    let n = f.len();
    let tn = Transform::new(n);
    let tm = Transform::new(m);
    let c = tn.forward(f);
    let mut out = vec![Complex64::new(0.0, 0.0); m];
    let scale = m as f64 / n as f64;
    for (i, z) in c.iter().enumerate() {
        let k = tn.wavenumber(i);
        if tn.is_nyquist(i) {
            out[n / 2] += z * scale / 2.0;
            out[m - n / 2] += z * scale / 2.0;
        } else {
            out[k.rem_euclid(m as i64) as usize] += z * scale;
        }
    }
    tm.inverse(out)
}

/// `(u, v)` on the `m`-grid from a lattice state.
pub fn lattice_to_uv(state: &LatticeState, eps: f64, m: usize) -> Result<(PeriodicField, PeriodicField), LatticeError> {
    let n = state.n();
    if !m.is_multiple_of(n) {
        return Err(LatticeError::Config(format!("spectral grid {m} is not a multiple of N = {n}")));
    }
    let se = eps.sqrt();
    let h = 1.0 / n as f64;
    let r: Vec<f64> = state.strains().iter().map(|x| x / se).collect();
    let big_r = interpolate(&r, m);
    // S(x) − S(x − h) = h p/√ε; divide out the difference symbol, then differentiate.
    let tn = Transform::new(n);
    let ph = tn.forward(&state.p);
    let diff: Vec<Complex64> = ph
        .iter()
        .enumerate()
        .map(|(i, z)| {
            let k = tn.wavenumber(i);
            if k == 0 || tn.is_nyquist(i) {
                return Complex64::new(0.0, 0.0);
            }
            let sym = Complex64::new(1.0, 0.0) - Complex64::from_polar(1.0, -2.0 * std::f64::consts::PI * k as f64 / n as f64);
            z * h / se / sym * tn.derivative_symbol(i, 1)
        })
        .collect();
    let sx = interpolate(&tn.inverse(diff), m);
    let u = PeriodicField::new(sx.iter().zip(&big_r).map(|(s, r)| (s + r) / SQRT_2).collect());
    let v = PeriodicField::new(sx.iter().zip(&big_r).map(|(s, r)| (s - r) / SQRT_2).collect());
    Ok((u, v))
}

/// Lattice `(r, p)` sampled from `(u, v)` on the `m`-grid.
pub fn uv_to_lattice(u: &[f64], v: &[f64], eps: f64, n: usize) -> (Vec<f64>, Vec<f64>) {
    let m = u.len();
    let stride = m / n;
    let se = eps.sqrt();
    let big_r: Vec<f64> = u.iter().zip(v).map(|(a, b)| (a - b) / SQRT_2).collect();
    let sx: Vec<f64> = u.iter().zip(v).map(|(a, b)| (a + b) / SQRT_2).collect();
    let s = Transform::new(m).antiderivative(&sx);
    let r = (0..n).map(|j| se * big_r[j * stride]).collect();
    let p = (0..n).map(|j| se * n as f64 * (s[j * stride] - s[(j + n - 1) % n * stride])).collect();
    (r, p)
}

fn normal_form_hamiltonian(nf: &NormalFormResult) -> Observable {
    nf.z.values().fold(k0(), |acc, z| acc.add(z))
}

/// Runs the lattice and the normal-form flow from the same single-mode datum
/// on `Z_N` and records the mode-energy discrepancy.
pub fn compare_with_normalform(exp: &CompareExperiment, n: usize, nf: &NormalFormResult) -> Result<CompareReport, LatticeError> {
    if n < 8 || !n.is_multiple_of(2) || exp.k0 == 0 || 8 * exp.k0 > n {
        return Err(LatticeError::Config(format!("need even N >= 8 with k0/N <= 1/8, got N = {n}, k0 = {}", exp.k0)));
    }
    let mu = exp.k0 as f64 / n as f64;
    let eps = mu.powi(4);
    let h = 1.0 / n as f64;
    let m = if exp.spectral_n == 0 { (4 * n).max(64).next_power_of_two() } else { exp.spectral_n };
    let pot = Potential::alpha_beta(exp.alpha, exp.beta);
    let q = single_mode_displacements(n, exp.k0, n as f64 * exp.c0 * eps);
    let mut state = LatticeState::new(q, vec![0.0; n], pot)?;

    let t_end = exp.t_f / mu.powi(3);
    let stride = (t_end / (exp.samples as f64 * exp.dt)).ceil().max(1.0) as usize;
    let tau_int = h * stride as f64 * exp.dt;
    let substeps = (tau_int / exp.spectral_dt).ceil().max(1.0) as usize;

    let (u0, v0) = lattice_to_uv(&state, eps, m)?;
    let sys = FieldSystem::from_hamiltonian(&normal_form_hamiltonian(nf), &PoissonStructure::gardner())?
        .with_param("alpha", exp.alpha)
        .with_param("beta", exp.beta)
        .with_param("eps", eps)
        .with_param("h", h);
    if sys.vars != [Var::U, Var::V] {
        return Err(LatticeError::Config("normal form must be in (u, v)".into()));
    }
    let mut cfg = SpectralSolverConfig::new(m, tau_int / substeps as f64, tau_int * exp.samples as f64, Scheme::Etdrk4);
    cfg.save_every = substeps;
    let traj = integrate(&sys, &[u0, v0], &cfg)?;

    let specific = |s: &ModeSpectrum| (1..=n / 2).map(|k| s.specific(k)).collect::<Vec<f64>>();
    let mut times = Vec::new();
    let mut per_time = Vec::new();
    for (i, st) in traj.states.iter().enumerate() {
        if i > 0 {
            state.advance(exp.dt, stride, exp.stepper)?;
        }
        let (r, p) = uv_to_lattice(&st[0], &st[1], eps, n);
        let a = specific(&mode_energies(&state));
        let b = specific(&mode_energies_from(&r, &p));
        times.push(state.t);
        per_time.push(a.iter().zip(&b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max));
    }
    let discrepancy = per_time.iter().cloned().fold(0.0, f64::max);
    Ok(CompareReport { n, mu, eps, times, per_time, discrepancy, normalized: discrepancy / mu.powi(4) })
}

/// Lattice size `N = k₀/μ`, which must be an integer.
pub fn lattice_size(k0: usize, mu: f64) -> Result<usize, LatticeError> {
    let n = (k0 as f64 / mu).round() as usize;
    if n == 0 || ((k0 as f64 / n as f64) - mu).abs() > 1e-12 * mu {
        return Err(LatticeError::Config(format!("k0/mu = {} is not an integer", k0 as f64 / mu)));
    }
    Ok(n)
}

/// `compare_with_normalform` for each `μ`, with `N = k₀/μ`.
pub fn compare_mu_grid(exp: &CompareExperiment, mus: &[f64], nf: &NormalFormResult) -> Result<MuScan, LatticeError> {
    let mut reports = Vec::new();
    for &mu in mus {
        let n = lattice_size(exp.k0, mu)?;
        reports.push(compare_with_normalform(exp, n, nf)?);
    }
    Ok(MuScan::from_reports(reports))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lattice_roundtrip() {
        let n = 16;
        let q: Vec<f64> = (0..n).map(|j| 0.01 * (2.0 * std::f64::consts::PI * j as f64 / n as f64).cos()).collect();
        let p: Vec<f64> = (0..n).map(|j| 0.02 * (4.0 * std::f64::consts::PI * j as f64 / n as f64).sin()).collect();
        let s = LatticeState::new(q, p, Potential::harmonic()).unwrap();
        let (u, v) = lattice_to_uv(&s, 1e-4, 64).unwrap();
        let (r, p) = uv_to_lattice(&u.values, &v.values, 1e-4, n);
        for (a, b) in r.iter().zip(&s.strains()).chain(p.iter().zip(&s.p)) {
            assert!((a - b).abs() < 1e-15, "{a} {b}");
        }
    }
}
