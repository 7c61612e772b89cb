use crate::artifact::{Artifacts, Header};
use crate::error::CliError;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use wavenf_core::algebra::{Coeff, Evaluator, PeriodicField, Var};
use wavenf_core::kdv::hierarchy::HierarchyOrder;
use wavenf_core::kdv::{i0, i1, i3, integrate, FieldSystem, HierarchyField, Scheme, SpectralSolverConfig};
use wavenf_core::lattice::{run_localization, LatticeError, LocalizationExperiment, LocalizationReport, Potential, Stepper};

/// Overrides for a lattice run; unset fields keep the config-file or default value.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FpuOverrides {
    pub n: Option<usize>,
    pub k0: Option<usize>,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub gamma: Option<f64>,
    pub p: Option<u32>,
    pub c0: Option<f64>,
    pub t_f: Option<f64>,
    pub dt: Option<f64>,
    pub stepper: Option<Stepper>,
    pub samples: Option<usize>,
}

pub fn resolve_fpu(base: Option<LocalizationExperiment>, o: &FpuOverrides) -> LocalizationExperiment {
    let mut e = base.unwrap_or_else(|| LocalizationExperiment::new(32, 1, Potential::harmonic()));
    macro_rules! set {
        ($($f:ident => $t:expr),*) => { $(if let Some(v) = o.$f { $t = v; })* };
    }
    set!(n => e.n, k0 => e.k0, alpha => e.potential.alpha, beta => e.potential.beta, gamma => e.potential.gamma,
         p => e.potential.p, c0 => e.c0, t_f => e.t_f, dt => e.dt, stepper => e.stepper, samples => e.samples);
    e
}

#[derive(Serialize)]
struct FpuSummary<'a> {
    status: &'static str,
    mu: f64,
    t_end: f64,
    energy_drift: f64,
    monotone: bool,
    width: usize,
    fit: &'a Option<wavenf_core::lattice::PacketFit>,
}

#[derive(Serialize)]
struct BlowUpSummary {
    status: &'static str,
    first_bad_time: f64,
}

/// Modes `n·k₀` shown in the time series.
fn harmonics(exp: &LocalizationExperiment) -> Vec<usize> {
    (1..=8).map(|n| n * exp.k0).filter(|&k| k <= exp.n / 2).collect()
}

fn averaged_csv(r: &LocalizationReport) -> String {
    let n = 2 * (r.averaged.len() - 1);
    let mut s = String::from("k,kappa,energy\n");
    for (k, e) in r.averaged.iter().enumerate() {
        s.push_str(&format!("{k},{},{e}\n", k as f64 / n as f64));
    }
    s
}

pub fn run_fpu(exp: &LocalizationExperiment, out: &Path, seed: u64, inputs: &[&str]) -> Result<Vec<PathBuf>, CliError> {
    let mut art = Artifacts::new(out, Header::new("simulate fpu", seed, exp, inputs))?;
    let report = match run_localization(exp) {
        Ok(r) => r,
        Err(LatticeError::BlowUp { t }) => {
            art.json("summary.json", &BlowUpSummary { status: "blow-up", first_bad_time: t })?;
            return Err(CliError::BlowUp { t });
        }
        Err(e) => return Err(e.into()),
    };
    let modes = harmonics(exp);
    art.csv("spectrum.csv", &report.spectrum_csv(&modes))?;
    art.csv("averaged.csv", &averaged_csv(&report))?;
    let cols: Vec<(usize, String)> = modes.iter().enumerate().map(|(i, k)| (i + 2, format!("k = {k}"))).collect();
    art.gnuplot("spectrum.gp", "spectrum.csv", "specific mode energies", &cols, true)?;
    let summary = FpuSummary {
        status: "ok",
        mu: report.mu,
        t_end: report.t_end,
        energy_drift: report.energy_drift,
        monotone: report.monotone,
        width: report.width,
        fit: &report.fit,
    };
    art.json("summary.json", &summary)?;
    match &report.fit {
        Some(f) => println!(
            "mu = {}, t_end = {:.1}: sigma = {:.4}, R^2 = {:.4}, monotone decay = {}, width = {}, energy drift = {:.2e}",
            report.mu, report.t_end, f.sigma, f.r2, report.monotone, report.width, report.energy_drift
        ),
        None => println!(
            "mu = {}, t_end = {:.1}: no packet fit (too few excited harmonics), width = {}, energy drift = {:.2e}",
            report.mu, report.t_end, report.width, report.energy_drift
        ),
    }
    Ok(art.written().to_vec())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Flow {
    Kappa3,
    Kappa5,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KdvRun {
    pub n: usize,
    pub gamma: f64,
    pub t_end: f64,
    pub dt: f64,
    pub scheme: Scheme,
    pub flow: Flow,
    pub samples: usize,
    /// `w₀ = Σ a_k cos(2πkx)`, listed from `k = 1`.
    pub amplitudes: Vec<f64>,
}

impl Default for KdvRun {
    fn default() -> Self {
        KdvRun { n: 128, gamma: 0.0, t_end: 1.0, dt: 1e-3, scheme: Scheme::Etdrk4, flow: Flow::Kappa3, samples: 100, amplitudes: vec![1.0] }
    }
}

#[derive(Serialize)]
struct Drift {
    name: &'static str,
    initial: f64,
    max_relative_drift: f64,
}

#[derive(Serialize)]
struct KdvSummary {
    status: &'static str,
    steps: usize,
    drift: Vec<Drift>,
    /// Largest relative change of a Fourier magnitude `|ŵ_k|`.
    max_mode_change: f64,
}

pub fn run_kdv(run: &KdvRun, out: &Path, seed: u64) -> Result<Vec<PathBuf>, CliError> {
    let mut art = Artifacts::new(out, Header::new("simulate kdv", seed, run, &[]))?;
    let field = HierarchyField {
        gamma: Coeff::sym("gamma"),
        order: match run.flow {
            Flow::Kappa3 => HierarchyOrder::Kappa3,
            Flow::Kappa5 => HierarchyOrder::Kappa5,
        },
    };
    let sys = FieldSystem::single(Var::U, field.density(Var::U)).with_param("gamma", run.gamma);
    let w0 = PeriodicField::from_fn(run.n, |x| {
        run.amplitudes.iter().enumerate().map(|(i, a)| a * (2.0 * PI * (i + 1) as f64 * x).cos()).sum()
    });
    let mut cfg = SpectralSolverConfig::new(run.n, run.dt, run.t_end, run.scheme);
    cfg.save_every = (cfg.steps() / run.samples.max(1)).max(1);
    let traj = match integrate(&sys, &[w0], &cfg) {
        Ok(t) => t,
        Err(wavenf_core::kdv::KdvError::BlowUp { t }) => {
            art.json("summary.json", &BlowUpSummary { status: "blow-up", first_bad_time: t })?;
            return Err(CliError::BlowUp { t });
        }
        Err(e) => return Err(e.into()),
    };
    let k_max = (run.n / 3).min(32);
    art.csv("samples.csv", &traj.samples_csv(0))?;
    art.csv("modes.csv", &traj.modes_csv(0, k_max))?;
    let cols: Vec<(usize, String)> = (1..=run.amplitudes.len().min(k_max)).map(|k| (k + 2, format!("k = {k}"))).collect();
    art.gnuplot("modes.gp", "modes.csv", "Fourier magnitudes", &cols, false)?;

    let g = Coeff::sym("gamma");
    let integrals = [("I0", i0(Var::U)), ("I1", i1(&g, Var::U)), ("I3", i3(&g, Var::U))];
    let mut eval = Evaluator::new(run.n);
    eval.param("gamma", run.gamma);
    let mut drift = Vec::new();
    for (name, o) in &integrals {
        let mut values = Vec::new();
        for s in &traj.states {
            eval.bind(Var::U, &PeriodicField::new(s[0].clone())).map_err(|e| CliError::Algebra(e.to_string()))?;
            values.push(eval.observable(o).map_err(|e| CliError::Algebra(e.to_string()))?);
        }
        let scale = values[0].abs().max(f64::MIN_POSITIVE);
        let max = values.iter().map(|v| (v - values[0]).abs() / scale).fold(0.0, f64::max);
        drift.push(Drift { name, initial: values[0], max_relative_drift: max });
    }
    let mags = traj.mode_magnitudes(0, k_max);
    let peak = mags[0].iter().cloned().fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let max_mode_change =
        mags.iter().flat_map(|m| m.iter().zip(&mags[0]).map(|(a, b)| (a - b).abs() / peak)).fold(0.0, f64::max);
    for d in &drift {
        println!("{}: initial {:.6e}, max relative drift {:.2e}", d.name, d.initial, d.max_relative_drift);
    }
    println!("max change of a mode magnitude (relative to the largest): {max_mode_change:.2e}");
    art.json("summary.json", &KdvSummary { status: "ok", steps: cfg.steps(), drift, max_mode_change })?;
    Ok(art.written().to_vec())
}
