//! Packet formation from a single long-wavelength mode.

use super::chain::{LatticeState, Potential, Stepper};
use super::spectrum::{mode_energies, single_mode_displacements};
use super::LatticeError;

#[derive(Clone, Debug, serde::Serialize, serde::Deserialize)]
pub struct LocalizationExperiment {
    pub n: usize,
    pub k0: usize,
    /// `ℰ_{κ₀}(0) = C₀μ⁴`.
    pub c0: f64,
    /// The run ends at `T_f/μ³`.
    pub t_f: f64,
    pub potential: Potential,
    pub dt: f64,
    pub stepper: Stepper,
    /// Spectrum samples over the whole run.
    pub samples: usize,
    /// Averages use the last `average_fraction` of the run.
    pub average_fraction: f64,
}

impl LocalizationExperiment {
    pub fn new(n: usize, k0: usize, potential: Potential) -> Self {
        LocalizationExperiment {
            n,
            k0,
            c0: 1.0,
            t_f: 1.0,
            potential,
            dt: 0.1,
            stepper: Stepper::Yoshida4,
            samples: 2000,
            average_fraction: 0.5,
        }
    }

    pub fn mu(&self) -> f64 {
        self.k0 as f64 / self.n as f64
    }

    pub fn t_end(&self) -> f64 {
        self.t_f / self.mu().powi(3)
    }

    pub fn validate(&self) -> Result<(), LatticeError> {
        if self.n < 4 || !self.n.is_multiple_of(2) {
            return Err(LatticeError::Config(format!("N = {} must be even and at least 4", self.n)));
        }
        if self.k0 == 0 || 8 * self.k0 > self.n {
            return Err(LatticeError::Config(format!("mu = {}/{} must lie in (0, 1/8]", self.k0, self.n)));
        }
        if !(self.dt > 0.0) || !(self.c0 > 0.0) || !(self.t_f > 0.0) || self.samples < 2 {
            return Err(LatticeError::Config("dt, C0, T_f must be positive and samples >= 2".into()));
        }
        if !(self.average_fraction > 0.0 && self.average_fraction <= 1.0) {
            return Err(LatticeError::Config("average_fraction must lie in (0, 1]".into()));
        }
        Ok(())
    }

    pub fn initial_state(&self) -> Result<LatticeState, LatticeError> {
        let e = self.n as f64 * self.c0 * self.mu().powi(4);
        LatticeState::new(single_mode_displacements(self.n, self.k0, e), vec![0.0; self.n], self.potential)
    }
}

/// Least-squares fit `log ℰ_{nk₀} ≈ a − σn`.
#[derive(Clone, Debug, serde::Serialize)]
pub struct PacketFit {
    pub sigma: f64,
    pub intercept: f64,
    pub r2: f64,
    /// Harmonic indices `n` used in the fit.
    pub modes: Vec<usize>,
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct LocalizationReport {
    pub mu: f64,
    pub t_end: f64,
    /// Sample times and `ℰ_κ` for `k = 0..=N/2`.
    pub times: Vec<f64>,
    pub spectra: Vec<Vec<f64>>,
    /// Time-averaged `ℰ_κ`, `k = 0..=N/2`.
    pub averaged: Vec<f64>,
    pub fit: Option<PacketFit>,
    /// Decay is monotone over the fitted harmonics.
    pub monotone: bool,
    /// Modes with averaged energy above `1e-3` of the peak.
    pub width: usize,
    pub energy_drift: f64,
}

const SUPPORT: f64 = 1e-14;
const WIDTH: f64 = 1e-3;

/// Fits `log ℰ_{nk₀}` against `n` over harmonics whose averaged energy exceeds
/// `1e-14` of the total.
pub fn fit_packet(averaged: &[f64], k0: usize) -> Result<PacketFit, LatticeError> {
    let total: f64 = averaged.iter().sum();
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut modes = Vec::new();
    for n in 1.. {
        let k = n * k0;
        if k >= averaged.len() {
            break;
        }
        if averaged[k] > SUPPORT * total {
            xs.push(n as f64);
            ys.push(averaged[k].ln());
            modes.push(n);
        }
    }
    if modes.len() < 4 {
        return Err(LatticeError::InsufficientModes(modes.len()));
    }
    let m = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / m;
    let my = ys.iter().sum::<f64>() / m;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let slope = sxy / sxx;
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    Ok(PacketFit { sigma: -slope, intercept: my - slope * mx, r2, modes })
}

pub fn run_localization(exp: &LocalizationExperiment) -> Result<LocalizationReport, LatticeError> {
    exp.validate()?;
    let mut state = exp.initial_state()?;
    let e0 = state.energy();
    let steps = (exp.t_end() / exp.dt).ceil() as usize;
    let stride = (steps / exp.samples).max(1);
    let half = exp.n / 2;
    let start = ((1.0 - exp.average_fraction) * steps as f64) as usize;
    let mut times = Vec::new();
    let mut spectra = Vec::new();
    let mut acc = vec![0.0; half + 1];
    let mut count = 0usize;
    let mut drift: f64 = 0.0;
    let record = |s: &LatticeState, times: &mut Vec<f64>, spectra: &mut Vec<Vec<f64>>| {
        let m = mode_energies(s);
        let e: Vec<f64> = (0..=half).map(|k| m.specific(k)).collect();
        times.push(s.t);
        spectra.push(e.clone());
        e
    };
    record(&state, &mut times, &mut spectra);
    for step in 1..=steps {
        state.step(exp.dt, exp.stepper)?;
        if step % stride == 0 || step == steps {
            let e = record(&state, &mut times, &mut spectra);
            drift = drift.max(((state.energy() - e0) / e0).abs());
            if step >= start {
                for (a, x) in acc.iter_mut().zip(e) {
                    *a += x;
                }
                count += 1;
            }
        }
    }
    let averaged: Vec<f64> = acc.into_iter().map(|a| a / count.max(1) as f64).collect();
    let fit = fit_packet(&averaged, exp.k0).ok();
    let monotone = fit
        .as_ref()
        .map(|f| f.modes.windows(2).all(|w| averaged[w[1] * exp.k0] < averaged[w[0] * exp.k0]))
        .unwrap_or(true);
    let peak = averaged.iter().cloned().fold(0.0, f64::max);
    let width = averaged.iter().skip(1).filter(|&&e| e > WIDTH * peak).count();
    Ok(LocalizationReport { mu: exp.mu(), t_end: state.t, times, spectra, averaged, fit, monotone, width, energy_drift: drift })
}

impl LocalizationReport {
    /// CSV rows `t, ℰ_κ` for the requested mode indices.
    pub fn spectrum_csv(&self, modes: &[usize]) -> String {
        let mut out = String::from("t");
        for k in modes {
            out.push_str(&format!(",E{k}"));
        }
        out.push('\n');
        for (t, e) in self.times.iter().zip(&self.spectra) {
            out.push_str(&format!("{t}"));
            for &k in modes {
                out.push_str(&format!(",{}", e.get(k).copied().unwrap_or(0.0)));
            }
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fit_recovers_exponential() {
        let avg: Vec<f64> = (0..=8).map(|k| if k == 0 { 0.0 } else { 3.0 * (-1.5 * k as f64).exp() }).collect();
        let f = fit_packet(&avg, 1).unwrap();
        assert!((f.sigma - 1.5).abs() < 1e-12 && (f.r2 - 1.0).abs() < 1e-12);
        assert!(matches!(fit_packet(&[0.0, 1.0, 0.0, 0.0], 1), Err(LatticeError::InsufficientModes(1))));
    }

    #[test]
    fn harmonic_control() {
        let mut exp = LocalizationExperiment::new(16, 2, Potential::harmonic());
        exp.t_f = 0.01;
        let r = run_localization(&exp).unwrap();
        assert_eq!(r.width, 1);
        assert!(r.fit.is_none());
    }

    #[test]
    fn rejects_short_waves() {
        let exp = LocalizationExperiment::new(16, 4, Potential::harmonic());
        assert!(exp.validate().is_err());
    }
}
