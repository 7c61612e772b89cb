//! Harmonic mode energies `E_k = (|p̂_k|² + ω_k²|q̂_k|²)/2` with the unitary
//! size-N DFT and `ω_k = 2|sin(πk/N)|`.

use super::chain::LatticeState;
use crate::spectral::Transform;
use std::f64::consts::PI;

#[derive(Clone, Debug, PartialEq)]
pub struct ModeSpectrum {
    /// `E_k` for `k = 0..N`.
    pub energies: Vec<f64>,
    pub omegas: Vec<f64>,
}

impl ModeSpectrum {
    pub fn n(&self) -> usize {
        self.energies.len()
    }

    /// `ℰ_κ = E_k/N`.
    pub fn specific(&self, k: usize) -> f64 {
        self.energies[k] / self.n() as f64
    }

    pub fn kappa(&self, k: usize) -> f64 {
        k as f64 / self.n() as f64
    }

    pub fn total(&self) -> f64 {
        self.energies.iter().sum()
    }
}

pub fn omega(k: usize, n: usize) -> f64 {
    2.0 * (PI * k as f64 / n as f64).sin().abs()
}

/// Mode energies from `p̂_k` and `r̂_k = (e^{2πik/N} − 1)q̂_k` (so `|r̂_k| = ω_k|q̂_k|`).
pub fn mode_energies_from(r: &[f64], p: &[f64]) -> ModeSpectrum {
    let n = r.len();
    let t = Transform::new(n);
    let rh = t.forward(r);
    let ph = t.forward(p);
    let energies = rh.iter().zip(&ph).map(|(a, b)| (a.norm_sqr() + b.norm_sqr()) / (2.0 * n as f64)).collect();
    ModeSpectrum { energies, omegas: (0..n).map(|k| omega(k, n)).collect() }
}

pub fn mode_energies(state: &LatticeState) -> ModeSpectrum {
    mode_energies_from(&state.strains(), &state.p)
}

/// `q_j = A cos(2πk₀j/N)`, `p = 0`, with `A` chosen so that `E_{k₀} = e` (and `E_{−k₀} = e`).
pub fn single_mode_displacements(n: usize, k0: usize, e: f64) -> Vec<f64> {
    let amp = (8.0 * e / n as f64).sqrt() / omega(k0, n);
    (0..n).map(|j| amp * (2.0 * PI * (k0 * j) as f64 / n as f64).cos()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::chain::{Potential, Stepper};

    #[test]
    fn zero_state() {
        let s = LatticeState::zero(16, Potential::harmonic()).unwrap();
        assert!(mode_energies(&s).energies.iter().all(|e| *e == 0.0));
    }

    #[test]
    fn single_mode_datum() {
        let (n, k0) = (32, 3);
        let s = LatticeState::new(single_mode_displacements(n, k0, 0.7), vec![0.0; n], Potential::harmonic()).unwrap();
        let m = mode_energies(&s);
        for k in 0..n {
            let want = if k == k0 || k == n - k0 { 0.7 } else { 0.0 };
            assert!((m.energies[k] - want).abs() < 1e-14, "{k}");
        }
    }

    #[test]
    fn parseval_and_symmetry() {
        let n = 24;
        let q: Vec<f64> = (0..n).map(|j| ((j * j) as f64 * 0.37).sin()).collect();
        let p: Vec<f64> = (0..n).map(|j| (j as f64 * 1.3).cos()).collect();
        let s = LatticeState::new(q, p, Potential::harmonic()).unwrap();
        let m = mode_energies(&s);
        let harmonic: f64 = s.p.iter().map(|x| x * x / 2.0).sum::<f64>() + s.strains().iter().map(|r| r * r / 2.0).sum::<f64>();
        assert!((m.total() - harmonic).abs() < 1e-12 * harmonic);
        for k in 1..n {
            assert!((m.energies[k] - m.energies[n - k]).abs() < 1e-12);
        }
    }

    #[test]
    fn harmonic_modes_are_conserved() {
        let n = 16;
        let q: Vec<f64> = (0..n).map(|j| (j as f64 * 0.9).sin()).collect();
        let mut s = LatticeState::new(q, vec![0.0; n], Potential::harmonic()).unwrap();
        let e0 = mode_energies(&s);
        s.advance(0.02, 10_000, Stepper::Yoshida4).unwrap();
        let e1 = mode_energies(&s);
        for k in 0..n {
            assert!((e0.energies[k] - e1.energies[k]).abs() < 1e-5 * e0.total());
        }
    }
}
