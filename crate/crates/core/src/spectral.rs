//! Fourier utilities on the unit circle, `x_j = j/N`.

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::f64::consts::PI;
use std::sync::Arc;

/// Forward and inverse transforms of one size.
#[derive(Clone)]
pub struct Transform {
    n: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl Transform {
    pub fn new(n: usize) -> Self {
        let mut p = FftPlanner::new();
        Transform { n, fwd: p.plan_fft_forward(n), inv: p.plan_fft_inverse(n) }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Unnormalized forward transform: `ĉ_k = Σ_j f_j e^{−2πijk/N}`.
    pub fn forward(&self, f: &[f64]) -> Vec<Complex64> {
        let mut buf: Vec<Complex64> = f.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        self.fwd.process(&mut buf);
        buf
    }

    pub fn forward_complex(&self, mut buf: Vec<Complex64>) -> Vec<Complex64> {
        self.fwd.process(&mut buf);
        buf
    }

    /// Inverse of `forward`, keeping the real part.
    pub fn inverse(&self, mut c: Vec<Complex64>) -> Vec<f64> {
        self.inv.process(&mut c);
        let s = 1.0 / self.n as f64;
        c.into_iter().map(|z| z.re * s).collect()
    }

    pub fn inverse_complex(&self, mut c: Vec<Complex64>) -> Vec<Complex64> {
        self.inv.process(&mut c);
        let s = 1.0 / self.n as f64;
        c.into_iter().map(|z| z * s).collect()
    }

    /// Signed wavenumber of FFT index `i`. The Nyquist index maps to `N/2`.
    pub fn wavenumber(&self, i: usize) -> i64 {
        let n = self.n as i64;
        let i = i as i64;
        if i <= n / 2 {
            i
        } else {
            i - n
        }
    }

    pub fn is_nyquist(&self, i: usize) -> bool {
        self.n.is_multiple_of(2) && i == self.n / 2
    }

    /// Multiplier of `∂ᵐ` at index `i`; odd orders vanish on the Nyquist mode.
    pub fn derivative_symbol(&self, i: usize, m: u32) -> Complex64 {
        if m == 0 {
            return Complex64::new(1.0, 0.0);
        }
        if self.is_nyquist(i) && m % 2 == 1 {
            return Complex64::new(0.0, 0.0);
        }
        Complex64::new(0.0, 2.0 * PI * self.wavenumber(i) as f64).powu(m)
    }

    pub fn derivative(&self, f: &[f64], m: u32) -> Vec<f64> {
        if m == 0 {
            return f.to_vec();
        }
        let c = self.forward(f);
        let c = c.into_iter().enumerate().map(|(i, z)| z * self.derivative_symbol(i, m)).collect();
        self.inverse(c)
    }

    /// Zero-mean antiderivative: multiplier `1/(2πik)`, `k = 0` removed.
    pub fn antiderivative(&self, f: &[f64]) -> Vec<f64> {
        let c = self.forward(f);
        let c = c
            .into_iter()
            .enumerate()
            .map(|(i, z)| {
                let k = self.wavenumber(i);
                if k == 0 || self.is_nyquist(i) {
                    Complex64::new(0.0, 0.0)
                } else {
                    z / Complex64::new(0.0, 2.0 * PI * k as f64)
                }
            })
            .collect();
        self.inverse(c)
    }

    /// `x ↦ f(x + s)` for a band-limited sample vector.
    pub fn shift(&self, f: &[f64], s: f64) -> Vec<f64> {
        let c = self.forward(f);
        let c = c
            .into_iter()
            .enumerate()
            .map(|(i, z)| {
                let k = self.wavenumber(i) as f64;
                if self.is_nyquist(i) {
                    z * (2.0 * PI * k * s).cos()
                } else {
                    z * Complex64::from_polar(1.0, 2.0 * PI * k * s)
                }
            })
            .collect();
        self.inverse(c)
    }
}

pub fn mean(f: &[f64]) -> f64 {
    f.iter().sum::<f64>() / f.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(n: usize, f: impl Fn(f64) -> f64) -> Vec<f64> {
        (0..n).map(|j| f(j as f64 / n as f64)).collect()
    }

    #[test]
    fn derivative_and_antiderivative_of_cosine() {
        let t = Transform::new(32);
        let u = grid(32, |x| (2.0 * PI * x).cos());
        let du = t.derivative(&u, 1);
        let expect = grid(32, |x| -2.0 * PI * (2.0 * PI * x).sin());
        assert!(du.iter().zip(&expect).all(|(a, b)| (a - b).abs() < 1e-12));
        let iu = t.antiderivative(&u);
        let expect = grid(32, |x| (2.0 * PI * x).sin() / (2.0 * PI));
        assert!(iu.iter().zip(&expect).all(|(a, b)| (a - b).abs() < 1e-14));
    }

    #[test]
    fn shift_is_exact() {
        let t = Transform::new(16);
        let u = grid(16, |x| (2.0 * PI * 3.0 * x).sin() + 0.5 * (2.0 * PI * x).cos());
        let s = 0.123;
        let v = t.shift(&u, s);
        let expect = grid(16, |x| (2.0 * PI * 3.0 * (x + s)).sin() + 0.5 * (2.0 * PI * (x + s)).cos());
        assert!(v.iter().zip(&expect).all(|(a, b)| (a - b).abs() < 1e-13));
    }
}
