//! Periodic FPU chain `H = Σ p_j²/2 + φ(q_{j+1} − q_j)` and symplectic steppers.

use super::LatticeError;

/// `φ(z) = z²/2 + αz³/3 + βz⁴/4 + γz^p/p`.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Potential {
    pub alpha: f64,
    pub beta: f64,
    #[serde(default)]
    pub gamma: f64,
    #[serde(default = "default_degree")]
    pub p: u32,
}

fn default_degree() -> u32 {
    5
}

impl Potential {
    pub fn harmonic() -> Self {
        Potential { alpha: 0.0, beta: 0.0, gamma: 0.0, p: 5 }
    }

    pub fn alpha_beta(alpha: f64, beta: f64) -> Self {
        Potential { alpha, beta, ..Potential::harmonic() }
    }

    /// `z²/2 + γz^p/p`.
    pub fn generalized(gamma: f64, p: u32) -> Self {
        Potential { gamma, p, ..Potential::harmonic() }
    }

    pub fn value(&self, z: f64) -> f64 {
        let z2 = z * z;
        let mut v = z2 / 2.0 + self.alpha * z2 * z / 3.0 + self.beta * z2 * z2 / 4.0;
        if self.gamma != 0.0 {
            v += self.gamma * z.powi(self.p as i32) / self.p as f64;
        }
        v
    }

    pub fn force(&self, z: f64) -> f64 {
        let mut f = z + self.alpha * z * z + self.beta * z * z * z;
        if self.gamma != 0.0 {
            f += self.gamma * z.powi(self.p as i32 - 1);
        }
        f
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Stepper {
    VelocityVerlet,
    Yoshida4,
}

impl Stepper {
    fn weights(self) -> &'static [f64] {
        const W1: f64 = 1.351_207_191_959_657_6; // 1/(2 − 2^{1/3})
        const W0: f64 = -1.702_414_383_919_315_3; // −2^{1/3}·W1
        match self {
            Stepper::VelocityVerlet => &[1.0],
            Stepper::Yoshida4 => &[W1, W0, W1],
        }
    }
}

/// Displacements and momenta on `Z_N`.
#[derive(Clone, Debug, PartialEq)]
pub struct LatticeState {
    pub q: Vec<f64>,
    pub p: Vec<f64>,
    pub potential: Potential,
    pub t: f64,
    force: Vec<f64>,
}

impl LatticeState {
    pub fn new(q: Vec<f64>, p: Vec<f64>, potential: Potential) -> Result<Self, LatticeError> {
        if q.len() != p.len() || q.len() < 2 {
            return Err(LatticeError::Config(format!("q has {} sites, p has {}", q.len(), p.len())));
        }
        let mut s = LatticeState { force: vec![0.0; q.len()], q, p, potential, t: 0.0 };
        s.update_force()?;
        Ok(s)
    }

    pub fn zero(n: usize, potential: Potential) -> Result<Self, LatticeError> {
        LatticeState::new(vec![0.0; n], vec![0.0; n], potential)
    }

    pub fn n(&self) -> usize {
        self.q.len()
    }

    /// `r_j = q_{j+1} − q_j`.
    pub fn strains(&self) -> Vec<f64> {
        let n = self.n();
        (0..n).map(|j| self.q[(j + 1) % n] - self.q[j]).collect()
    }

    pub fn momentum(&self) -> f64 {
        self.p.iter().sum()
    }

    pub fn energy(&self) -> f64 {
        let kinetic: f64 = self.p.iter().map(|p| p * p / 2.0).sum();
        kinetic + self.strains().into_iter().map(|r| self.potential.value(r)).sum::<f64>()
    }

    fn update_force(&mut self) -> Result<(), LatticeError> {
        let n = self.n();
        let mut prev = self.potential.force(self.q[0] - self.q[n - 1]);
        for j in 0..n {
            let next = self.potential.force(self.q[(j + 1) % n] - self.q[j]);
            self.force[j] = next - prev;
            prev = next;
        }
        if self.force.iter().any(|f| !f.is_finite()) {
            return Err(LatticeError::BlowUp { t: self.t });
        }
        Ok(())
    }

    fn kick(&mut self, h: f64) {
        for (p, f) in self.p.iter_mut().zip(&self.force) {
            *p += h * f;
        }
    }

    fn drift(&mut self, h: f64) {
        for (q, p) in self.q.iter_mut().zip(&self.p) {
            *q += h * p;
        }
    }

    /// One step of `q̇ = p`, `ṗ_j = φ'(r_j) − φ'(r_{j−1})`. A negative `dt`
    /// runs backwards.
    pub fn step(&mut self, dt: f64, stepper: Stepper) -> Result<(), LatticeError> {
        for &w in stepper.weights() {
            let h = w * dt;
            self.kick(h / 2.0);
            self.drift(h);
            self.update_force()?;
            self.kick(h / 2.0);
        }
        self.t += dt;
        Ok(())
    }

    pub fn advance(&mut self, dt: f64, steps: usize, stepper: Stepper) -> Result<(), LatticeError> {
        for _ in 0..steps {
            self.step(dt, stepper)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn wave(n: usize, pot: Potential) -> LatticeState {
        let q = (0..n).map(|j| 0.3 * (2.0 * PI * j as f64 / n as f64).cos()).collect();
        let p = (0..n).map(|j| 0.1 * (4.0 * PI * j as f64 / n as f64).sin()).collect();
        LatticeState::new(q, p, pot).unwrap()
    }

    #[test]
    fn zero_state_stays() {
        let mut s = LatticeState::zero(16, Potential::alpha_beta(1.0, 1.0)).unwrap();
        s.advance(0.1, 100, Stepper::Yoshida4).unwrap();
        assert!(s.q.iter().chain(&s.p).all(|x| *x == 0.0));
    }

    fn max_energy_error(dt: f64) -> (f64, f64) {
        let mut s = wave(32, Potential::alpha_beta(0.5, 0.2));
        let e0 = s.energy();
        let mut worst: f64 = 0.0;
        for _ in 0..(100.0 / dt).round() as usize {
            s.step(dt, Stepper::Yoshida4).unwrap();
            worst = worst.max(((s.energy() - e0) / e0).abs());
        }
        (worst, s.momentum())
    }

    #[test]
    fn momentum_and_energy() {
        let (e1, m1) = max_energy_error(0.05);
        let (e2, _) = max_energy_error(0.025);
        assert!(m1.abs() < 1e-12);
        assert!(e1 < 1e-5, "{e1}");
        // Energy error of a fourth-order symplectic map scales like dt⁴.
        let order = (e1 / e2).log2();
        assert!(order > 3.5, "{order}");
    }

    #[test]
    fn reversible() {
        for stepper in [Stepper::VelocityVerlet, Stepper::Yoshida4] {
            let s0 = wave(16, Potential::alpha_beta(0.25, 0.0));
            let mut s = s0.clone();
            s.advance(0.1, 500, stepper).unwrap();
            s.advance(-0.1, 500, stepper).unwrap();
            let err = s.q.iter().zip(&s0.q).chain(s.p.iter().zip(&s0.p)).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            assert!(err < 1e-10, "{stepper:?} {err}");
        }
    }

    #[test]
    fn yoshida_is_fourth_order() {
        let run = |dt: f64| {
            let mut s = wave(16, Potential::alpha_beta(0.5, 0.0));
            s.advance(dt, (2.0 / dt).round() as usize, Stepper::Yoshida4).unwrap();
            s.q
        };
        let reference = run(0.005);
        let e1: f64 = run(0.1).iter().zip(&reference).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        let e2: f64 = run(0.05).iter().zip(&reference).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        let order = (e1 / e2).log2();
        assert!(order > 3.7 && order < 4.3, "{order}");
    }

    #[test]
    fn odd_potential_blows_up() {
        let q = (0..8).map(|j| if j == 0 { 5.0 } else { 0.0 }).collect();
        let mut s = LatticeState::new(q, vec![0.0; 8], Potential::generalized(1.0, 7)).unwrap();
        assert!(matches!(s.advance(0.1, 10_000, Stepper::VelocityVerlet), Err(LatticeError::BlowUp { .. })));
    }
}
