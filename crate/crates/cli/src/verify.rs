//! Invariant suites run by `wavenf verify`.

use crate::error::CliError;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;
use std::collections::BTreeMap;
use wavenf_core::algebra::serialize::{observable_from_json, ExprJson};
use wavenf_core::algebra::{
    loc, poisson_bracket, variational_derivative_obs, Coeff, Evaluator, Observable, PeriodicField, PoissonStructure, Var,
};
use wavenf_core::kdv::{integrate, FieldSystem, Scheme, SpectralSolverConfig};
use wavenf_core::lattice::{mode_energies, LatticeState, Potential, Stepper};
use wavenf_core::models::{water_waves, FpuModel, GenericModel, MechanicalModel, Model};
use wavenf_core::normalform::solve_homological;
use wavenf_core::spectral::Transform;

use Var::{U, V};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    All,
    Gateaux,
    Averaging,
    Jacobi,
    Homological,
    #[value(alias = "paper-coefficients")]
    GoldenCoefficients,
    Lattice,
    Kdv,
}

impl Suite {
    const EACH: [Suite; 7] =
        [Suite::Gateaux, Suite::Averaging, Suite::Jacobi, Suite::Homological, Suite::GoldenCoefficients, Suite::Lattice, Suite::Kdv];

    fn name(self) -> &'static str {
        match self {
            Suite::All => "all",
            Suite::Gateaux => "gateaux",
            Suite::Averaging => "averaging",
            Suite::Jacobi => "jacobi",
            Suite::Homological => "homological",
            Suite::GoldenCoefficients => "golden-coefficients",
            Suite::Lattice => "lattice",
            Suite::Kdv => "kdv",
        }
    }
}

pub struct Outcome {
    pub suite: &'static str,
    pub pass: bool,
    pub detail: String,
}

fn eval_uv(o: &Observable, u: &PeriodicField, v: &PeriodicField) -> Result<f64, CliError> {
    let mut e = Evaluator::new(u.len());
    e.bind(U, u).and_then(|e| e.bind(V, v)).map_err(|e| CliError::Algebra(e.to_string()))?;
    e.observable(o).map_err(|e| CliError::Algebra(e.to_string()))
}

fn pair(rng: &mut ChaCha8Rng, n: usize) -> (PeriodicField, PeriodicField) {
    (PeriodicField::random_trig(rng, n, 4), PeriodicField::random_trig(rng, n, 4))
}

fn sources() -> Result<Vec<Observable>, CliError> {
    let h = water_waves()?;
    let nf = Model::WaterWaves.normal_form()?;
    Ok(vec![h.order(1), h.order(2), nf.g(1), nf.z(2)])
}

/// Central differences of `F` along random directions against `∮ δF/δu·φ + δF/δv·ψ`.
fn gateaux(rng: &mut ChaCha8Rng, draws: usize) -> Result<f64, CliError> {
    let fs = sources()?;
    let n = 64;
    let mut worst: f64 = 0.0;
    for draw in 0..draws {
        let f = &fs[draw % fs.len()];
        let (u, v) = pair(rng, n);
        let (pu, pv) = pair(rng, n);
        let mut e = Evaluator::new(n);
        e.bind(U, &u).and_then(|e| e.bind(V, &v)).map_err(|e| CliError::Algebra(e.to_string()))?;
        let gu = e.density(&variational_derivative_obs(f, U)?).map_err(|e| CliError::Algebra(e.to_string()))?;
        let gv = e.density(&variational_derivative_obs(f, V)?).map_err(|e| CliError::Algebra(e.to_string()))?;
        let exact = (0..n).map(|j| gu[j] * pu.values[j] + gv[j] * pv.values[j]).sum::<f64>() / n as f64;
        let moved = |s: f64| {
            let a = PeriodicField::new(u.values.iter().zip(&pu.values).map(|(x, y)| x + s * y).collect());
            let b = PeriodicField::new(v.values.iter().zip(&pv.values).map(|(x, y)| x + s * y).collect());
            eval_uv(f, &a, &b)
        };
        let d = 1e-4;
        let fd = (moved(d)? - moved(-d)?) / (2.0 * d);
        worst = worst.max((fd - exact).abs() / exact.abs().max(1e-3));
    }
    Ok(worst)
}

/// `∫₀¹ F∘Φˢ ds = Z` and `∫₀¹ s F∘Φˢ ds = Z/2 + G` along `u(x+s)`, `v(x−s)`,
/// by exact integration of the trigonometric interpolant in `s`.
fn averaging(rng: &mut ChaCha8Rng, draws: usize) -> Result<f64, CliError> {
    let h = water_waves()?;
    let mut g = GenericModel::from_ab(&Coeff::int(4), &Coeff::int(9))?;
    g.d1 = Coeff::rational(3, 5);
    g.e = std::array::from_fn(|i| Coeff::rational(i as i64 + 1, 7));
    let gh = g.to_uv()?;
    let fs = [h.order(1), h.order(2), gh.order(1), gh.order(2)];
    let m = 256;
    let ts = Transform::new(m);
    let mut worst: f64 = 0.0;
    for draw in 0..draws.max(fs.len()) {
        let f = &fs[draw % fs.len()];
        let (z, gen) = solve_homological(f)?;
        let (u, v) = pair(rng, 64);
        let t = Transform::new(64);
        let samples = (0..m)
            .map(|i| {
                let s = i as f64 / m as f64;
                eval_uv(f, &PeriodicField::new(t.shift(&u.values, s)), &PeriodicField::new(t.shift(&v.values, -s)))
            })
            .collect::<Result<Vec<f64>, _>>()?;
        let ch = ts.forward(&samples);
        let mean = ch[0].re / m as f64;
        let mut first = mean / 2.0;
        for (i, c) in ch.iter().enumerate().skip(1) {
            if !ts.is_nyquist(i) {
                let k = ts.wavenumber(i) as f64;
                first += (c / m as f64 / Complex64::new(0.0, 2.0 * std::f64::consts::PI * k)).re;
            }
        }
        let za = eval_uv(&z, &u, &v)?;
        let ga = eval_uv(&gen, &u, &v)?;
        let scale = mean.abs().max(first.abs()).max(1.0);
        worst = worst.max((mean - za).abs() / scale).max((first - za / 2.0 - ga).abs() / scale);
    }
    Ok(worst)
}

fn jacobi(rng: &mut ChaCha8Rng, draws: usize) -> Result<f64, CliError> {
    let j = PoissonStructure::gardner();
    let int = |c: Coeff, fs: &[wavenf_core::algebra::Factor]| Observable::integral_of(fs).scale(&c);
    let fs = [
        int(Coeff::one(), &[loc(U, 0), loc(U, 0), loc(U, 0)]).add(&int(Coeff::int(2), &[loc(U, 0), loc(V, 1)])),
        int(Coeff::rational(1, 3), &[loc(U, 0), loc(V, 0), loc(V, 0)]).add(&int(Coeff::int(-1), &[loc(V, 1), loc(V, 1)])),
        int(Coeff::rational(5, 7), &[loc(U, 1), loc(U, 1), loc(V, 0)])
            .add(&int(Coeff::one(), &[loc(V, 0), loc(V, 0), loc(V, 0), loc(V, 0)])),
    ];
    let br = |a: &Observable, b: &Observable| poisson_bracket(a, b, &j);
    let terms = [br(&fs[0], &br(&fs[1], &fs[2])?)?, br(&fs[1], &br(&fs[2], &fs[0])?)?, br(&fs[2], &br(&fs[0], &fs[1])?)?];
    let mut worst: f64 = 0.0;
    for _ in 0..draws {
        let (u, v) = pair(rng, 64);
        let vals = terms.iter().map(|t| eval_uv(t, &u, &v)).collect::<Result<Vec<f64>, _>>()?;
        let scale = vals.iter().map(|x| x.abs()).fold(1.0, f64::max);
        worst = worst.max(vals.iter().sum::<f64>().abs() / scale);
    }
    Ok(worst)
}

fn models() -> Vec<Model> {
    vec![
        Model::Generic(GenericModel::symbolic(1)),
        Model::Mechanical(MechanicalModel::symbolic()),
        Model::Fpu(FpuModel::symbolic()),
        Model::WaterWaves,
    ]
}

#[derive(Deserialize)]
struct Golden {
    model: String,
    orders: BTreeMap<u32, ExprJson>,
}

const GOLDEN: [&str; 4] = [
    include_str!("../golden/generic.json"),
    include_str!("../golden/mechanical.json"),
    include_str!("../golden/fpu.json"),
    include_str!("../golden/waterwaves.json"),
];

fn golden_coefficients() -> Result<(bool, String), CliError> {
    let mut notes = Vec::new();
    let mut ok = true;
    for (model, text) in models().iter().zip(GOLDEN) {
        let golden: Golden = serde_json::from_str(text).map_err(|e| CliError::Input(format!("golden file: {e}")))?;
        debug_assert_eq!(golden.model, model.name());
        let nf = model.normal_form()?;
        for (order, expr) in &golden.orders {
            let want = observable_from_json(expr).map_err(|e| CliError::Input(format!("golden file: {e}")))?;
            let same = nf.z(*order) == want;
            ok &= same;
            if !same {
                notes.push(format!("{} Z{order} differs by {}", model.name(), nf.z(*order).sub(&want)));
            }
        }
    }
    if ok {
        notes.push("generic, mechanical, fpu and water-wave normal forms equal the golden files".into());
    }
    Ok((ok, notes.join("; ")))
}

fn lattice(rng: &mut ChaCha8Rng) -> Result<(bool, String), CliError> {
    use rand::Rng;
    let n = 16;
    let q: Vec<f64> = (0..n).map(|_| rng.gen_range(-0.2..0.2)).collect();
    let p: Vec<f64> = (0..n).map(|_| rng.gen_range(-0.2..0.2)).collect();
    let s0 = LatticeState::new(q.clone(), p.clone(), Potential::alpha_beta(0.25, 0.1))?;
    let mut s = s0.clone();
    s.advance(0.05, 400, Stepper::Yoshida4)?;
    let spectrum = mode_energies(&s);
    let symmetry = (1..n).map(|k| (spectrum.energies[k] - spectrum.energies[n - k]).abs()).fold(0.0, f64::max);
    s.advance(-0.05, 400, Stepper::Yoshida4)?;
    let back = s.q.iter().zip(&s0.q).chain(s.p.iter().zip(&s0.p)).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let mut h = LatticeState::new(q, p, Potential::harmonic())?;
    let e0 = mode_energies(&h);
    h.advance(0.02, 2000, Stepper::Yoshida4)?;
    let e1 = mode_energies(&h);
    let harmonic = e0.energies.iter().zip(&e1.energies).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max) / e0.total();
    let ok = back <= 1e-10 && symmetry <= 1e-12 && harmonic <= 1e-6;
    Ok((ok, format!("reversibility {back:.1e}, E_k symmetry {symmetry:.1e}, harmonic mode drift {harmonic:.1e}")))
}

fn kdv(rng: &mut ChaCha8Rng) -> Result<(bool, String), CliError> {
    let n = 64;
    let w0 = PeriodicField::random_trig(rng, n, 6);
    let sys = FieldSystem::single(U, wavenf_core::algebra::Density::monomial(Coeff::one(), vec![loc(U, 1)]));
    let t = Transform::new(n);
    let exact = t.shift(&w0.values, 1.0);
    let mut worst: f64 = 0.0;
    for scheme in [Scheme::Ifrk4, Scheme::Etdrk4] {
        let tr = integrate(&sys, std::slice::from_ref(&w0), &SpectralSolverConfig::new(n, 0.05, 1.0, scheme))?;
        worst = worst.max(tr.last()[0].iter().zip(&exact).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max));
    }
    Ok((worst <= 1e-10, format!("translation error {worst:.1e}")))
}

/// Runs `suite` (or every suite); each suite draws from its own stream of `seed`.
pub fn run(suite: Suite, draws: usize, seed: u64) -> Result<Vec<Outcome>, CliError> {
    let chosen: Vec<Suite> = if suite == Suite::All { Suite::EACH.to_vec() } else { vec![suite] };
    let mut out = Vec::new();
    for s in chosen {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(s as u64);
        let (pass, detail) = match s {
            Suite::Gateaux => {
                let e = gateaux(&mut rng, draws)?;
                (e <= 1e-6, format!("max relative error {e:.2e} over {draws} draws (tolerance 1e-6)"))
            }
            Suite::Averaging => {
                let e = averaging(&mut rng, draws.min(20))?;
                (e <= 1e-9, format!("max error {e:.2e} (tolerance 1e-9)"))
            }
            Suite::Jacobi => {
                let e = jacobi(&mut rng, draws)?;
                (e <= 1e-9, format!("max relative residual {e:.2e} over {draws} draws (tolerance 1e-9)"))
            }
            Suite::Homological => {
                let mut ok = true;
                for m in models() {
                    ok &= m.normal_form()?.verified();
                }
                (ok, "residuals L_K0 G - (S - Z) and {K0, Z} vanish for every model".to_string())
            }
            Suite::GoldenCoefficients => golden_coefficients()?,
            Suite::Lattice => lattice(&mut rng)?,
            Suite::Kdv => kdv(&mut rng)?,
            Suite::All => unreachable!(),
        };
        out.push(Outcome { suite: s.name(), pass, detail });
    }
    Ok(out)
}
