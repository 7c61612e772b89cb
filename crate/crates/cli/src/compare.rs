use crate::artifact::{Artifacts, Header};
use crate::error::CliError;
use crate::normal_form::read_model;
use serde::Serialize;
use std::path::PathBuf;
use wavenf_core::algebra::{parse_coeff, Coeff};
use wavenf_core::lattice::{compare_with_normalform, lattice_size, CompareExperiment, CompareReport, MuScan};
use wavenf_core::models::Model;
use wavenf_core::normalform::NormalFormResult;

#[derive(Clone, Debug, Serialize)]
pub struct CompareArgs {
    pub model: PathBuf,
    pub out: PathBuf,
    pub mu_grid: Vec<f64>,
    pub experiment: CompareExperiment,
    pub jobs: usize,
    pub seed: u64,
}

/// Parses `1/8,1/16,0.03125`.
pub fn parse_mu_grid(s: &str) -> Result<Vec<f64>, CliError> {
    s.split(',')
        .map(|p| {
            let c = parse_coeff(p.trim())?;
            let v = c.as_rational().map(|r| wavenf_core::algebra::poly::rational_to_f64(&r));
            match v {
                Some(v) if v > 0.0 => Ok(v),
                _ => Err(CliError::Input(format!("mu value `{p}` must be a positive number"))),
            }
        })
        .collect()
}

fn numeric(c: &Coeff, name: &str) -> Result<f64, CliError> {
    c.eval(&|_| None).map_err(|_| CliError::Input(format!("`{name}` must be numeric in the model file, got {c}")))
}

/// Runs the independent lattice sizes on up to `jobs` threads; results keep grid order.
pub fn sweep(exp: &CompareExperiment, mus: &[f64], nf: &NormalFormResult, jobs: usize) -> Result<MuScan, CliError> {
    let sizes = mus.iter().map(|&mu| lattice_size(exp.k0, mu)).collect::<Result<Vec<_>, _>>()?;
    let jobs = jobs.clamp(1, sizes.len().max(1));
    let mut slots: Vec<Option<Result<CompareReport, CliError>>> = (0..sizes.len()).map(|_| None).collect();
    std::thread::scope(|scope| {
        for (w, chunk) in slots.chunks_mut(sizes.len().div_ceil(jobs).max(1)).enumerate() {
            let start = w * sizes.len().div_ceil(jobs).max(1);
            let sizes = &sizes;
            scope.spawn(move || {
                for (i, slot) in chunk.iter_mut().enumerate() {
                    *slot = Some(compare_with_normalform(exp, sizes[start + i], nf).map_err(CliError::from));
                }
            });
        }
    });
    let reports = slots.into_iter().map(|s| s.expect("every slot is filled")).collect::<Result<Vec<_>, _>>()?;
    Ok(MuScan::from_reports(reports))
}

#[derive(Serialize)]
struct Summary {
    alpha: f64,
    beta: f64,
    exponent: f64,
    monotone: bool,
    rows: Vec<Row>,
}

#[derive(Serialize)]
struct Row {
    mu: f64,
    n: usize,
    discrepancy: f64,
    normalized: f64,
}

pub fn run(args: &CompareArgs) -> Result<Vec<PathBuf>, CliError> {
    let (model, text) = read_model(&args.model)?;
    let Model::Fpu(fpu) = &model else {
        return Err(CliError::Input(format!("compare needs an [fpu] model, got {}", model.name())));
    };
    let mut exp = args.experiment.clone();
    exp.alpha = numeric(&fpu.alpha, "alpha")?;
    exp.beta = numeric(&fpu.beta, "beta")?;
    for (c, name) in [(&fpu.eps, "eps"), (&fpu.h, "h")] {
        if *c != Coeff::sym(name) {
            return Err(CliError::Input(format!("`{name}` is set from the lattice size; leave it out of the model file")));
        }
    }
    let nf = model.normal_form()?;
    let header = Header::new("compare", args.seed, &(&args.mu_grid, &exp), &[&text]);
    let mut art = Artifacts::new(&args.out, header)?;
    let scan = sweep(&exp, &args.mu_grid, &nf, args.jobs)?;

    let mut table = String::from("mu,N,discrepancy,normalized\n");
    println!("{:>10} {:>6} {:>14} {:>14}", "mu", "N", "discrepancy", "disc/mu^4");
    for r in &scan.reports {
        table.push_str(&format!("{},{},{},{}\n", r.mu, r.n, r.discrepancy, r.normalized));
        println!("{:>10.6} {:>6} {:>14.6e} {:>14.6e}", r.mu, r.n, r.discrepancy, r.normalized);
        let mut series = String::from("t,discrepancy\n");
        for (t, d) in r.times.iter().zip(&r.per_time) {
            series.push_str(&format!("{t},{d}\n"));
        }
        art.csv(&format!("discrepancy_N{}.csv", r.n), &series)?;
    }
    println!("fitted exponent {:.3}, monotone decrease: {}", scan.exponent, scan.monotone());
    art.csv("compare.csv", &table)?;
    if let Some(r) = scan.reports.first() {
        art.gnuplot("discrepancy.gp", &format!("discrepancy_N{}.csv", r.n), "mode-energy discrepancy", &[(2, "discrepancy".into())], true)?;
    }
    let rows = scan.reports.iter().map(|r| Row { mu: r.mu, n: r.n, discrepancy: r.discrepancy, normalized: r.normalized }).collect();
    art.json("summary.json", &Summary { alpha: exp.alpha, beta: exp.beta, exponent: scan.exponent, monotone: scan.monotone(), rows })?;
    Ok(art.written().to_vec())
}
