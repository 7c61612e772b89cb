//! `wavenf`: normal forms, lattice and KdV runs, and verification suites.
//!
//! Exit codes: 0 success, 1 verification or I/O failure, 2 bad input,
//! 3 algebra error, 4 numerical blow-up.

mod artifact;
mod compare;
mod error;
mod normal_form;
mod simulate;
mod verify;

use clap::{Parser, Subcommand, ValueEnum};
use error::CliError;
use std::path::PathBuf;
use std::process::ExitCode;
use wavenf_core::kdv::Scheme;
use wavenf_core::lattice::{CompareExperiment, LocalizationExperiment, Stepper};

#[derive(Parser)]
#[command(name = "wavenf", version, about = "Normal forms of Hamiltonian PDEs near the wave equation")]
struct Cli {
    /// Seed for the random property suites; recorded in every output file.
    #[arg(long, global = true, default_value_t = 20_240_917)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the normal form of a model file.
    NormalForm {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, default_value = "out/normal-form")]
        out: PathBuf,
        /// Print the KdV-hierarchy match of the reported orders.
        #[arg(long)]
        check_hierarchy: bool,
    },
    /// Run a lattice or KdV simulation.
    Simulate {
        #[command(subcommand)]
        system: System,
    },
    /// Compare the FPU lattice with its normal-form flow across lattice sizes.
    Compare {
        #[arg(long)]
        model: PathBuf,
        /// Comma-separated values of mu = k0/N, e.g. 1/8,1/16,1/32.
        #[arg(long, default_value = "1/8,1/16,1/32")]
        mu_grid: String,
        #[arg(long, default_value_t = 1)]
        k0: usize,
        #[arg(long, default_value_t = 1.0)]
        c0: f64,
        /// The run ends at T_f/mu^3.
        #[arg(long = "tf", default_value_t = 1.0)]
        t_f: f64,
        #[arg(long, default_value_t = 0.1)]
        dt: f64,
        /// Concurrent lattice sizes.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[arg(long, default_value = "out/compare")]
        out: PathBuf,
    },
    /// Run the invariant suites.
    Verify {
        #[arg(long, value_enum, default_value_t = verify::Suite::All)]
        suite: verify::Suite,
        #[arg(long, default_value_t = 50)]
        draws: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum StepperArg {
    VelocityVerlet,
    Yoshida4,
}

#[derive(Clone, Copy, ValueEnum)]
enum SchemeArg {
    Ifrk4,
    Etdrk4,
}

#[derive(Subcommand)]
enum System {
    /// Single-mode lattice run with packet fit.
    Fpu {
        /// TOML experiment file; flags override its values.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long = "N")]
        n: Option<usize>,
        #[arg(long)]
        k0: Option<usize>,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        beta: Option<f64>,
        /// Coefficient of z^p/p in the potential.
        #[arg(long)]
        gamma: Option<f64>,
        #[arg(long)]
        p: Option<u32>,
        #[arg(long)]
        c0: Option<f64>,
        #[arg(long = "tf")]
        t_f: Option<f64>,
        #[arg(long)]
        dt: Option<f64>,
        #[arg(long, value_enum)]
        stepper: Option<StepperArg>,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long, default_value = "out/fpu")]
        out: PathBuf,
    },
    /// Hierarchy flow w_t = kappa(w) from a cosine datum.
    Kdv {
        #[arg(long = "N", default_value_t = 128)]
        n: usize,
        #[arg(long, default_value_t = 0.0)]
        gamma: f64,
        #[arg(long = "T", default_value_t = 1.0)]
        t_end: f64,
        #[arg(long, default_value_t = 1e-3)]
        dt: f64,
        #[arg(long, value_enum, default_value_t = SchemeArg::Etdrk4)]
        scheme: SchemeArg,
        #[arg(long, value_enum, default_value_t = simulate::Flow::Kappa3)]
        flow: simulate::Flow,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        /// Cosine amplitudes for k = 1, 2, ...
        #[arg(long, value_delimiter = ',', default_value = "1")]
        amplitudes: Vec<f64>,
        #[arg(long, default_value = "out/kdv")]
        out: PathBuf,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    let seed = cli.seed;
    match cli.command {
        Command::NormalForm { model, out, check_hierarchy } => {
            normal_form::run(&normal_form::NormalFormArgs { model, out, check_hierarchy, seed })?;
        }
        Command::Simulate { system: System::Fpu { config, n, k0, alpha, beta, gamma, p, c0, t_f, dt, stepper, samples, out } } => {
            let (base, text) = match &config {
                Some(path) => {
                    let text = std::fs::read_to_string(path)
                        .map_err(|e| CliError::Input(format!("reading {}: {e}", path.display())))?;
                    let exp: LocalizationExperiment =
                        toml::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
                    (Some(exp), text)
                }
                None => (None, String::new()),
            };
            let stepper = stepper.map(|s| match s {
                StepperArg::VelocityVerlet => Stepper::VelocityVerlet,
                StepperArg::Yoshida4 => Stepper::Yoshida4,
            });
            let o = simulate::FpuOverrides { n, k0, alpha, beta, gamma, p, c0, t_f, dt, stepper, samples };
            let exp = simulate::resolve_fpu(base, &o);
            simulate::run_fpu(&exp, &out, seed, &[&text])?;
        }
        Command::Simulate { system: System::Kdv { n, gamma, t_end, dt, scheme, flow, samples, amplitudes, out } } => {
            let scheme = match scheme {
                SchemeArg::Ifrk4 => Scheme::Ifrk4,
                SchemeArg::Etdrk4 => Scheme::Etdrk4,
            };
            simulate::run_kdv(&simulate::KdvRun { n, gamma, t_end, dt, scheme, flow, samples, amplitudes }, &out, seed)?;
        }
        Command::Compare { model, mu_grid, k0, c0, t_f, dt, jobs, out } => {
            let mut experiment = CompareExperiment::new(0.0, 0.0);
            experiment.k0 = k0;
            experiment.c0 = c0;
            experiment.t_f = t_f;
            experiment.dt = dt;
            let mu_grid = compare::parse_mu_grid(&mu_grid)?;
            compare::run(&compare::CompareArgs { model, out, mu_grid, experiment, jobs, seed })?;
        }
        Command::Verify { suite, draws } => {
            let outcomes = verify::run(suite, draws, seed)?;
            println!("seed {seed}");
            let mut failed = Vec::new();
            for o in &outcomes {
                println!("suite {}: {} ({})", o.suite, if o.pass { "PASS" } else { "FAIL" }, o.detail);
                if !o.pass {
                    failed.push(o.suite);
                }
            }
            if !failed.is_empty() {
                return Err(CliError::Verify(failed.join(", ")));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("wavenf: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
