//! `rehf` subcommands.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use rehf_core::{density_a, solve_mu, PhysParams};
use serde_json::json;

use crate::config::RunConfig;
use crate::error::{AppError, AppResult};
use crate::io::{field_dump, multiplier_csv, multiplier_rows, report_json, write_text};
use crate::run::{parse_seed_range, prepare, run_ensemble, run_one, worker_count};
use crate::verify::{run_suite, Level, SuiteConfig};

#[derive(Debug, Parser)]
#[command(name = "rehf", version, about = "Screened solver for the positive-temperature reduced Hartree-Fock equation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Chemical potential of the homogeneous gas with density kappa0.
    MuSolve {
        #[arg(long)]
        beta: f64,
        #[arg(long)]
        kappa0: f64,
    },
    /// Tabulate m(p) (closed form and contour) and the symbol L(p) as CSV.
    Multiplier {
        #[arg(long)]
        beta: f64,
        /// Chemical potential; exclusive with --kappa0.
        #[arg(long, conflicts_with = "kappa0", required_unless_present = "kappa0")]
        mu: Option<f64>,
        /// Mean density, from which mu is solved.
        #[arg(long)]
        kappa0: Option<f64>,
        #[arg(long, default_value_t = 0.1)]
        p_min: f64,
        #[arg(long, default_value_t = 50.0)]
        p_max: f64,
        #[arg(long, default_value_t = 20)]
        points: usize,
        /// Output file; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve one disorder realization and write its report.
    Solve {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        /// Also write phi, kappa and rho as text dumps into this directory.
        #[arg(long)]
        dump_fields: Option<PathBuf>,
    },
    /// Solve a range of seeds in parallel (REHF_WORKERS caps the pool).
    Ensemble {
        #[arg(long)]
        config: Option<PathBuf>,
        /// Inclusive range A..B, or one seed.
        #[arg(long)]
        seeds: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the property suite; writes the verdict as JSON to --out and as a
    /// table next to it (extension .txt).
    Verify {
        #[arg(long, default_value = "fast")]
        level: Level,
        #[arg(long)]
        out: PathBuf,
        /// Multiply the solver's screening multiplier by this factor.
        #[arg(long)]
        fault_scale: Option<f64>,
        /// Run checks one after another.
        #[arg(long)]
        sequential: bool,
    },
    /// Print the default run configuration.
    DefaultConfig,
}

fn load_config(path: &Option<PathBuf>) -> AppResult<RunConfig> {
    match path {
        Some(p) => RunConfig::load(p),
        None => Ok(RunConfig::default()),
    }
}

fn emit(out: &Option<PathBuf>, text: &str) -> AppResult<()> {
    match out {
        Some(p) => write_text(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

pub fn execute(cli: Cli) -> AppResult<()> {
    match cli.command {
        Command::MuSolve { beta, kappa0 } => {
            let s = solve_mu(kappa0, beta)?;
            let v = json!({
                "beta": beta,
                "kappa0": kappa0,
                "mu": s.mu,
                "bracket": [s.bracket.0, s.bracket.1],
                "density": s.density,
            });
            println!("{}", serde_json::to_string_pretty(&v).expect("json"));
            Ok(())
        }
        Command::Multiplier { beta, mu, kappa0, p_min, p_max, points, out } => {
            let (mu, kappa0) = match (mu, kappa0) {
                (Some(mu), _) => (mu, density_a(mu, beta)?),
                (None, Some(k)) => (solve_mu(k, beta)?.mu, k),
                (None, None) => return Err(AppError::Config("either --mu or --kappa0 is required".into())),
            };
            let params = PhysParams::new(beta, mu, kappa0)?;
            emit(&out, &multiplier_csv(&multiplier_rows(&params, p_min, p_max, points)?))
        }
        Command::Solve { config, seed, out, dump_fields } => {
            let cfg = load_config(&config)?;
            let setup = prepare(&cfg)?;
            let o = run_one(&cfg, &setup, seed)?;
            for w in &o.report.warnings {
                eprintln!("warning: {w}");
            }
            write_text(&out, &report_json(&o.report))?;
            if let Some(dir) = dump_fields {
                let rho = setup.evaluator.rho(&o.phi, &setup.params)?;
                write_text(&dir.join("phi.txt"), &field_dump("phi", &o.phi))?;
                write_text(&dir.join("kappa.txt"), &field_dump("kappa", &o.realization.kappa))?;
                write_text(&dir.join("rho.txt"), &field_dump("rho", &rho))?;
            }
            eprintln!(
                "converged in {} iterations, residual {:.3e}, max ratio {:.3}",
                o.report.iterations,
                o.report.residual,
                o.report.ratio_max()
            );
            Ok(())
        }
        Command::Ensemble { config, seeds, out } => {
            let cfg = load_config(&config)?;
            let seeds = parse_seed_range(&seeds)?;
            let rows = run_ensemble(&cfg, &seeds, &out, worker_count()?)?;
            eprintln!("{} members written to {}", rows.len(), out.display());
            Ok(())
        }
        Command::Verify { level, out, fault_scale, sequential } => {
            if let Some(f) = fault_scale {
                if !(f.is_finite() && f > 0.0) {
                    return Err(AppError::Config(format!("fault scale must be positive, got {f}")));
                }
            }
            let cfg = SuiteConfig { fault_scale, parallel: !sequential, ..SuiteConfig::new(level) };
            let verdict = run_suite(cfg);
            let table = verdict.table();
            write_text(&out, &verdict.to_json())?;
            write_text(&out.with_extension("txt"), &table)?;
            print!("{table}");
            if verdict.all_passed() {
                Ok(())
            } else {
                Err(AppError::VerifyFailed { failed: verdict.failed, total: verdict.checks.len() })
            }
        }
        Command::DefaultConfig => {
            print!("{}", RunConfig::default().to_text());
            Ok(())
        }
    }
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error[{}]: {e}", e.category());
            e.exit_code()
        }
    }
}
