//! Single solves and parallel ensembles driven by a [`RunConfig`].

use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;
use rehf_core::{
    sample, solve, DisorderRealization, MultiplierSource, RealField, SolveReport, SolveSetup, DEFAULT_EIG_BUDGET,
};

use crate::config::RunConfig;
use crate::error::{AppError, AppResult};
use crate::io::{report_json, write_text};

/// Environment variable overriding the ensemble worker count.
pub const WORKERS_ENV: &str = "REHF_WORKERS";

pub fn prepare(cfg: &RunConfig) -> AppResult<SolveSetup> {
    Ok(SolveSetup::new(&cfg.grid()?, cfg.beta, cfg.kappa0(), MultiplierSource::Discrete, DEFAULT_EIG_BUDGET)?)
}

#[derive(Debug, Clone)]
pub struct SolveOutcome {
    pub seed: u64,
    pub realization: DisorderRealization,
    pub phi: RealField,
    pub report: SolveReport,
}

pub fn run_one(cfg: &RunConfig, setup: &SolveSetup, seed: u64) -> AppResult<SolveOutcome> {
    let realization = sample(&cfg.disorder_spec(seed)?, setup.grid())?;
    let zero = RealField::zeros(*setup.grid());
    let (phi, report) = solve(&realization, setup, &cfg.solve_config(), &zero)?;
    Ok(SolveOutcome { seed, realization, phi, report })
}

/// Parses `a..b` (inclusive) or a single seed.
pub fn parse_seed_range(s: &str) -> AppResult<Vec<u64>> {
    let bad = || AppError::Config(format!("seed range {s:?} is not of the form A..B with A <= B"));
    match s.split_once("..") {
        Some((a, b)) => {
            let a: u64 = a.trim().parse().map_err(|_| bad())?;
            let b: u64 = b.trim().parse().map_err(|_| bad())?;
            if a > b {
                return Err(bad());
            }
            Ok((a..=b).collect())
        }
        None => Ok(vec![s.trim().parse().map_err(|_| bad())?]),
    }
}

pub fn worker_count() -> AppResult<Option<usize>> {
    match std::env::var(WORKERS_ENV) {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(AppError::Config(format!("{WORKERS_ENV} must be a positive integer, got {v:?}"))),
        },
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleRow {
    pub seed: u64,
    pub kappa_prime_l2: f64,
    pub phi_h2: f64,
    pub iterations: usize,
    pub ratio_max: f64,
    pub residual: f64,
}

impl From<&SolveOutcome> for EnsembleRow {
    fn from(o: &SolveOutcome) -> Self {
        Self {
            seed: o.seed,
            kappa_prime_l2: o.report.kappa_prime_l2,
            phi_h2: o.report.phi_h2,
            iterations: o.report.iterations,
            ratio_max: o.report.ratio_max(),
            residual: o.report.residual,
        }
    }
}

pub fn ensemble_csv(rows: &[EnsembleRow]) -> String {
    let mut s = String::from("seed,kappa_prime_l2,phi_h2,iterations,ratio_max,residual\n");
    for r in rows {
        let _ = writeln!(
            s,
            "{},{:.16e},{:.16e},{},{:.16e},{:.16e}",
            r.seed, r.kappa_prime_l2, r.phi_h2, r.iterations, r.ratio_max, r.residual
        );
    }
    s
}

/// Solves every seed on a bounded pool, writes `seed_<s>.json` per member and
/// `aggregate.csv` in seed order. The first failing seed (in seed order) is
/// reported after all members have run.
pub fn run_ensemble(
    cfg: &RunConfig,
    seeds: &[u64],
    out_dir: &Path,
    workers: Option<usize>,
) -> AppResult<Vec<EnsembleRow>> {
    let setup = prepare(cfg)?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = workers {
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| AppError::Config(format!("cannot start worker pool: {e}")))?;
    let results: Vec<AppResult<EnsembleRow>> = pool.install(|| {
        seeds
            .par_iter()
            .map(|&seed| {
                let o = run_one(cfg, &setup, seed)?;
                write_text(&out_dir.join(format!("seed_{seed}.json")), &report_json(&o.report))?;
                Ok(EnsembleRow::from(&o))
            })
            .collect()
    });
    let mut rows = Vec::with_capacity(seeds.len());
    for r in results {
        rows.push(r?);
    }
    rows.sort_by_key(|r| r.seed);
    write_text(&out_dir.join("aggregate.csv"), &ensemble_csv(&rows))?;
    Ok(rows)
}
