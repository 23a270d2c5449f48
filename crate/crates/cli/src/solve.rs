use crate::output::{self, opt_sci, sci, Table};
use crate::{Format, ProblemArgs};
use clap::ValueEnum;
use rayon::prelude::*;
use rctls::linalg::{relative_error, RngSeed};
use rctls::problems::{read_problem, TestProblem};
use rctls::rangefinder::RangeFinderConfig;
use rctls::tls::{solve_randomized_tls_with_restart, truncated_tls};
use rctls::{Error, Result};
use std::fs::File;
use std::io::BufReader;
use std::path::PathBuf;
use std::time::Instant;

/// Largest `n` for which dense classical TLS is attempted as a reference.
pub const MAX_DENSE_REFERENCE: usize = 1024;

pub const DEFAULT_MAX_RESTARTS: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Baseline {
    Classical,
    Truncated,
    None,
}

#[derive(clap::Args, Debug)]
pub struct SolveArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    /// Read the problem from an exported file instead of generating it.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Range-finder tolerance ε.
    #[arg(long, default_value_t = 1e-3)]
    pub eps: f64,
    /// Subspace iterations q.
    #[arg(long, default_value_t = 1)]
    pub power: usize,
    /// Seed of the first trial; trial i uses seed + i.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub trials: u64,
    /// Reference for err_classical: classical TLS, truncated TLS at the computed rank, or none.
    #[arg(long, value_enum, default_value_t = Baseline::Classical)]
    pub baseline: Baseline,
    /// Times the rank may be reduced by one when the core is near-nongeneric.
    #[arg(long, default_value_t = DEFAULT_MAX_RESTARTS)]
    pub max_restarts: usize,
    /// Output file; standard output when omitted or "-".
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub problem: String,
    pub n: usize,
    pub epsilon: f64,
    pub seed: RngSeed,
    pub rank: usize,
    pub err_vs_baseline: Option<f64>,
    pub err_vs_true: f64,
    pub residual_norm: f64,
    pub time_seconds: f64,
    pub restarts: usize,
}

pub const HEADER: [&str; 9] = ["problem", "n", "epsilon", "seed", "rank", "err_classical", "err_true", "residual", "time_s"];

impl RunRecord {
    fn cells(&self) -> Vec<String> {
        vec![
            self.problem.clone(),
            self.n.to_string(),
            format!("{:e}", self.epsilon),
            self.seed.0.to_string(),
            self.rank.to_string(),
            opt_sci(self.err_vs_baseline),
            sci(self.err_vs_true),
            sci(self.residual_norm),
            format!("{:.4}", self.time_seconds),
        ]
    }
}

fn load(args: &SolveArgs) -> Result<TestProblem> {
    match &args.input {
        Some(path) => Ok(read_problem(BufReader::new(File::open(path)?))?.into_problem()),
        None => args.problem.build(),
    }
}

pub fn run_trial(
    p: &TestProblem,
    reference: Option<&[f64]>,
    baseline: Baseline,
    cfg: &RangeFinderConfig,
    max_restarts: usize,
) -> Result<RunRecord> {
    let start = Instant::now();
    let (run, restarts) = solve_randomized_tls_with_restart(p.op.as_ref(), &p.b, cfg, max_restarts)?;
    let time_seconds = start.elapsed().as_secs_f64();
    let sol = run.solution;
    let err_vs_baseline = match baseline {
        Baseline::Classical => reference.map(|x| relative_error(&sol.x, x)),
        Baseline::Truncated => Some(relative_error(&sol.x, &truncated_tls(&p.dense()?, &p.b, sol.rank)?.x)),
        Baseline::None => None,
    };
    Ok(RunRecord {
        problem: p.name.clone(),
        n: p.n,
        epsilon: cfg.tolerance,
        seed: cfg.seed,
        rank: sol.rank,
        err_vs_baseline,
        err_vs_true: relative_error(&sol.x, &p.x_true),
        residual_norm: sol.residual_norm,
        time_seconds,
        restarts,
    })
}

pub fn solve_records(args: &SolveArgs) -> Result<Vec<RunRecord>> {
    if !(args.eps > 0.0 && args.eps.is_finite()) {
        return Err(Error::InvalidInput(format!("--eps must be positive, got {}", args.eps)));
    }
    let p = load(args)?;
    let reference = match args.baseline {
        Baseline::Classical => {
            let (x, kind) = p.tls_reference(MAX_DENSE_REFERENCE)?;
            eprintln!("reference x*: {}", kind.as_str());
            Some(x)
        }
        _ => None,
    };
    let mut records = (0..args.trials)
        .into_par_iter()
        .map(|i| {
            let cfg = RangeFinderConfig {
                tolerance: args.eps,
                power: args.power,
                seed: RngSeed(args.seed.wrapping_add(i)),
                ..Default::default()
            };
            run_trial(&p, reference.as_deref(), args.baseline, &cfg, args.max_restarts)
        })
        .collect::<Result<Vec<_>>>()?;
    records.sort_by_key(|r| r.seed);
    for r in records.iter().filter(|r| r.restarts > 0) {
        eprintln!("seed {}: near-nongeneric core, rank reduced {} time(s)", r.seed.0, r.restarts);
    }
    Ok(records)
}

pub fn run(args: &SolveArgs) -> Result<()> {
    let mut sink = output::open(args.out.as_deref())?;
    let records = solve_records(args)?;
    let mut table = Table::new(HEADER.to_vec());
    for r in &records {
        table.push(r.cells());
    }
    table.write(args.format, &mut sink)
}
