use crate::output::{self, sci, Table};
use crate::solve::{run_trial, Baseline, DEFAULT_MAX_RESTARTS, MAX_DENSE_REFERENCE};
use crate::Format;
use clap::ValueEnum;
use rayon::prelude::*;
use rctls::corered::{randomized_svd, RandSvd};
use rctls::linalg::{relative_error, svd_dense, RngSeed};
use rctls::operators::{synthetic_operator, LinearOperator};
use rctls::problems::{make_problem, Params, TestProblem};
use rctls::rangefinder::{dense_residual_norm, fixed_rank_rangefinder, RangeFinderConfig};
use rctls::tls::{bound_report, range_bound, solve_from_svd_with_restart, solve_randomized_tls_with_restart, BoundParams};
use rctls::Result;
use std::path::PathBuf;
use std::time::Instant;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    /// 1-D problems at n = 1024, ε = 1e-3 (shaw, foxgood, phillips, gravity, deriv2; i_laplace and heat are not implemented).
    Table2,
    /// The same five 1-D problems at n = 4096.
    Table3,
    /// 2-D gravity on grids 8, 16, 32, 64, ε = 1e-3.
    Table4,
    /// Gaussian blur on grids 16, 32, 64, ε = 0.1.
    Table5,
    /// Empirical violation rates of the range and residual bounds.
    Bounds,
}

#[derive(clap::Args, Debug)]
pub struct BenchArgs {
    #[arg(long, value_enum)]
    pub suite: Suite,
    /// Trials per row; defaults to 5 for tables and 500 for bounds.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub trials: Option<u64>,
    /// Base seed; trial i uses seed + i.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Subspace iterations q.
    #[arg(long, default_value_t = 1)]
    pub power: usize,
    #[arg(long, default_value_t = DEFAULT_MAX_RESTARTS)]
    pub max_restarts: usize,
    /// Output file; standard output when omitted or "-".
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

const TABLE_1D: [&str; 5] = ["shaw", "foxgood", "phillips", "gravity", "deriv2"];
const BOUND_DELTA: f64 = 0.01;

struct Entry {
    problem: &'static str,
    size: usize,
    eps: f64,
}

fn entries(suite: Suite) -> Vec<Entry> {
    let one_d = |size| TABLE_1D.iter().map(move |&problem| Entry { problem, size, eps: 1e-3 }).collect();
    match suite {
        Suite::Table2 => one_d(1024),
        Suite::Table3 => one_d(4096),
        Suite::Table4 => [8, 16, 32, 64].map(|size| Entry { problem: "gravity2d", size, eps: 1e-3 }).into(),
        Suite::Table5 => [16, 32, 64].map(|size| Entry { problem: "blur", size, eps: 0.1 }).into(),
        Suite::Bounds => Vec::new(),
    }
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let k = v.len();
    if k % 2 == 1 {
        v[k / 2]
    } else {
        0.5 * (v[k / 2 - 1] + v[k / 2])
    }
}

/// Rank-`r` factorization used for the deterministic comparison column:
/// exact SVD up to the dense limit, a heavily iterated fixed-rank sketch above it.
fn partial_svd(p: &TestProblem, r: usize, seed: RngSeed) -> Result<RandSvd> {
    if p.n <= MAX_DENSE_REFERENCE {
        return Ok(RandSvd::from_exact(&svd_dense(&p.dense()?)?, r));
    }
    let cfg = RangeFinderConfig {
        target_rank: Some(r),
        oversample: 10.min(p.n - r),
        power: 4,
        seed,
        ..Default::default()
    };
    Ok(randomized_svd(p.op.as_ref(), &cfg)?.truncated(r))
}

fn table_row(e: &Entry, args: &BenchArgs, trials: u64) -> Result<Vec<String>> {
    let p = make_problem(e.problem, e.size, &Params::new())?;
    let (x_star, kind) = p.tls_reference(MAX_DENSE_REFERENCE)?;
    let records = (0..trials)
        .into_par_iter()
        .map(|i| {
            let cfg = RangeFinderConfig {
                tolerance: e.eps,
                power: args.power,
                seed: RngSeed(args.seed.wrapping_add(i)),
                ..Default::default()
            };
            run_trial(&p, Some(&x_star), Baseline::Classical, &cfg, args.max_restarts)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut ranks: Vec<usize> = records.iter().map(|r| r.rank).collect();
    ranks.sort_unstable();
    let r = ranks[(ranks.len() - 1) / 2];

    let start = Instant::now();
    let svd = partial_svd(&p, r, RngSeed(args.seed).derive(0xE7))?;
    let (run, _) = solve_from_svd_with_restart(p.op.as_ref(), &p.b, svd, args.max_restarts)?;
    let time_p = start.elapsed().as_secs_f64();
    let restarts: usize = records.iter().map(|r| r.restarts).sum();
    eprintln!("{} n={}: done ({} trials, {restarts} restarts)", p.name, p.n, trials);

    Ok(vec![
        p.name.clone(),
        p.n.to_string(),
        format!("{:e}", e.eps),
        sci(median(records.iter().filter_map(|r| r.err_vs_baseline).collect())),
        format!("{:.4}", median(records.iter().map(|r| r.time_seconds).collect())),
        median(ranks.iter().map(|&r| r as f64).collect()).to_string(),
        sci(relative_error(&run.solution.x, &x_star)),
        format!("{time_p:.4}"),
        kind.as_str().to_string(),
        trials.to_string(),
    ])
}

const TABLE_HEADER: [&str; 10] = ["problem", "n", "epsilon", "err", "time_s", "rank", "err_p", "time_p_s", "reference", "trials"];
const BOUNDS_HEADER: [&str; 12] = [
    "experiment", "problem", "n", "k", "s", "p", "q", "delta", "trials", "violations", "rate", "max_ratio",
];

fn rate_row(experiment: &str, problem: &str, n: usize, prm: &BoundParams, trials: u64, ratios: &[f64]) -> Vec<String> {
    let violations = ratios.iter().filter(|&&r| r > 1.0).count();
    vec![
        experiment.to_string(),
        problem.to_string(),
        n.to_string(),
        prm.k.to_string(),
        prm.s.to_string(),
        prm.p.to_string(),
        prm.q.to_string(),
        prm.delta.to_string(),
        trials.to_string(),
        violations.to_string(),
        format!("{:.4}", violations as f64 / trials as f64),
        sci(ratios.iter().copied().fold(0.0, f64::max)),
    ]
}

/// Range bound on a synthetic geometric spectrum (ratio 0.7, n = 64, k = 10, s = 5)
/// over p ∈ 0..=5, q ∈ 0..=2, and the residual bound on three 1-D problems at n = 256.
fn bounds_table(args: &BenchArgs, trials: u64, table: &mut Table) -> Result<()> {
    let n = 64;
    let sigma: Vec<f64> = (0..n).map(|i| 0.7f64.powi(i as i32)).collect();
    let (op, _) = synthetic_operator(&sigma, n, n, RngSeed(args.seed).derive(1))?;
    let a = op.to_dense()?;
    for p in 0..=5 {
        for q in 0..=2 {
            let prm = BoundParams { k: 10, s: 5, p, q, delta: BOUND_DELTA };
            let bound = range_bound(&sigma, n, &prm)?;
            let ratios = (0..trials)
                .into_par_iter()
                .map(|t| {
                    let cfg = RangeFinderConfig {
                        oversample: prm.s,
                        power: q,
                        balance: p,
                        seed: RngSeed(args.seed).derive(100 + (p * 3 + q) as u64).derive(t),
                        ..Default::default()
                    };
                    let basis = fixed_rank_rangefinder(&op, prm.k, &cfg)?;
                    Ok(dense_residual_norm(&a, &basis.q_basis)? / bound)
                })
                .collect::<Result<Vec<_>>>()?;
            table.push(rate_row("range", "geometric0.7", n, &prm, trials, &ratios));
        }
    }

    for name in ["shaw", "gravity", "foxgood"] {
        let problem = make_problem(name, 256, &Params::new())?;
        let exact = svd_dense(&problem.dense()?)?;
        let s = 5;
        let runs = (0..trials)
            .into_par_iter()
            .map(|t| {
                let cfg = RangeFinderConfig {
                    tolerance: 1e-3,
                    power: args.power,
                    seed: RngSeed(args.seed.wrapping_add(t)),
                    ..Default::default()
                };
                let (run, _) = solve_randomized_tls_with_restart(problem.op.as_ref(), &problem.b, &cfg, args.max_restarts)?;
                let prm = BoundParams {
                    k: run.solution.rank.saturating_sub(s),
                    s,
                    p: 0,
                    q: args.power,
                    delta: BOUND_DELTA,
                };
                let report = bound_report(&exact, &run.solution, prm, None)?;
                Ok((report.k, run.solution.residual_norm / report.residual_bound))
            })
            .collect::<Result<Vec<_>>>()?;
        let ratios: Vec<f64> = runs.iter().map(|r| r.1).collect();
        let k_med = median(runs.iter().map(|r| r.0 as f64).collect()) as usize;
        let prm = BoundParams { k: k_med, s, p: 0, q: args.power, delta: BOUND_DELTA };
        table.push(rate_row("residual", name, 256, &prm, trials, &ratios));
    }
    Ok(())
}

pub fn run(args: &BenchArgs) -> Result<()> {
    let mut sink = output::open(args.out.as_deref())?;
    let table = match args.suite {
        Suite::Bounds => {
            let mut t = Table::new(BOUNDS_HEADER.to_vec());
            bounds_table(args, args.trials.unwrap_or(500), &mut t)?;
            t
        }
        suite => {
            let trials = args.trials.unwrap_or(5);
            let mut t = Table::new(TABLE_HEADER.to_vec());
            for e in entries(suite) {
                t.push(table_row(&e, args, trials)?);
            }
            t
        }
    };
    table.write(args.format, &mut sink)
}
