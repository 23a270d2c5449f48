//! `rctls`: generate test problems, run the randomized core TLS solver and
//! reproduce the benchmark tables as CSV.

mod bench;
mod output;
mod solve;

use clap::{Parser, Subcommand, ValueEnum};
use rctls::problems::Params;
use std::path::PathBuf;
use std::process::ExitCode;

/// Largest `n` accepted for 1-D problems.
pub const MAX_N_1D: usize = 4096;

#[derive(Parser)]
#[command(name = "rctls", version, about = "Randomized core reduction for ill-posed total least squares")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one problem for one or more seeds and write one row per trial.
    Solve(solve::SolveArgs),
    /// Run a benchmark suite and write its table.
    Bench(bench::BenchArgs),
    /// Write a generated problem in the plain-text exchange format.
    Export(ExportArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Human,
}

/// Problem selection shared by `solve` and `export`.
#[derive(clap::Args, Debug, Clone)]
pub struct ProblemArgs {
    /// shaw, gravity, foxgood, phillips, deriv2, gravity2d or blur.
    #[arg(long, default_value = "shaw")]
    pub problem: String,
    /// Size: n for 1-D problems (at most 4096), grid side for gravity2d and blur (at most 64).
    #[arg(long, default_value_t = 256)]
    pub n: usize,
    /// Generator parameter as key=value, repeatable (d for gravity and gravity2d; band, spread for blur).
    #[arg(long = "param", value_parser = parse_param)]
    pub params: Vec<(String, f64)>,
}

impl ProblemArgs {
    pub fn build(&self) -> rctls::Result<rctls::problems::TestProblem> {
        let two_d = matches!(self.problem.to_ascii_lowercase().as_str(), "gravity2d" | "blur");
        if !two_d && self.n > MAX_N_1D {
            return Err(rctls::Error::InvalidInput(format!(
                "n = {} exceeds the 1-D cap of {MAX_N_1D}",
                self.n
            )));
        }
        let params: Params = self.params.iter().cloned().collect();
        rctls::problems::make_problem(&self.problem, self.n, &params)
    }
}

fn parse_param(s: &str) -> Result<(String, f64), String> {
    let (k, v) = s.split_once('=').ok_or_else(|| format!("expected key=value, got '{s}'"))?;
    let v: f64 = v.trim().parse().map_err(|_| format!("bad value in '{s}'"))?;
    Ok((k.trim().to_string(), v))
}

#[derive(clap::Args)]
struct ExportArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    /// Output file; standard output when omitted or "-".
    #[arg(long)]
    out: Option<PathBuf>,
}

fn export(args: &ExportArgs) -> rctls::Result<()> {
    let p = args.problem.build()?;
    let mut sink = output::open(args.out.as_deref())?;
    rctls::problems::write_problem(&p, &mut sink)?;
    sink.flush()?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Solve(a) => solve::run(a),
        Command::Bench(a) => bench::run(a),
        Command::Export(a) => export(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error[{}]: {e}", e.code());
            ExitCode::FAILURE
        }
    }
}
