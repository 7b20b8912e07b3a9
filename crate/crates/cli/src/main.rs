//! `pvopt`: certificates, validation, sweeps and benchmark runs from the command line.
//!
//! Exit codes: 0 success, 1 anomalies found (`validate` only), 2 usage or input error.

mod render;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};

use pvopt_core::harness::{self, Algorithm, RunConfig};
use pvopt_core::optimum::{global_optimum, vessel_grid_sweep};
use pvopt_core::validator::{self, ProvenOptima, ValidationTolerances};
use pvopt_core::Problem;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Text,
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ProblemArg {
    Vessel,
    Cantilever,
}

impl From<ProblemArg> for Problem {
    fn from(p: ProblemArg) -> Self {
        match p {
            ProblemArg::Vessel => Problem::Vessel,
            ProblemArg::Cantilever => Problem::Cantilever,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum AlgoArg {
    De,
    Random,
}

#[derive(Parser)]
#[command(name = "pvopt", version, about = "Certified optima for the pressure-vessel and cantilever-beam benchmarks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the certified global optimum of a problem.
    Optimum {
        problem: ProblemArg,
        #[arg(long, value_enum, default_value = "text")]
        format: OutputFormat,
    },
    /// Screen a corpus of claimed results against the certified optima.
    Validate {
        /// Corpus file; defaults to the bundled table of published vessel results.
        input: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "text")]
        format: OutputFormat,
        /// How far below the optimum a claim may sit.
        #[arg(long, env = "PVOPT_CLAIM_TOL", default_value_t = 1e-3)]
        claim_tol: f64,
        /// Allowed |recomputed - reported| objective.
        #[arg(long, env = "PVOPT_REPORT_TOL", default_value_t = 0.01)]
        report_tol: f64,
        /// Decimal places of published design vectors (0 disables the rounding allowance).
        #[arg(long, env = "PVOPT_DESIGN_DECIMALS", default_value_t = 4)]
        decimals: u32,
    },
    /// Minimize the vessel cost for every thickness pair (I, J) in [1, 99]^2.
    Sweep {
        #[arg(long, value_enum, default_value = "csv")]
        format: OutputFormat,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Run a seeded batch of baseline optimizers and report gaps to the optimum.
    Bench {
        problem: ProblemArg,
        #[arg(long, value_enum, default_value = "de")]
        algo: AlgoArg,
        /// Seeds as an inclusive range `a..b` or a comma list.
        #[arg(long, default_value = "1..20")]
        seeds: String,
        #[arg(long, default_value_t = 50_000)]
        budget: usize,
        #[arg(long, default_value_t = 40)]
        population: usize,
        #[arg(long, default_value_t = 0.7)]
        f: f64,
        #[arg(long, default_value_t = 0.9)]
        cr: f64,
        #[arg(long, default_value_t = 1e9)]
        penalty: f64,
        /// Relative-gap thresholds for success counts.
        #[arg(long, value_delimiter = ',', default_value = "0.001,0.01")]
        thresholds: Vec<f64>,
        #[arg(long, value_enum, default_value = "text")]
        format: OutputFormat,
        /// Directory to write one history CSV per seed.
        #[arg(long)]
        history: Option<PathBuf>,
    },
}

fn parse_seeds(arg: &str) -> anyhow::Result<Vec<u64>> {
    if let Some((a, b)) = arg.split_once("..") {
        let (a, b): (u64, u64) = (a.trim().parse()?, b.trim().parse()?);
        if a > b {
            bail!("empty seed range {arg}");
        }
        return Ok((a..=b).collect());
    }
    let seeds = arg.split(',').map(|s| s.trim().parse::<u64>()).collect::<Result<Vec<_>, _>>()?;
    if seeds.is_empty() {
        bail!("no seeds given");
    }
    Ok(seeds)
}

fn open_output(path: Option<&Path>) -> anyhow::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).with_context(|| format!("cannot create {}", p.display()))?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn execute(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.command {
        Command::Optimum { problem, format } => {
            let cert = global_optimum(problem.into())?;
            let mut out = open_output(None)?;
            render::certificate(&mut out, &cert, format)?;
            out.flush()?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Validate { input, format, claim_tol, report_tol, decimals } => {
            let records = match &input {
                Some(path) => validator::load_corpus(path)?,
                None => validator::bundled_corpus(),
            };
            let tol = ValidationTolerances {
                claim: claim_tol,
                report: report_tol,
                design_decimals: (decimals > 0).then_some(decimals),
                ..Default::default()
            };
            let report = validator::corpus_report(&records, &ProvenOptima::certified()?, &tol)?;
            let mut out = open_output(None)?;
            render::corpus(&mut out, &report, format)?;
            out.flush()?;
            Ok(if report.anomalies == 0 { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::Sweep { format, output } => {
            let sweep = vessel_grid_sweep()?;
            let mut out = open_output(output.as_deref())?;
            render::sweep(&mut out, &sweep, format)?;
            out.flush()?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Bench { problem, algo, seeds, budget, population, f, cr, penalty, thresholds, format, history } => {
            let algorithm = match algo {
                AlgoArg::De => Algorithm::DifferentialEvolution,
                AlgoArg::Random => Algorithm::RandomSearch,
            };
            let configs: Vec<RunConfig> = parse_seeds(&seeds)?
                .into_iter()
                .map(|seed| RunConfig {
                    algorithm,
                    seed,
                    budget,
                    population,
                    f,
                    cr,
                    penalty_coefficient: penalty,
                    ..RunConfig::default()
                })
                .collect();
            let report = harness::batch(problem.into(), &configs, &thresholds)?;
            if let Some(dir) = history {
                std::fs::create_dir_all(&dir).with_context(|| format!("cannot create {}", dir.display()))?;
                for r in &report.runs {
                    let path = dir.join(format!("seed-{}.csv", r.config.seed));
                    let file = File::create(&path).with_context(|| format!("cannot create {}", path.display()))?;
                    harness::write_history_csv(r, BufWriter::new(file))?;
                }
            }
            let mut out = open_output(None)?;
            render::batch(&mut out, &report, format)?;
            out.flush()?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
