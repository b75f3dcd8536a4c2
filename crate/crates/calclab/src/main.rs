use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use calclab::eval::{evaluate, to_csv};
use calclab::{run_suite, Format, Scenario};
use calclab_core::SearchMode;
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "calclab", version, about = "Numerical checks for Calderón commutators and sparse bounds")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a verification suite and write its report.
    Verify {
        #[arg(long, value_parser = clap::builder::PossibleValuesParser::new(calclab::suites::SUITES))]
        suite: String,
        /// Number of `a_j` inputs.
        #[arg(long)]
        m: Option<usize>,
        /// Cells in the fine grid.
        #[arg(long)]
        n: Option<usize>,
        /// First RNG seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Interval search set: dyadic, dilated or exhaustive.
        #[arg(long)]
        search: Option<SearchMode>,
        /// Scenario JSON supplying every other field.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Evaluate one operator on the scenario's inputs and print `x,value` rows.
    Eval {
        /// Operator name; overrides the scenario's `op`.
        #[arg(long)]
        op: Option<String>,
        /// Scenario JSON.
        #[arg(long)]
        config: PathBuf,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn load(path: Option<&PathBuf>) -> Result<Scenario> {
    match path {
        Some(p) => {
            let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            Scenario::from_json(&text)
        }
        None => Ok(Scenario::default()),
    }
}

fn write(out: Option<&PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Verify { suite, m, n, seed, search, config, out, format } => {
            let mut s = load(config.as_ref())?;
            s.suite = suite;
            if let Some(m) = m {
                s.m = m;
            }
            if let Some(n) = n {
                s.n_cells = n;
            }
            if let Some(seed) = seed {
                s.seed = seed;
            }
            if let Some(search) = search {
                s.search = search;
            }
            let report = run_suite(&s)?;
            write(out.as_ref(), &report.render(format))?;
            for c in &report.checks {
                eprintln!("{} {} constant={} threshold={}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.constant, c.threshold);
            }
            Ok(report.passed())
        }
        Command::Eval { op, config, out } => {
            let s = load(Some(&config))?;
            let op = op.or_else(|| s.op.clone()).context("no operator given; pass --op or set \"op\" in the config")?;
            let rows = evaluate(&op, &s)?;
            write(out.as_ref(), &to_csv(&rows))?;
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
