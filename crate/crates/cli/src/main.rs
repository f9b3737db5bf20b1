//! `toric-em`: lattice-point multiplicities, twisted Duistermaat-Heckman
//! distributions and Euler-Maclaurin verification reports.
//!
//! Exit codes: 0 pass, 1 assertion failure, 2 input error.

mod commands;
mod input;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};
use toric_em::Error;

use output::{emit, Format, Output};

#[derive(Parser)]
#[command(name = "toric-em", version, about = "Exact Euler-Maclaurin expansions of toric quantization multiplicities")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct OutputArgs {
    /// Write to a file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Subcommand)]
enum Command {
    /// Lattice points with nonzero multiplicity m(lambda, k), as CSV.
    Enumerate {
        /// Model JSON file (or inline JSON).
        #[arg(long)]
        model: String,
        #[arg(long)]
        k: i64,
        /// Lattice box a,b[,c,d]; required for unbounded models.
        #[arg(long, allow_hyphen_values = true)]
        window: Option<String>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// m(lambda, k) on every lattice point of a window, as CSV.
    Character {
        #[arg(long)]
        model: String,
        #[arg(long)]
        k: i64,
        #[arg(long, allow_hyphen_values = true)]
        window: Option<String>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// The distribution DH_n as a JSON term list, optionally paired.
    Dh {
        #[arg(long)]
        model: String,
        #[arg(long)]
        n: u32,
        /// Polynomial expression in x, y, z, or a test-function JSON file.
        #[arg(long, allow_hyphen_values = true)]
        pair: Option<String>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Kostant partition function values and chamber polynomials.
    Partition {
        /// Vector list as JSON (file or inline), e.g. [[1,0],[0,1],[1,1]].
        #[arg(long)]
        delta: String,
        #[arg(long, allow_hyphen_values = true, conflicts_with = "chambers")]
        lambda: Option<String>,
        #[arg(long)]
        chambers: bool,
        /// Highest D_n in the chamber polynomials (default |delta| - rank).
        #[arg(long)]
        n: Option<u32>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Verification suites; exit status 1 when an assertion fails.
    Verify {
        #[command(subcommand)]
        suite: Suite,
    },
    /// Graded Todd components for diagonal weights or a general matrix.
    Todd {
        #[arg(long)]
        n: usize,
        /// Weight vectors as JSON, e.g. [[1,0],[0,1]]; default [[1]].
        #[arg(long, conflicts_with = "dim")]
        weights: Option<String>,
        /// Matrix size for the power-sum form of B_n.
        #[arg(long)]
        dim: Option<usize>,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Subcommand)]
enum Suite {
    /// Exact polynomial identity; defaults to the bundled corpus and all monomials of degree <= 3.
    Exact {
        #[arg(long)]
        model: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        pair: Option<String>,
        /// Largest k checked.
        #[arg(long, default_value_t = 10)]
        k: i64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Remainder order of the truncated expansion against a smooth bump.
    Asymptotic {
        #[arg(long, requires_all = ["pair", "n"])]
        model: Option<String>,
        /// Test-function JSON file or inline JSON.
        #[arg(long, requires = "model")]
        pair: Option<String>,
        /// Truncation order N.
        #[arg(long, requires = "model")]
        n: Option<u32>,
        #[arg(long, default_value = "8,16,32,64")]
        ks: String,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Lattice-point count against the integrated expansion.
    Rr {
        #[arg(long, requires = "k")]
        model: Option<String>,
        #[arg(long)]
        k: Option<i64>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Cone decompositions of the P1 x P1 character at several regular values.
    Walls {
        /// Regular values, comma separated.
        #[arg(long, allow_hyphen_values = true)]
        r: Option<String>,
        #[arg(long, default_value_t = 4)]
        k: i64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Kostant counts against limits of the chamber polynomials.
    Continuity {
        #[arg(long, default_value = "[[1,0],[0,1],[1,1]]")]
        delta: String,
        #[arg(long, allow_hyphen_values = true)]
        window: Option<String>,
        /// Limit direction (repeatable), e.g. --eps 2,1 --eps 1/3,1.
        #[arg(long, allow_hyphen_values = true)]
        eps: Vec<String>,
        #[command(flatten)]
        output: OutputArgs,
    },
}

fn run(cli: Cli) -> Result<(Output, OutputArgs)> {
    use commands::*;
    use input::*;
    Ok(match cli.command {
        Command::Enumerate { model, k, window, output } => (enumerate(&load_model(&model)?, k, window.as_deref())?, output),
        Command::Character { model, k, window, output } => (character(&load_model(&model)?, k, window.as_deref())?, output),
        Command::Dh { model, n, pair, output } => (dh(&load_model(&model)?, n, pair.as_deref())?, output),
        Command::Partition { delta, lambda, chambers, n, output } => (partition(&load_delta(&delta)?, lambda.as_deref(), chambers, n)?, output),
        Command::Todd { n, weights, dim, output } => {
            let weights = match weights {
                Some(w) => Some(serde_json::from_value(load_json(&w)?).map_err(|e| anyhow::anyhow!("--weights: {e}"))?),
                None => None,
            };
            (todd(n, weights, dim)?, output)
        }
        Command::Verify { suite } => match suite {
            Suite::Exact { model, pair, k, output } => {
                let spec = model.as_deref().map(load_model).transpose()?;
                (verify_exact_suite(spec.as_ref(), pair.as_deref(), k)?, output)
            }
            Suite::Asymptotic { model, pair, n, ks, output } => {
                let ks = parse_ints(&ks, "--ks")?;
                let cases = match (model, pair, n) {
                    (Some(m), Some(p), Some(n)) => {
                        let spec = load_model(&m)?;
                        let f = parse_test_function(&p, spec.build()?.rank())?;
                        vec![("model".to_string(), spec, f, n)]
                    }
                    _ => default_asymptotic_cases(),
                };
                (verify_asymptotic_suite(cases, &ks)?, output)
            }
            Suite::Rr { model, k, output } => {
                let spec = model.as_deref().map(load_model).transpose()?;
                (verify_rr_suite(spec.as_ref(), k)?, output)
            }
            Suite::Walls { r, k, output } => {
                let rs = match r {
                    Some(r) => parse_rationals(&r, "--r")?,
                    None => default_walls(),
                };
                (verify_walls_suite(&rs, k)?, output)
            }
            Suite::Continuity { delta, window, eps, output } => (verify_continuity_suite(&load_delta(&delta)?, window.as_deref(), &eps)?, output),
        },
    })
}

fn is_assertion(e: &anyhow::Error) -> bool {
    matches!(e.downcast_ref::<Error>(), Some(Error::Verification(_) | Error::NotQuasiPolynomial { .. }))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run(cli).and_then(|(out, args)| {
        let bytes = out.render(args.format)?;
        emit(&bytes, args.out.as_deref())?;
        Ok(out.passed)
    });
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(if is_assertion(&e) { 1 } else { 2 })
        }
    }
}
