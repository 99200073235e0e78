use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use lpde::expr::EqOracle;
use lpde::frame::Frame;

mod commands;

use commands::{CliError, Output};

/// Classify second-order linear PDEs in two variables and test equivalence
/// under gauge-and-coordinate transformations.
#[derive(Parser)]
#[command(name = "lpde", version)]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct GlobalArgs {
    /// Seed for the identity-testing oracle and the selftest generator.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Evaluation trials per identity test.
    #[arg(long, global = true, default_value_t = 16, value_parser = clap::value_parser!(u32).range(1..))]
    trials: u32,
    /// Sample coordinates are drawn with numerators and denominators up to this bound.
    #[arg(long, global = true, default_value_t = 50, value_parser = clap::value_parser!(u32).range(1..))]
    bound: u32,
    /// Evaluate samples in exact rational arithmetic instead of modulo primes.
    #[arg(long, global = true)]
    exact: bool,
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Frame matrix file (keys E11, E12, E21, E22); identity when absent.
    #[arg(long, global = true)]
    frame: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Stratum of an equation, with D0 and gamma0.
    Classify { equation: PathBuf },
    /// Every invariant defined for an equation.
    Invariants { equation: PathBuf },
    /// Apply a transformation file to an equation.
    Transform { equation: PathBuf, transformation: PathBuf },
    /// P-map and canonical representative.
    Canonical { equation: PathBuf },
    /// Decide whether two equations are equivalent.
    CheckEquivalence {
        first: PathBuf,
        second: PathBuf,
        /// Frame of the second equation; defaults to the identity.
        #[arg(long)]
        second_frame: Option<PathBuf>,
    },
    /// Decide reducibility to constant coefficients.
    ReduceConst {
        equation: PathBuf,
        /// Candidate transformation to check when gamma0 = 0.
        #[arg(long)]
        candidate: Option<PathBuf>,
    },
    /// Run the randomized law checks.
    Selftest {
        /// Random transformations per law.
        #[arg(long, default_value_t = 5)]
        samples: usize,
    },
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

fn frame_from(path: Option<&Path>, o: &EqOracle) -> Result<Frame, CliError> {
    match path {
        Some(p) => Ok(lpde::io::parse_frame(&read(p)?, o)?),
        None => Ok(Frame::identity()),
    }
}

fn run(cli: Cli) -> Result<Output, CliError> {
    let g = &cli.global;
    let mut o = EqOracle { trials: g.trials, bound: g.bound, seed: g.seed, ..EqOracle::default() };
    if g.exact {
        o = o.exact();
    }
    let fr = frame_from(g.frame.as_deref(), &o)?;
    let equation = |p: &Path| -> Result<_, CliError> { Ok(lpde::io::parse_equation(&read(p)?)?) };
    match &cli.command {
        Command::Classify { equation: e } => commands::classify(&equation(e)?, &fr, &o),
        Command::Invariants { equation: e } => commands::invariants(&equation(e)?, &fr, &o),
        Command::Transform { equation: e, transformation } => {
            let t = lpde::io::parse_transformation(&read(transformation)?, &fr, &o)?;
            commands::transform(&equation(e)?, &t, &fr, &o)
        }
        Command::Canonical { equation: e } => commands::canonical(&equation(e)?, &fr, &o),
        Command::CheckEquivalence { first, second, second_frame } => {
            let fr2 = frame_from(second_frame.as_deref(), &o)?;
            commands::check_equivalence(&equation(first)?, &fr, &equation(second)?, &fr2, &o)
        }
        Command::ReduceConst { equation: e, candidate } => {
            let t = match candidate {
                Some(p) => Some(lpde::io::parse_transformation(&read(p)?, &fr, &o)?),
                None => None,
            };
            commands::reduce_const(&equation(e)?, &fr, t.as_ref(), &o)
        }
        Command::Selftest { samples } => commands::selftest(&o, g.seed, *samples),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let json = cli.global.json;
    match run(cli) {
        Ok(out) => {
            if json {
                println!("{}", serde_json::to_string_pretty(&out.json).expect("report serializes"));
            } else {
                print!("{}", out.text);
            }
            ExitCode::from(out.status)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.status())
        }
    }
}
