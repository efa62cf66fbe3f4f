//! `ordgame`: batch front end for the Prover/Delayer games.
//!
//! Exit codes: 0 clean run, 1 invariant or guarantee violated, 2 bad input.

mod commands;
mod strategies;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use strategies::Name;

#[derive(Debug)]
pub enum CliError {
    /// Unparsable or inconsistent input; exit 2.
    Input(String),
    /// An invariant or a strategy guarantee failed during the run; exit 1.
    Violation(String),
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

#[derive(Parser)]
#[command(name = "ordgame", version, about = "Prover/Delayer games on well-orders below ε₀")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Debug)]
pub struct RunArgs {
    /// Game level (1 is the base game).
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    /// Height bound of the game trees.
    #[arg(long, default_value_t = 1)]
    pub h: usize,
    /// Order type of the well-order, e.g. "w^2+w+1".
    #[arg(long)]
    pub order: String,
    #[arg(long, default_value = "random")]
    pub prover: Name,
    #[arg(long, default_value = "random")]
    pub delayer: Name,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 10_000)]
    pub max_turns: usize,
    /// Largest value a random or exhaustive player uses.
    #[arg(long, default_value_t = 3)]
    pub value_bound: u64,
    /// Run explicit strategies outside their preconditions.
    #[arg(long)]
    pub unchecked: bool,
    /// Derivation JSON for the extracted prover.
    #[arg(long)]
    pub proof: Option<PathBuf>,
    /// Search bound for true sentences and witnesses.
    #[arg(long, default_value_t = 64)]
    pub search_bound: u64,
    /// Transcript file (JSON-lines). ORDGAME_TRACE_DIR overrides its directory.
    #[arg(long)]
    pub trace: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Play one match and report the outcome.
    Simulate(RunArgs),
    /// Play many matches; exhaustive:<d>:<b> enumerates every scripted opponent.
    Match {
        #[command(flatten)]
        run: RunArgs,
        /// Number of seeded matches for random players.
        #[arg(long, default_value_t = 100)]
        trials: u64,
    },
    /// Win counts of the explicit strategies around the threshold ω^(h+1)+ω.
    Threshold {
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long, default_value_t = 1)]
        h_min: usize,
        #[arg(long, default_value_t = 2)]
        h_max: usize,
        #[arg(long, default_value_t = 100)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Depth of the exhaustive adversaries.
        #[arg(long, default_value_t = 3)]
        depth: usize,
        #[arg(long, default_value_t = 3)]
        value_bound: u64,
    },
    /// Check a derivation in the sequent calculus.
    CheckProof {
        path: PathBuf,
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long, default_value = "w")]
        order: String,
        #[arg(long, default_value_t = 40)]
        search_bound: u64,
        /// Also require the endsequent to be TI(≺).
        #[arg(long)]
        ti: bool,
    },
    /// Play the prover extracted from a derivation, with per-turn (†) reports.
    Extract {
        path: PathBuf,
        #[arg(long, default_value = "w")]
        order: String,
        #[arg(long, default_value = "random")]
        delayer: Name,
        #[arg(long, default_value_t = 10)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 64)]
        search_bound: u64,
        #[arg(long, default_value_t = 6)]
        value_bound: u64,
        #[arg(long, default_value_t = 10_000)]
        max_turns: usize,
        /// Trace file for transcripts and reports.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Run a property suite: comb, clock, monotonicity, structure or appendix.
    Invariants {
        #[arg(long)]
        suite: commands::Suite,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Simulate(run) => commands::simulate(&run),
        Command::Match { run, trials } => commands::run_matches(&run, trials),
        Command::Threshold {
            k,
            h_min,
            h_max,
            trials,
            seed,
            depth,
            value_bound,
        } => commands::threshold(k, h_min..=h_max, trials, seed, depth, value_bound),
        Command::CheckProof {
            path,
            k,
            order,
            search_bound,
            ti,
        } => commands::check_proof(&path, k, &order, search_bound, ti),
        Command::Extract {
            path,
            order,
            delayer,
            trials,
            seed,
            search_bound,
            value_bound,
            max_turns,
            trace,
        } => commands::extract(commands::ExtractArgs {
            path,
            order,
            delayer,
            trials,
            seed,
            search_bound,
            value_bound,
            max_turns,
            trace,
        }),
        Command::Invariants { suite, samples, seed } => commands::invariants(suite, samples, seed),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Violation(msg)) => {
            eprintln!("violation: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
