mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qualred_core::engine::OperatorKind;

use commands::Failure;

#[derive(Parser, Debug)]
#[command(
    name = "qualred",
    version,
    about = "Exact iterated elimination of dominated strategies in qualitative games"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run a fast star reduction, or a scripted elimination path.
    Reduce(ReduceArgs),
    /// Check hypotheses on P and Q, or conditions C and D along a trace.
    Check(CheckArgs),
    /// List the maximal elements of the game.
    Maximal(GameArgs),
    /// Compare maximal elements before and after a reduction.
    Preserve(ReduceArgs),
    /// Enumerate every elimination order of a small finite game.
    Oracle(OracleArgs),
    /// Property-test the reduction results on random finite games.
    Fuzz(FuzzArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Args, Debug)]
pub struct Common {
    /// Output format; fuzz defaults to csv, everything else to json.
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct GameArgs {
    /// Game file.
    pub game: PathBuf,
    /// Discretize an interval game on this grid step first.
    #[arg(long)]
    pub grid: Option<String>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug)]
pub struct ReduceArgs {
    #[command(flatten)]
    pub game: GameArgs,
    #[arg(long, default_value = "double", value_parser = parse_op)]
    pub op: OperatorKind,
    #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..))]
    pub max_iters: u64,
    /// Elimination script; its steps run before the fast continuation.
    #[arg(long)]
    pub path: Option<PathBuf>,
    /// Step relation for validating scripted steps.
    #[arg(long, value_parser = parse_op)]
    pub path_op: Option<OperatorKind>,
    /// Also report conditions C and D at every stage.
    #[arg(long)]
    pub conditions: bool,
}

#[derive(Args, Debug)]
pub struct CheckArgs {
    #[command(flatten)]
    pub game: GameArgs,
    /// Comma-separated hypotheses, or `all`.
    #[arg(long)]
    pub hypotheses: Option<String>,
    /// Comma-separated subset of C,D, checked along the fast trace.
    #[arg(long)]
    pub conditions: Option<String>,
    #[arg(long, default_value = "double", value_parser = parse_op)]
    pub op: OperatorKind,
    #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..))]
    pub max_iters: u64,
}

#[derive(Args, Debug)]
pub struct OracleArgs {
    #[command(flatten)]
    pub game: GameArgs,
    #[arg(long, default_value = "double", value_parser = parse_op)]
    pub op: OperatorKind,
    /// Largest number of profiles to enumerate.
    #[arg(long, default_value_t = qualred_core::lab::DEFAULT_ORACLE_BOUND)]
    pub bound: usize,
}

#[derive(Args, Debug)]
pub struct FuzzArgs {
    #[arg(long, default_value_t = 2)]
    pub players: usize,
    /// Comma-separated strategy counts, one per player.
    #[arg(long, value_delimiter = ',', conflicts_with = "max_size")]
    pub sizes: Option<Vec<usize>>,
    /// Draw each player's strategy count uniformly from 1..=N per trial.
    #[arg(long)]
    pub max_size: Option<usize>,
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Comma-separated checks: lemma1, lemma2, theorem3, sequence, theorem10.
    #[arg(long, value_delimiter = ',')]
    pub check: Option<Vec<String>>,
    /// Operators whose fast limits are recorded per trial.
    #[arg(long, value_delimiter = ',', value_parser = parse_op, default_value = "tail,double")]
    pub ops: Vec<OperatorKind>,
    /// Step relation explored by the elimination-order oracle.
    #[arg(long, value_parser = parse_op, default_value = "arrow")]
    pub oracle_op: OperatorKind,
    #[arg(long, default_value_t = qualred_core::lab::DEFAULT_ORACLE_BOUND)]
    pub oracle_bound: usize,
    /// utility-derived or raw-preference.
    #[arg(long, default_value = "utility-derived")]
    pub mode: String,
    /// none, full, random or upper-contour.
    #[arg(long, default_value = "none")]
    pub q: String,
    /// Comma-separated constraints: irreflexive, propertyT-pair, q-reflexive.
    #[arg(long, value_delimiter = ',')]
    pub constrain: Option<Vec<String>>,
    #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..))]
    pub max_iters: u64,
    #[command(flatten)]
    pub common: Common,
}

fn parse_op(s: &str) -> Result<OperatorKind, String> {
    s.parse()
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match &cli.command {
        Command::Reduce(a) => commands::reduce(a),
        Command::Check(a) => commands::check(a),
        Command::Maximal(a) => commands::maximal(a),
        Command::Preserve(a) => commands::preserve(a),
        Command::Oracle(a) => commands::oracle(a),
        Command::Fuzz(a) => commands::fuzz(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(e.downcast_ref::<Failure>().map_or(1, |f| f.code))
        }
    }
}
