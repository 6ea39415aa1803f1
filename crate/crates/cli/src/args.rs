use std::path::PathBuf;

use clap::{ArgGroup, Args, Parser, Subcommand};

/// Rating inflation toolkit: strategies, bounds and certificates for
/// generalized Elo systems in which game outcomes can be arranged.
///
/// Exit status is 0 on success, 2 when a checked inequality fails and 1 on
/// usage or runtime errors. Set ELOFORGE_QUAD_TOL to override the quadrature
/// tolerance (default 1e-10).
#[derive(Debug, Parser)]
#[command(name = "eloforge", version, propagate_version = true)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Write the output here instead of standard output.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,

    /// Seed recorded in the output header. No subcommand draws random numbers,
    /// so it never changes the results.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct SigmaArg {
    /// Pot function σ: `logistic`, `erf`, `alg:p=<p>` with p >= 1, or the path
    /// of a two-column CSV table of (z, σ(z)) samples.
    #[arg(long, default_value = "logistic", value_name = "SIGMA")]
    pub sigma: String,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the four pot-function assumptions on a grid and print the
    /// derived constants.
    ValidatePot(ValidatePotArgs),
    /// Play k straight wins between two players and compare the final rating
    /// with the two-player interval ½f⁻¹(2k) ± 3.
    Simulate(SimulateArgs),
    /// Run the ladder strategy, which reaches rating of order k^(1/3) with
    /// many players.
    Ladder(LadderArgs),
    /// Find the exact optimum for tiny instances by branch and bound.
    Search(SearchArgs),
    /// Evaluate the upper and lower bounds at a game count or a rating, or
    /// the tail integrals f and g at given points.
    Bounds(BoundsArgs),
    /// Rewrite a game sequence into an upset-free one and report whether the
    /// rewrite is certified.
    CertifyPath(CertifyPathArgs),
    /// Closed-form growth rates for the built-in pot functions.
    Table1(Table1Args),
}

#[derive(Debug, Args)]
pub struct ValidatePotArgs {
    #[command(flatten)]
    pub sigma: SigmaArg,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub sigma: SigmaArg,

    /// Number of games k won in a row by player 0 against player 1.
    /// Accepts scientific notation such as 1e6.
    #[arg(long = "n2-wins", value_name = "K", value_parser = parse_count)]
    pub n2_wins: u64,

    /// Write the played games as a transcript JSON file.
    #[arg(long, value_name = "PATH")]
    pub emit: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct LadderArgs {
    #[command(flatten)]
    pub sigma: SigmaArg,

    /// Number of games k. Accepts scientific notation such as 1e6.
    #[arg(long, value_name = "K", value_parser = parse_count)]
    pub games: u64,

    /// Ladder spacing A, the maximizer of σ(-z)z² by default. When σ has no
    /// such maximizer and this flag is absent, the two-player strategy runs
    /// instead.
    #[arg(long = "A", visible_alias = "a", value_name = "A")]
    pub threshold: Option<f64>,

    /// Print the four ladder certificate inequalities with their margins
    /// instead of the run summary.
    #[arg(long)]
    pub certify: bool,

    /// Write the played games as a transcript JSON file.
    #[arg(long, value_name = "PATH")]
    pub emit: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SearchArgs {
    #[command(flatten)]
    pub sigma: SigmaArg,

    /// Number of players n, from 2 to 6.
    #[arg(short = 'n', value_name = "N")]
    pub n: usize,

    /// Number of unit-pot games k, at most 12.
    #[arg(short = 'k', value_name = "K")]
    pub k: usize,

    /// Also branch on moves that differ only by swapping equally rated
    /// players.
    #[arg(long = "no-symmetry")]
    pub no_symmetry: bool,

    /// Write an optimal game sequence as a transcript JSON file.
    #[arg(long, value_name = "PATH")]
    pub emit: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("scale").required(true).args(["games", "rating", "at"])))]
pub struct BoundsArgs {
    #[command(flatten)]
    pub sigma: SigmaArg,

    /// Game count k: prints the two-player interval, the ladder guarantee and
    /// the many-player cap.
    #[arg(long, value_name = "K", value_parser = parse_count)]
    pub games: Option<u64>,

    /// Rating R: prints the potential lower bound and the fewest games needed
    /// to reach R.
    #[arg(long, value_name = "R")]
    pub rating: Option<f64>,

    /// Comma-separated points x: prints f(x), g(x), f⁻¹(x) and g⁻¹(x).
    #[arg(long, value_name = "X", value_delimiter = ',', num_args = 1..)]
    pub at: Option<Vec<f64>>,

    /// Append the constants C₁, C₂, C, A and c₁ as extra columns.
    #[arg(long)]
    pub constants: bool,

    /// Slope a of the growth premise g(x) >= (ax)² used by the cap.
    #[arg(long, default_value_t = 1.0, value_name = "A")]
    pub a: f64,
}

#[derive(Debug, Args)]
pub struct CertifyPathArgs {
    /// Pot function, as for the other subcommands. Defaults to the one named
    /// in the transcript.
    #[arg(long, value_name = "SIGMA")]
    pub sigma: Option<String>,

    /// Transcript JSON file holding the game sequence.
    #[arg(long = "in", value_name = "PATH")]
    pub input: PathBuf,

    /// Target rating R that the top player must reach.
    #[arg(long, value_name = "R")]
    pub rating: f64,
}

#[derive(Debug, Args)]
pub struct Table1Args {
    /// Game count k. Accepts scientific notation such as 1e6.
    #[arg(long, value_name = "K", value_parser = parse_count)]
    pub k: u64,
}

/// Parses a non-negative integer count, allowing forms like `1e6`.
pub fn parse_count(s: &str) -> Result<u64, String> {
    if let Ok(v) = s.parse::<u64>() {
        return Ok(v);
    }
    let v: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if !v.is_finite() || v < 0.0 || v.fract() != 0.0 || v > 9.007_199_254_740_992e15 {
        return Err(format!("`{s}` is not a non-negative integer"));
    }
    Ok(v as u64)
}
