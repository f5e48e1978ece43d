mod commands;
mod config;
mod manifest;

use std::ffi::OsString;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, CommandFactory, FromArgMatches, Parser, Subcommand};

/// Linkability risk analysis for pseudonymous text profiles.
#[derive(Debug, Parser)]
#[command(name = "linkrisk", version, args_override_self = true)]
pub struct Cli {
    /// `key=value` file supplying defaults for the subcommand's flags.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Worker threads (default: all cores).
    #[arg(long, global = true, env = "LINKRISK_WORKERS")]
    pub workers: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Read JSONL comments, normalize them and filter profiles.
    Ingest(IngestArgs),
    /// Aggregate token streams into profile, community and global models.
    BuildModels(BuildModelsArgs),
    /// Most frequent unigrams of one model.
    TopUnigrams(TopUnigramsArgs),
    /// Pairwise √JS distances within a community or across two.
    Distances(DistancesArgs),
    /// Anonymous subset of one profile.
    Anonymity(AnonymityArgs),
    /// Upper bound on the linking likelihood.
    Bound(BoundArgs),
    /// Cross-community linkage evaluation.
    Eval(EvalArgs),
    /// Generate a synthetic two-community corpus.
    Synth(SynthArgs),
    /// Toy-scale privacy framework.
    #[command(subcommand)]
    Framework(FrameworkCommand),
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    /// JSONL corpus files (repeatable).
    #[arg(long, required = true)]
    pub input: Vec<PathBuf>,
    /// Stopword list; defaults to the built-in list.
    #[arg(long)]
    pub stopwords: Option<PathBuf>,
    /// Smiley list; defaults to the built-in list.
    #[arg(long)]
    pub smilies: Option<PathBuf>,
    #[arg(long, default_value_t = 100)]
    pub min_comments: usize,
    #[arg(long, default_value_t = 100)]
    pub min_profiles: usize,
    /// Communities to drop before filtering (repeatable).
    #[arg(long)]
    pub exclude: Vec<String>,
    #[arg(long, default_value_t = 3)]
    pub max_repeat: usize,
    /// Skip malformed records instead of failing.
    #[arg(long)]
    pub lenient: bool,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct BuildModelsArgs {
    /// `streams.jsonl` written by `ingest`.
    #[arg(long)]
    pub streams: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct TopUnigramsArgs {
    #[arg(long)]
    pub models: PathBuf,
    /// `global`, a community name, or `community/author`.
    #[arg(long)]
    pub key: String,
    #[arg(short = 'k', long = "top", default_value_t = 20)]
    pub k: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DistancesArgs {
    #[arg(long)]
    pub models: PathBuf,
    #[arg(long)]
    pub community: String,
    /// Second community; distances then run across the two.
    #[arg(long)]
    pub community_b: Option<String>,
    /// Also write every distance to `distances.csv`.
    #[arg(long)]
    pub csv: bool,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct AnonymityArgs {
    /// Matrix written by `distances`.
    #[arg(long, conflicts_with = "models")]
    pub matrix: Option<PathBuf>,
    /// Model store; distances are computed on the fly.
    #[arg(long, required_unless_present = "matrix")]
    pub models: Option<PathBuf>,
    #[arg(long)]
    pub community: String,
    /// Author of the subject profile.
    #[arg(long)]
    pub subject: String,
    #[arg(long)]
    pub d: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BoundArgs {
    #[arg(long)]
    pub c: f64,
    #[arg(long)]
    pub d: f64,
    #[arg(long)]
    pub k: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub models: PathBuf,
    #[arg(long)]
    pub community_a: String,
    #[arg(long)]
    pub community_b: String,
    #[arg(long, value_delimiter = ',', default_values_t = linkrisk_core::eval::DEFAULT_KS)]
    pub k: Vec<usize>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long, default_value_t = 500)]
    pub users: usize,
    #[arg(long, default_value_t = 20)]
    pub topics: usize,
    #[arg(long, default_value_t = 60)]
    pub comments_per_user: usize,
    #[arg(long, default_value_t = 0.15)]
    pub idiosyncrasy: f64,
    #[arg(long, default_value_t = 0.2)]
    pub community_shift: f64,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Subcommand)]
pub enum FrameworkCommand {
    /// Evaluate a scenario file.
    Run(FrameworkRunArgs),
    /// Two profiles differing in one released attribute, told apart with
    /// certainty.
    Impossibility(ImpossibilityArgs),
}

#[derive(Debug, Args)]
pub struct FrameworkRunArgs {
    pub scenario: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ImpossibilityArgs {
    #[arg(long, default_value = "x")]
    pub x: String,
    #[arg(long, default_value = "default")]
    pub x_star: String,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn config_path(argv: &[OsString]) -> Option<PathBuf> {
    let mut it = argv.iter().skip(1);
    while let Some(a) = it.next() {
        let a = a.to_string_lossy();
        if a == "--" {
            break;
        }
        if a == "--config" {
            return it.next().map(PathBuf::from);
        }
        if let Some(p) = a.strip_prefix("--config=") {
            return Some(PathBuf::from(p));
        }
    }
    None
}

fn parse(argv: Vec<OsString>) -> Result<(Cli, Vec<String>), clap::Error> {
    let Some(path) = config_path(&argv) else {
        return Ok((Cli::try_parse_from(&argv)?, Vec::new()));
    };
    let entries = config::load(&path).map_err(|e| clap::Error::raw(clap::error::ErrorKind::Io, format!("{e:#}\n")))?;
    let cmd = Cli::command();
    let (argv, ignored) = config::inject(&cmd, &argv, &entries);
    let matches = cmd.try_get_matches_from(argv)?;
    Ok((Cli::from_arg_matches(&matches)?, ignored))
}

fn main() -> ExitCode {
    let (cli, ignored) = match parse(std::env::args_os().collect()) {
        Ok(p) => p,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                clap::error::ErrorKind::Io => ExitCode::from(1),
                _ => ExitCode::from(2),
            };
        }
    };
    match commands::run(cli, &ignored) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
