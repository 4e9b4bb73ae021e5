//! `ibsignal` command-line driver.
//!
//! Every command is a plain function over an argument struct so tests can
//! drive them without spawning processes.

pub mod chart;
pub mod commands;
pub mod manifest;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub use commands::{
    cmd_compare, cmd_frontier, cmd_ingest, cmd_plot, cmd_synth, cmd_train, CompareSummary,
    IngestSummary,
};
pub use manifest::RunManifest;

/// Environment variable naming the default dataset directory.
pub const DATA_DIR_ENV: &str = "IBSIGNAL_DATA_DIR";

#[derive(Debug, Parser)]
#[command(name = "ibsignal", version, about = "Color-naming agents and the information bottleneck")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate WCS chip and term files and write a normalized dataset bundle.
    Ingest(IngestArgs),
    /// Train a speaker/listener team and write a run directory.
    Train(TrainArgs),
    /// Trace the IB complexity/informativeness bound.
    Frontier(FrontierArgs),
    /// Match every language against a run's checkpoints by gNID.
    Compare(CompareArgs),
    /// Draw CSV columns as an SVG chart.
    Plot(PlotArgs),
    /// Write a synthetic term file in the WCS layout.
    Synth(SynthArgs),
}

#[derive(Debug, Clone, Args)]
pub struct IngestArgs {
    #[arg(long)]
    pub chips: Option<PathBuf>,
    #[arg(long)]
    pub terms: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SpeakerArg {
    Vqvib,
    Onehot,
}

#[derive(Debug, Clone, Args)]
pub struct TrainArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub chips: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long = "lambda-u")]
    pub lambda_u: Option<f64>,
    #[arg(long = "lambda-i")]
    pub lambda_i: Option<f64>,
    #[arg(long = "lambda-c-initial")]
    pub lambda_c_initial: Option<f64>,
    #[arg(long = "lambda-c-final")]
    pub lambda_c_final: Option<f64>,
    #[arg(long)]
    pub epochs: Option<usize>,
    #[arg(long, value_enum)]
    pub speaker: Option<SpeakerArg>,
    /// Parent directory; each run gets `<out>/<run_id>/`.
    #[arg(long, default_value = "runs")]
    pub out: PathBuf,
    /// Train this many consecutive seeds concurrently.
    #[arg(long = "parallel-seeds", default_value_t = 1)]
    pub parallel_seeds: usize,
}

/// Same values as the flag defaults.
impl Default for TrainArgs {
    fn default() -> Self {
        Self {
            config: None,
            chips: None,
            seed: None,
            lambda_u: None,
            lambda_i: None,
            lambda_c_initial: None,
            lambda_c_final: None,
            epochs: None,
            speaker: None,
            out: PathBuf::from("runs"),
            parallel_seeds: 1,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct FrontierArgs {
    #[arg(long)]
    pub chips: Option<PathBuf>,
    /// Meaning width in CIELAB units divided by 100.
    #[arg(long, default_value_t = ibsignal_core::ib::DEFAULT_MEANING_SIGMA)]
    pub sigma: f64,
    #[arg(long, default_value_t = ibsignal_core::ib::DEFAULT_CLUSTERS)]
    pub clusters: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct CompareArgs {
    /// Run directory (repeatable); all checkpoints of all runs are searched.
    #[arg(long = "run", required = true)]
    pub runs: Vec<PathBuf>,
    /// Directory of per-language naming CSVs written by `ingest`.
    #[arg(long)]
    pub languages: Option<PathBuf>,
    /// Chip table; defaults to the one recorded in the first run's manifest.
    #[arg(long)]
    pub chips: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct PlotArgs {
    /// `PATH:XCOL:YCOL[:LABEL]` drawn as a line (repeatable).
    #[arg(long = "line")]
    pub lines: Vec<String>,
    /// `PATH:XCOL:YCOL[:LABEL]` drawn as points (repeatable).
    #[arg(long = "points")]
    pub points: Vec<String>,
    #[arg(long, default_value = "")]
    pub title: String,
    #[arg(long = "x-label")]
    pub x_label: Option<String>,
    #[arg(long = "y-label")]
    pub y_label: Option<String>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct SynthArgs {
    #[arg(long)]
    pub chips: Option<PathBuf>,
    #[arg(long, default_value_t = 2009)]
    pub seed: u64,
    #[arg(long, default_value_t = 110)]
    pub languages: u32,
    /// Output term file.
    #[arg(long)]
    pub out: PathBuf,
}

/// Input problems the user can fix.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

/// 2 for user/input errors, 1 for internal or numeric failures.
pub fn exit_code(err: &anyhow::Error) -> i32 {
    for cause in err.chain() {
        if cause.is::<UsageError>() || cause.is::<std::io::Error>() {
            return 2;
        }
        if let Some(e) = cause.downcast_ref::<ibsignal_core::Error>() {
            return if e.is_user_error() { 2 } else { 1 };
        }
    }
    1
}

pub fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Ingest(a) => cmd_ingest(&a).map(|s| println!("{}", s.line())),
        Command::Train(a) => {
            for dir in cmd_train(&a)? {
                println!("{}", dir.display());
            }
            Ok(())
        }
        Command::Frontier(a) => cmd_frontier(&a).map(|p| println!("{}", p.display())),
        Command::Compare(a) => cmd_compare(&a).map(|s| println!("{}", s.line())),
        Command::Plot(a) => cmd_plot(&a).map(|p| println!("{}", p.display())),
        Command::Synth(a) => cmd_synth(&a).map(|p| println!("{}", p.display())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn train_args_default_matches_flags() {
        let Cli { command: Command::Train(parsed) } = Cli::parse_from(["ibsignal", "train"]) else {
            panic!("train subcommand");
        };
        let d = TrainArgs::default();
        assert_eq!((parsed.out, parsed.parallel_seeds), (d.out, d.parallel_seeds));
    }
}
