mod plot;
mod replay;
mod run;
mod settings;
mod validate;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "adavln", version, about = "Run, validate and replay navigation episodes among patrolling humans")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OnOff {
    On,
    Off,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AgentChoice {
    Random,
    Avoider,
    Oracle,
    /// Serve each episode to an external agent over newline-delimited JSON.
    Remote,
    /// Serve each episode over WebSocket for the browser UI, with telemetry
    /// on the next port up.
    Ui,
}

#[derive(Debug, clap::Args)]
pub struct SimArgs {
    /// TOML file with simulator settings.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum)]
    freeze_time: Option<OnOff>,
    #[arg(long)]
    tick_rate: Option<f64>,
    /// Overrides every episode's step budget.
    #[arg(long)]
    max_steps: Option<u32>,
}

#[derive(Debug, clap::Args)]
pub struct RunArgs {
    #[arg(long, default_value = "data/adar2r_sample.json")]
    episodes: PathBuf,
    #[arg(long, default_value = "data/scenes")]
    scenes: PathBuf,
    #[arg(long, value_enum, default_value = "oracle")]
    agent: AgentChoice,
    #[arg(long, env = "ADAVLN_ENDPOINT", default_value = "127.0.0.1:7878")]
    endpoint: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "runs/latest")]
    out: PathBuf,
    /// Seconds to wait for each action command from a remote agent.
    #[arg(long)]
    command_timeout: Option<f64>,
    /// Number of worker threads for built-in agents (0 picks automatically).
    #[arg(long, default_value_t = 0)]
    jobs: usize,
    #[command(flatten)]
    sim: SimArgs,
}

#[derive(Debug, clap::Args)]
pub struct ValidateArgs {
    /// Episode file to check.
    dataset: PathBuf,
    #[arg(long, default_value = "data/scenes")]
    scenes: PathBuf,
    #[command(flatten)]
    sim: SimArgs,
}

#[derive(Debug, clap::Args)]
pub struct ReplayArgs {
    /// Trajectory log written by `run`.
    log: PathBuf,
    /// Scene file to replay against; its id must match the log.
    #[arg(long, conflicts_with = "scenes")]
    scene: Option<PathBuf>,
    /// Scene directory to look the log's scene up in.
    #[arg(long)]
    scenes: Option<PathBuf>,
    /// Directory for the regenerated plot and report (defaults to the log's directory).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Only regenerate the plot.
    #[arg(long)]
    plot_only: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a batch of episodes and write logs, reports, plots and a summary.
    Run(RunArgs),
    /// Check an episode file against its scenes and report human interference.
    Validate(ValidateArgs),
    /// Recompute the plot and report of a trajectory log.
    Replay(ReplayArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => run::cmd_run(&args),
        Command::Validate(args) => validate::cmd_validate(&args),
        Command::Replay(args) => replay::cmd_replay(&args).map(|()| true),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
