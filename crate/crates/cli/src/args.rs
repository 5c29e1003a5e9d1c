use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "rtbpa", version, about = "Ray-traced back-projection imaging")]
pub struct Cli {
    /// Worker threads for path finding and imaging (default: all cores).
    #[arg(long, global = true, env = "RTBPA_WORKERS")]
    pub workers: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Synthesize measurement data for a scenario.
    Forward(ForwardArgs),
    /// Reconstruct an image from measurement data.
    Reconstruct(ReconstructArgs),
    /// Compare two reconstruction runs.
    Compare(CompareArgs),
    /// List or print built-in scenarios.
    #[command(subcommand)]
    Scenes(ScenesCommand),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EngineKind {
    Images,
    Sbr,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Algorithm {
    Naive,
    Rtbpa,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Amplitude {
    PhaseOnly,
    FarField,
    Full,
}

#[derive(Debug, Clone, Args)]
pub struct EngineArgs {
    /// Built-in scenario name or path to a scenario file.
    #[arg(long)]
    pub scenario: String,
    #[arg(long, value_enum, default_value_t = EngineKind::Images)]
    pub engine: EngineKind,
    /// Reflection order (default: the scenario's).
    #[arg(long)]
    pub max_order: Option<usize>,
    /// SBR rays per launch point.
    #[arg(long, default_value_t = 100_000)]
    pub rays: usize,
    /// SBR capture radius, meters.
    #[arg(long, default_value_t = 0.05)]
    pub capture_radius: f64,
    /// Seed for SBR launches and noise.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct ForwardArgs {
    #[command(flatten)]
    pub engine: EngineArgs,
    #[arg(long, value_enum, default_value_t = Amplitude::PhaseOnly)]
    pub amplitude: Amplitude,
    /// Add complex Gaussian noise at this SNR (dB).
    #[arg(long)]
    pub snr: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct ReconstructArgs {
    #[command(flatten)]
    pub engine: EngineArgs,
    /// Measurement file written by `forward`.
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long, value_enum, default_value_t = Algorithm::Rtbpa)]
    pub algorithm: Algorithm,
    /// Ignore the reflection sign of each path.
    #[arg(long)]
    pub no_half_wave: bool,
    /// Voxels along the first two grid axes; spacing and center voxel are kept.
    #[arg(long, num_args = 2, value_names = ["NX", "NY"])]
    pub grid: Option<Vec<usize>>,
    /// Peaks to report.
    #[arg(long, default_value_t = 3)]
    pub peaks: usize,
    /// Minimum distance between reported peaks, meters.
    #[arg(long, default_value_t = 0.1)]
    pub min_separation: f64,
}

#[derive(Debug, Clone, Args)]
pub struct CompareArgs {
    pub run_a: PathBuf,
    pub run_b: PathBuf,
    /// Also write the report here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Subcommand)]
pub enum ScenesCommand {
    List,
    Show { name: String },
}
