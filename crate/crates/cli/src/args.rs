use std::path::PathBuf;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use delay_margin::sweep::SweepConfig;
use delay_margin::RetardedSystem;

#[derive(Debug, Parser)]
#[command(name = "delay-margin", version, about = "Delay margins of retarded time-delay systems x' = A0 x(t) + A1 x(t - tau)")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Crossings, stable delay windows and the delay margin from the Rekasius sweep.
    Margin(SweepArgs),
    /// Refined imaginary-axis crossings without the stability walk.
    Crossings(SweepArgs),
    /// Crossing frequencies and delays from the Kronecker-product baseline.
    Baseline(BaselineArgs),
    /// Integrate the delay equation from a constant initial history.
    Simulate(SimulateArgs),
    /// Memory needed by the dense Kronecker companion matrix.
    MemEstimate(MemArgs),
    /// Compute the margin, then simulate at 0.95 and 1.05 times it.
    Validate(ValidateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Args)]
pub struct SystemArgs {
    /// Undelayed matrix (plain text or Matrix Market array).
    #[arg(long)]
    pub a0: PathBuf,
    /// Delayed matrix.
    #[arg(long)]
    pub a1: PathBuf,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Write to this file instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepOptions {
    /// Lower end of the T range [default: -1000, widened to the system bound].
    #[arg(long, allow_negative_numbers = true)]
    pub t_min: Option<f64>,
    /// Upper end of the T range [default: 1000, widened to the system bound].
    #[arg(long, allow_negative_numbers = true)]
    pub t_max: Option<f64>,
    /// Coarse grid spacing [default: 0.001].
    #[arg(long)]
    pub t_step: Option<f64>,
    /// Largest |Re(s)| accepted as imaginary [default: 1e-6 (1 + |A0| + |A1|)].
    #[arg(long)]
    pub eps_imag: Option<f64>,
    /// Bracket width at which bisection stops [default: 1e-9 (t_max - t_min)].
    #[arg(long)]
    pub refine_tol: Option<f64>,
    /// Ladder depth per crossing [default: 10].
    #[arg(long)]
    pub k_max: Option<usize>,
    #[arg(long, default_value_t = 1)]
    pub workers: usize,
}

impl SweepOptions {
    /// Defaults for `sys` with the given overrides, widened to the system's
    /// T bound.
    pub fn config(&self, sys: &RetardedSystem) -> SweepConfig {
        let mut cfg = SweepConfig::for_system(sys);
        if let Some(v) = self.t_min {
            cfg.t_min = v;
        }
        if let Some(v) = self.t_max {
            cfg.t_max = v;
        }
        if let Some(v) = self.t_step {
            cfg.t_step = v;
        }
        if let Some(v) = self.eps_imag {
            cfg.eps_imag = v;
        }
        if let Some(v) = self.k_max {
            cfg.k_max = v;
        }
        cfg.refine_tol = self.refine_tol.unwrap_or(1e-9 * (cfg.t_max - cfg.t_min));
        cfg.workers = self.workers;
        cfg.widened_for(sys)
    }
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub system: SystemArgs,
    #[command(flatten)]
    pub sweep: SweepOptions,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct BaselineArgs {
    #[command(flatten)]
    pub system: SystemArgs,
    /// Largest |Re(s)| accepted as imaginary [default: 1e-6 (1 + |A0| + |A1|)].
    #[arg(long)]
    pub eps_imag: Option<f64>,
    /// Ladder depth per delay family.
    #[arg(long, default_value_t = delay_margin::sweep::DEFAULT_K_MAX)]
    pub k_max: usize,
    /// Refuse to build companions larger than this many bytes.
    #[arg(long, default_value_t = delay_margin::kron::DEFAULT_MEMORY_CAP)]
    pub mem_cap: u64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub system: SystemArgs,
    #[arg(long)]
    pub tau: f64,
    #[arg(long)]
    pub horizon: f64,
    /// Integration step [default: min(tau/10, horizon/1000, 0.05/(|A0| + |A1|))].
    #[arg(long)]
    pub dt: Option<f64>,
    /// Constant initial history, comma separated [default: normalized all-ones].
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub x0: Option<Vec<f64>>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("size").required(true).args(["n", "n_max"])))]
pub struct MemArgs {
    /// Single system dimension.
    #[arg(long)]
    pub n: Option<u64>,
    /// Tabulate from --n-min to --n-max.
    #[arg(long)]
    pub n_max: Option<u64>,
    #[arg(long, default_value_t = 10)]
    pub n_min: u64,
    #[arg(long, default_value_t = 10)]
    pub n_step: u64,
    #[arg(long, default_value_t = 8)]
    pub bytes: u64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[command(flatten)]
    pub system: SystemArgs,
    #[command(flatten)]
    pub sweep: SweepOptions,
    /// Simulation horizon [default: 50 periods of the slowest crossing].
    #[arg(long)]
    pub horizon: Option<f64>,
    #[command(flatten)]
    pub output: OutputArgs,
}
