//! `fpulab`: simulate beta-FPU chains and analyse the runs.

mod commands;
mod error;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::CliError;

#[derive(Parser, Debug)]
#[command(name = "fpulab", version, about = "Thermal-equilibrium experiments on periodic beta-FPU chains")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Integrate a chain and write manifest.json + series.bin.
    Simulate(SimulateArgs),
    /// Gibbs temperature, renormalization factors and effective nonlinearity.
    Thermo(ThermoArgs),
    /// Measure the renormalization factor from a run's spatiotemporal spectrum.
    Eta(EtaArgs),
    /// Welch spectra of the renormalized waves of a run.
    Spectrum(SpectrumArgs),
    /// Exact resonance certification, continuum curves and quartet maps.
    Resonances(ResonanceArgs),
    /// Predicted correlation times and, with a run, spectral widths.
    Linewidth(LinewidthArgs),
    /// Discrete-breather detection in a run or a pi-mode transient.
    Breathers(BreatherArgs),
    /// Largest Lyapunov exponent of the chain.
    Lyapunov(LyapunovArgs),
    /// Lyapunov exponent of the logistic map `x -> 4 lambda x (1 - x)`.
    Logistic(LogisticArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum InitKind {
    Thermal,
    PiMode,
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    #[arg(long, default_value_t = 128)]
    pub n: usize,
    #[arg(long, default_value_t = 1.0)]
    pub beta: f64,
    #[arg(long, default_value_t = 100.0)]
    pub energy: f64,
    #[arg(long, default_value_t = 0.01)]
    pub dt: f64,
    #[arg(long)]
    pub steps: u64,
    #[arg(long, default_value_t = 1)]
    pub sample_every: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Steps discarded before the first sample.
    #[arg(long, default_value_t = 100_000)]
    pub warmup: u64,
    #[arg(long, value_enum, default_value_t = InitKind::Thermal)]
    pub init: InitKind,
    /// Pi-mode amplitude; the energy flag is ignored for pi-mode runs.
    #[arg(long, default_value_t = 0.8)]
    pub amplitude: f64,
    #[arg(long, default_value_t = fpulab::chain::DEFAULT_PI_NOISE)]
    pub noise: f64,
    #[arg(long)]
    pub out: PathBuf,
    /// Replace an existing run in `out`.
    #[arg(long)]
    pub force: bool,
}

#[derive(Args, Debug)]
pub struct ThermoArgs {
    #[arg(long)]
    pub beta: f64,
    #[arg(long)]
    pub edensity: f64,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum WindowKind {
    Hann,
    Rect,
}

impl From<WindowKind> for fpulab::spectral::Window {
    fn from(w: WindowKind) -> Self {
        match w {
            WindowKind::Hann => fpulab::spectral::Window::Hann,
            WindowKind::Rect => fpulab::spectral::Window::Rect,
        }
    }
}

#[derive(Args, Debug)]
pub struct SpectralArgs {
    #[arg(long)]
    pub run: PathBuf,
    #[arg(long, default_value_t = 4)]
    pub segments: usize,
    #[arg(long, default_value_t = 4)]
    pub pad: usize,
    #[arg(long, value_enum, default_value_t = WindowKind::Hann)]
    pub window: WindowKind,
    /// Renormalization factor for the waves (default: Gibbs value).
    #[arg(long)]
    pub eta: Option<f64>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct EtaArgs {
    #[command(flatten)]
    pub spectral: SpectralArgs,
}

#[derive(Args, Debug)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub spectral: SpectralArgs,
    /// Wave numbers (default all).
    #[arg(long, value_delimiter = ',')]
    pub k: Vec<usize>,
}

#[derive(Args, Debug)]
pub struct ResonanceArgs {
    #[arg(long, default_value_t = 256)]
    pub n: usize,
    /// Wave number for the continuum curves and the quartet map.
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long, default_value_t = fpulab::resonance::DEFAULT_TOL)]
    pub tol: f64,
    /// Run to average `|<a~*_k a~*_l a~_m a~_s>|` over (needs `--k`).
    #[arg(long)]
    pub run: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum UmklappMode {
    On,
    Off,
    Both,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum DenominatorKind {
    Renormalized,
    Bare,
}

#[derive(Args, Debug)]
pub struct LinewidthArgs {
    #[arg(long, default_value_t = 256)]
    pub n: usize,
    #[arg(long, default_value_t = 0.5)]
    pub beta: f64,
    #[arg(long, default_value_t = 100.0)]
    pub energy: f64,
    /// Wave numbers (default 1..=N/2).
    #[arg(long, value_delimiter = ',')]
    pub k: Vec<usize>,
    #[arg(long, value_enum, default_value_t = UmklappMode::On)]
    pub umklapp: UmklappMode,
    #[arg(long, value_enum, default_value_t = DenominatorKind::Renormalized)]
    pub denominator: DenominatorKind,
    /// Run to measure widths from; its parameters must match.
    #[arg(long)]
    pub run: Option<PathBuf>,
    /// Welch segments for the measured widths.
    #[arg(long, default_value_t = 16)]
    pub segments: usize,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct BreatherArgs {
    /// Thermalized run to filter and scan.
    #[arg(long, conflicts_with = "pi_mode")]
    pub run: Option<PathBuf>,
    /// Run the pi-mode transient instead.
    #[arg(long)]
    pub pi_mode: bool,
    /// Filter cut (default 1.1 * 2 eta).
    #[arg(long)]
    pub omega_cut: Option<f64>,
    #[arg(long, default_value_t = fpulab::breather::DEFAULT_THRESHOLD)]
    pub threshold: f64,
    #[arg(long, default_value_t = fpulab::breather::MAX_SPAN)]
    pub max_span: usize,
    #[arg(long, default_value_t = 128)]
    pub n: usize,
    #[arg(long, default_value_t = 0.1)]
    pub beta: f64,
    #[arg(long, default_value_t = 0.8)]
    pub amplitude: f64,
    #[arg(long, default_value_t = 30_000.0)]
    pub horizon: f64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct LyapunovArgs {
    #[arg(long, default_value_t = 128)]
    pub n: usize,
    #[arg(long)]
    pub beta: f64,
    #[arg(long, default_value_t = 100.0)]
    pub energy: f64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = 1000)]
    pub resets: usize,
    #[arg(long, default_value_t = 1.0)]
    pub interval: f64,
    #[arg(long, default_value_t = 0.01)]
    pub dt: f64,
    #[arg(long, default_value_t = 1e-10)]
    pub d0: f64,
    #[arg(long, default_value_t = 10_000)]
    pub warmup: u64,
    /// Directory for `h_partial.csv`.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct LogisticArgs {
    #[arg(long)]
    pub lambda: f64,
    #[arg(long, default_value_t = 1_000_000)]
    pub iters: usize,
    #[arg(long, default_value_t = 1000)]
    pub burn_in: usize,
    #[arg(long, default_value_t = 0.3)]
    pub x0: f64,
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Simulate(a) => commands::simulate(&a),
        Command::Thermo(a) => commands::thermo(&a),
        Command::Eta(a) => commands::eta(&a),
        Command::Spectrum(a) => commands::spectrum(&a),
        Command::Resonances(a) => commands::resonances(&a),
        Command::Linewidth(a) => commands::linewidth(&a),
        Command::Breathers(a) => commands::breathers(&a),
        Command::Lyapunov(a) => commands::lyapunov(&a),
        Command::Logistic(a) => commands::logistic(&a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
