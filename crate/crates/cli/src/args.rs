use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// CAR cochlear model: design, run, analyze and schedule filter cascades.
///
/// Log verbosity comes from RUST_LOG (default: warn).
#[derive(Debug, Parser)]
#[command(name = "cochlea-car", version)]
pub struct Cli {
    /// `key = value` configuration file; command-line flags override it.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Design a cascade and write its coefficient table.
    Design(DesignCmd),
    /// Run a WAV file through the cascade and write the cochleagram.
    Run(RunCmd),
    /// Measure impulse and frequency responses of selected taps.
    Analyze(AnalyzeCmd),
    /// Plan the time-multiplexed hardware schedule.
    Schedule(ScheduleCmd),
    /// Compare the fixed-point cascade against the float reference.
    Compare(CompareCmd),
}

#[derive(Debug, Clone, Default, Args)]
pub struct DesignFlags {
    /// Number of cascade sections.
    #[arg(long, value_name = "N")]
    pub sections: Option<usize>,
    /// Sample rate in Hz.
    #[arg(long, value_name = "HZ")]
    pub fs: Option<f64>,
    /// Place coordinate of the first (basal) section.
    #[arg(long)]
    pub x_base: Option<f64>,
    /// Place coordinate of the last (apical) section.
    #[arg(long)]
    pub x_apex: Option<f64>,
    /// Pole damping: r = 1 − damping·θ.
    #[arg(long)]
    pub damping: Option<f64>,
    /// Zero coefficient policy: c0, explicit:<h> or fraction:<f>.
    #[arg(long, value_name = "POLICY")]
    pub h_policy: Option<String>,
    /// Global pole radius, overriding --damping.
    #[arg(long)]
    pub r: Option<f64>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct FormatFlags {
    #[arg(long, value_name = "BITS")]
    pub io_bits: Option<u32>,
    #[arg(long, value_name = "BITS")]
    pub io_frac: Option<u32>,
    #[arg(long, value_name = "BITS")]
    pub state_bits: Option<u32>,
    #[arg(long, value_name = "BITS")]
    pub state_frac: Option<u32>,
    #[arg(long, value_name = "BITS")]
    pub coeff_bits: Option<u32>,
    #[arg(long, value_name = "BITS")]
    pub coeff_frac: Option<u32>,
    /// nearest_even or truncate.
    #[arg(long)]
    pub rounding: Option<String>,
    /// saturate or wrap.
    #[arg(long)]
    pub overflow: Option<String>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct HardwareFlags {
    #[arg(long, value_name = "HZ")]
    pub clock_hz: Option<f64>,
    #[arg(long, value_name = "N")]
    pub cycles_per_section: Option<u32>,
    #[arg(long, value_name = "N")]
    pub max_arrays: Option<u32>,
}

#[derive(Debug, Args)]
pub struct DesignCmd {
    #[command(flatten)]
    pub design: DesignFlags,
    #[command(flatten)]
    pub formats: FormatFlags,
    /// Coefficient CSV destination (default: stdout).
    #[arg(short, long, value_name = "FILE")]
    pub output: Option<PathBuf>,
    /// Also write the quantized coefficient table.
    #[arg(long, value_name = "FILE")]
    pub quantize: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ModeArg {
    Float,
    Fixed,
    Pipeline,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum FormatArg {
    Csv,
    Binary,
}

#[derive(Debug, Args)]
pub struct RunCmd {
    /// Mono 16- or 24-bit PCM WAV.
    #[arg(short, long, value_name = "FILE")]
    pub input: Option<PathBuf>,
    /// Cochleagram destination.
    #[arg(short, long, value_name = "FILE")]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: FormatArg,
    /// Coefficient CSV to use instead of designing from parameters.
    #[arg(long, value_name = "FILE")]
    pub coefficients: Option<PathBuf>,
    /// Per-section saturation counts as CSV (fixed mode).
    #[arg(long, value_name = "FILE")]
    pub stats: Option<PathBuf>,
    #[command(flatten)]
    pub design: DesignFlags,
    #[command(flatten)]
    pub formats: FormatFlags,
    #[command(flatten)]
    pub hardware: HardwareFlags,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum MethodArg {
    Impulse,
    Mls,
}

#[derive(Debug, Args)]
pub struct AnalyzeCmd {
    #[arg(long, value_enum, default_value = "mls")]
    pub method: MethodArg,
    /// MLS order; the period is 2^K − 1.
    #[arg(long, value_name = "K", default_value_t = 14)]
    pub mls_order: u32,
    /// MLS periods played before the recorded one.
    #[arg(long, value_name = "N", default_value_t = 4)]
    pub mls_warmup: u32,
    /// MLS amplitude.
    #[arg(long, default_value_t = 0.25)]
    pub amplitude: f64,
    /// Comma-separated tap indices (default: 20 evenly spaced).
    #[arg(long, value_delimiter = ',', value_name = "LIST")]
    pub channels: Option<Vec<usize>>,
    /// FFT length for the frequency responses.
    #[arg(long, value_name = "N", default_value_t = 16384)]
    pub n_fft: usize,
    /// Analyze the fixed-point cascade instead of the float one.
    #[arg(long)]
    pub fixed: bool,
    /// Directory for the per-channel CSV files.
    #[arg(long, value_name = "DIR", default_value = ".")]
    pub out_dir: PathBuf,
    #[arg(long, value_name = "FILE")]
    pub coefficients: Option<PathBuf>,
    #[command(flatten)]
    pub design: DesignFlags,
    #[command(flatten)]
    pub formats: FormatFlags,
}

#[derive(Debug, Args)]
pub struct ScheduleCmd {
    #[arg(long, value_name = "N")]
    pub sections: Option<usize>,
    #[arg(long, value_name = "HZ")]
    pub fs: Option<f64>,
    #[command(flatten)]
    pub hardware: HardwareFlags,
    /// Emit CSV instead of `key: value` text.
    #[arg(long)]
    pub csv: bool,
}

#[derive(Debug, Args)]
pub struct CompareCmd {
    /// WAV input; without it an MLS excitation is used.
    #[arg(short, long, value_name = "FILE")]
    pub input: Option<PathBuf>,
    #[arg(long, value_name = "K", default_value_t = 14)]
    pub mls_order: u32,
    #[arg(long, default_value_t = 0.25)]
    pub amplitude: f64,
    /// Per-channel CSV report destination.
    #[arg(short, long, value_name = "FILE")]
    pub output: Option<PathBuf>,
    #[arg(long, value_name = "FILE")]
    pub coefficients: Option<PathBuf>,
    #[command(flatten)]
    pub design: DesignFlags,
    #[command(flatten)]
    pub formats: FormatFlags,
}
