use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(name = "dlab", version, about = "Spectral numerics for mass-subcritical gKdV")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the gKdV or NLS solver and write an STF1 file.
    Solve {
        #[arg(value_enum)]
        equation: Equation,
        #[command(flatten)]
        opts: SolveOpts,
    },
    /// Evaluate a norm spec (`kind=…,p=…` text or a file holding it) on a GF01/STF1 file.
    Norm {
        spec: String,
        input: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Run the NLS-embedding experiment over a list of carriers.
    Embed(EmbedOpts),
    /// Profile extraction from a manifest of GF01 files.
    Profiles {
        #[arg(value_enum)]
        mode: ProfileMode,
        manifest: PathBuf,
        #[command(flatten)]
        opts: ProfileOpts,
    },
    /// Run verification suites (`all` runs every one).
    Verify {
        #[arg(required = true)]
        kinds: Vec<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Inspect or convert GF01/STF1 files.
    Gf {
        #[command(subcommand)]
        action: GfAction,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Equation {
    Gkdv,
    Nls,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ProfileMode {
    Extract,
    Decompose,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum InitialData {
    /// `A·e^{−x²}`.
    Gaussian,
    /// The traveling wave `Q_c` with `c = 1` (gKdV only, focusing sign).
    Soliton,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SideArg {
    Physical,
    Fourier,
}

#[derive(Debug, Subcommand)]
pub enum GfAction {
    /// Print the header and basic norms.
    Info { input: PathBuf },
    /// Convert between GF01 sides, or to CSV when the output ends in `.csv`.
    Convert {
        input: PathBuf,
        output: PathBuf,
        /// Side of a GF01 output, or of the samples in a CSV.
        #[arg(long, value_enum, default_value = "physical")]
        side: SideArg,
    },
}

/// Flags shared by most subcommands.
#[derive(Clone, Debug, Default, Args, Serialize)]
pub struct Common {
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub sigma: Option<f64>,
    #[arg(long)]
    pub xi: Option<f64>,
    #[arg(long)]
    pub t: Option<f64>,
    /// Seed for random batteries.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Dyadic scale window `jmin:jmax`, or `auto` for every scale.
    #[arg(long)]
    pub window: Option<String>,
    /// Also write a CSV table here.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Leave wall-clock fields out of the manifest.
    #[arg(long)]
    pub no_timestamps: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct SolveOpts {
    #[arg(long, value_enum, default_value = "gaussian")]
    pub preset: InitialData,
    /// Read the initial data from a GF01 file instead of a preset.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long, default_value_t = 1.8)]
    pub alpha: f64,
    /// Sign of the nonlinearity; defaults to −1 for the soliton and +1 otherwise.
    #[arg(long, allow_negative_numbers = true)]
    pub mu: Option<f64>,
    /// Gaussian amplitude.
    #[arg(long, default_value_t = 0.5)]
    pub amplitude: f64,
    #[arg(long, default_value_t = 512)]
    pub n: usize,
    #[arg(long, default_value_t = 40.0 * std::f64::consts::PI)]
    pub length: f64,
    /// Time step; by default the smaller of the stability bound and 1e-3.
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
    pub t_end: f64,
    /// Frames to store besides t = 0.
    #[arg(long, default_value_t = 50)]
    pub frames: usize,
    #[arg(long, default_value = "solution.stf")]
    pub out: PathBuf,
    #[arg(long)]
    pub csv: Option<PathBuf>,
    #[arg(long)]
    pub no_timestamps: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct EmbedOpts {
    #[arg(long, default_value_t = 1.9)]
    pub alpha: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub mu: f64,
    #[arg(long, default_value_t = 1024)]
    pub n: usize,
    #[arg(long, default_value_t = 8.0 * std::f64::consts::PI)]
    pub length: f64,
    /// Carriers, comma separated, on the frequency lattice.
    #[arg(long, value_delimiter = ',', default_value = "8,16,32,64")]
    pub xi: Vec<f64>,
    /// Handoff time `T`.
    #[arg(long, default_value_t = 1.0)]
    pub t_end: f64,
    /// NLS time step; default `T/1024`.
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long)]
    pub csv: Option<PathBuf>,
    #[arg(long)]
    pub no_timestamps: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct ProfileOpts {
    #[arg(long, default_value_t = 1.8)]
    pub alpha: f64,
    #[arg(long, default_value_t = 3.0)]
    pub sigma: f64,
    /// Half-width of the time scan; default `|I|^{−3}` for the selected interval.
    #[arg(long)]
    pub t_scan: Option<f64>,
    /// Maximum number of extraction steps (decompose).
    #[arg(long, default_value_t = 8)]
    pub j_max: usize,
    /// Stop once the residual selector falls below this fraction of the input's.
    #[arg(long, default_value_t = 0.1)]
    pub eps_stop: f64,
    /// Directory for the GF01 profile files.
    #[arg(long, default_value = "profiles")]
    pub out: PathBuf,
    #[arg(long)]
    pub csv: Option<PathBuf>,
    #[arg(long)]
    pub no_timestamps: bool,
}
