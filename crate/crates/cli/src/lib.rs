//! Command-line front end for `eit-core`: presets, sweeps and artifact output.

pub mod commands;
pub mod config;
pub mod output;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use commands::{run, Outcome};
pub use config::{OutputFormat, PlotQuantity, Preset, ScenarioConfig, ScenarioOverrides};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("output error: {0}")]
    Io(String),
    #[error("solver error: {0}")]
    Solver(#[from] eit_core::Error),
}

impl CliError {
    /// 0 success, 1 configuration or I/O problem, 2 solver failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) | Self::Io(_) => 1,
            Self::Solver(_) => 2,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "eit4",
    version,
    about = "EIT spectra of a degenerate four-level atom driven by coupling, probe and rf fields"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Susceptibility spectrum over a detuning grid.
    Spectrum(ScenarioArgs),
    /// Spectrum for one of the built-in parameter sets.
    Preset {
        #[arg(value_enum)]
        name: Preset,
        #[command(flatten)]
        args: ScenarioArgs,
    },
    /// Dark-state report (eigenvalues, excited overlaps, classification) per detuning; always JSON.
    Darkstates(ScenarioArgs),
    /// Resonant Im χ(ψ) over [0, π/2] and the transparency angle.
    AngleScan(ScenarioArgs),
    /// Numeric and closed-form steady states side by side; always JSON.
    Steady(ScenarioArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct ScenarioArgs {
    /// TOML scenario file; flags take precedence over its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    /// Output format; may be repeated.
    #[arg(long = "format", value_enum)]
    pub formats: Vec<OutputFormat>,
    #[arg(long, allow_negative_numbers = true)]
    pub omega_c: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub omega_r: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub psi: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub gamma_ratio: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub delta_min: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub delta_max: Option<f64>,
    #[arg(long)]
    pub delta_points: Option<usize>,
    /// Worker threads for sweeps (default: all cores).
    #[arg(long)]
    pub workers: Option<usize>,
    /// Probe Rabi modulus for dark-state analysis.
    #[arg(long, allow_negative_numbers = true)]
    pub probe: Option<f64>,
    /// Number of ψ samples for angle-scan.
    #[arg(long)]
    pub psi_points: Option<usize>,
    /// Explicit detunings for darkstates, comma separated.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub deltas: Option<Vec<f64>>,
}

impl ScenarioArgs {
    pub fn overrides(&self) -> ScenarioOverrides {
        ScenarioOverrides {
            omega_c: self.omega_c,
            omega_r: self.omega_r,
            psi: self.psi,
            gamma_ratio: self.gamma_ratio,
            delta_min: self.delta_min,
            delta_max: self.delta_max,
            delta_points: self.delta_points,
            outputs: (!self.formats.is_empty()).then(|| self.formats.clone()),
            preset: None,
            probe: self.probe,
            psi_points: self.psi_points,
            deltas: self.deltas.clone(),
        }
    }

    pub fn resolve(&self, preset: Option<Preset>) -> Result<ScenarioConfig, CliError> {
        let file = match &self.config {
            Some(path) => ScenarioOverrides::from_file(path)?,
            None => ScenarioOverrides::default(),
        };
        ScenarioConfig::resolve(
            file,
            ScenarioOverrides {
                preset,
                ..self.overrides()
            },
        )
    }
}

/// Parse `args`, run, report to the given streams and return the exit code.
pub fn main_with<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let rendered = e.render().to_string();
            let _ = if code == 0 {
                write!(stdout, "{rendered}")
            } else {
                write!(stderr, "{rendered}")
            };
            return code;
        }
    };
    match run(&cli) {
        Ok(outcome) => {
            for w in &outcome.warnings {
                let _ = writeln!(stderr, "warning: {w}");
            }
            for line in &outcome.messages {
                let _ = writeln!(stdout, "{line}");
            }
            for path in &outcome.files {
                let _ = writeln!(stdout, "wrote {}", path.display());
            }
            0
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}
