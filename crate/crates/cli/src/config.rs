//! Scenario configuration: flat TOML file, named presets, flag overrides.
//!
//! Precedence, lowest first: built-in defaults, config file, preset, flags.

use std::f64::consts::{FRAC_PI_2, SQRT_2};
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use clap::ValueEnum;
use serde::Deserialize;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
    Svg,
}

impl OutputFormat {
    pub fn extension(self) -> &'static str {
        match self {
            Self::Csv => "csv",
            Self::Json => "json",
            Self::Svg => "svg",
        }
    }
}

/// Which spectrum the SVG plot shows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlotQuantity {
    ChiPsi,
    DeltaChi,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    Fig2a,
    Fig2b,
    Fig3a,
    Fig3b,
}

impl Preset {
    pub const ALL: [Preset; 4] = [Preset::Fig2a, Preset::Fig2b, Preset::Fig3a, Preset::Fig3b];

    pub fn name(self) -> &'static str {
        match self {
            Self::Fig2a => "fig2a",
            Self::Fig2b => "fig2b",
            Self::Fig3a => "fig3a",
            Self::Fig3b => "fig3b",
        }
    }

    /// `(Ωc, Ωr, ψ, plotted quantity)`.
    pub fn parameters(self) -> (f64, f64, f64, PlotQuantity) {
        match self {
            Self::Fig2a => (4.0, 0.0, 0.0, PlotQuantity::ChiPsi),
            Self::Fig2b => (4.0, 1.0, FRAC_PI_2, PlotQuantity::ChiPsi),
            Self::Fig3a => (1.0, 0.1, 0.0, PlotQuantity::DeltaChi),
            Self::Fig3b => (0.1, 0.01, 0.0, PlotQuantity::DeltaChi),
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = CliError;
    fn from_str(s: &str) -> Result<Self, CliError> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| {
                CliError::Config(format!(
                    "unknown preset `{s}` (expected fig2a, fig2b, fig3a or fig3b)"
                ))
            })
    }
}

pub const DEFAULT_GAMMA_RATIO: f64 = 1e-4;
pub const DEFAULT_DELTA_POINTS: usize = 801;
pub const DEFAULT_PSI_POINTS: usize = 91;
pub const DEFAULT_PROBE: f64 = 0.1;

/// Values as read from a file or flags; every field optional.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioOverrides {
    pub omega_c: Option<f64>,
    pub omega_r: Option<f64>,
    pub psi: Option<f64>,
    pub gamma_ratio: Option<f64>,
    pub delta_min: Option<f64>,
    pub delta_max: Option<f64>,
    pub delta_points: Option<usize>,
    pub outputs: Option<Vec<OutputFormat>>,
    pub preset: Option<Preset>,
    pub probe: Option<f64>,
    pub psi_points: Option<usize>,
    pub deltas: Option<Vec<f64>>,
}

impl ScenarioOverrides {
    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
        toml::from_str(&text)
            .map_err(|e| CliError::Config(format!("invalid config {}: {e}", path.display())))
    }

    /// Fields set in `other` replace those in `self`.
    pub fn merge(self, other: ScenarioOverrides) -> ScenarioOverrides {
        ScenarioOverrides {
            omega_c: other.omega_c.or(self.omega_c),
            omega_r: other.omega_r.or(self.omega_r),
            psi: other.psi.or(self.psi),
            gamma_ratio: other.gamma_ratio.or(self.gamma_ratio),
            delta_min: other.delta_min.or(self.delta_min),
            delta_max: other.delta_max.or(self.delta_max),
            delta_points: other.delta_points.or(self.delta_points),
            outputs: other.outputs.or(self.outputs),
            preset: other.preset.or(self.preset),
            probe: other.probe.or(self.probe),
            psi_points: other.psi_points.or(self.psi_points),
            deltas: other.deltas.or(self.deltas),
        }
    }
}

/// Fully resolved scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    /// Coupling Rabi frequency `Ωc` in units of `Γ`.
    pub omega_c: f64,
    /// Modulus of each circular rf Rabi component, `|Ωr| = |Ω′r|`.
    pub omega_r: f64,
    pub psi: f64,
    pub gamma_ratio: f64,
    pub delta_min: f64,
    pub delta_max: f64,
    pub delta_points: usize,
    pub outputs: Vec<OutputFormat>,
    pub preset: Option<Preset>,
    pub plot: PlotQuantity,
    /// Probe Rabi modulus used for dark-state analysis.
    pub probe: f64,
    pub psi_points: usize,
    pub deltas: Option<Vec<f64>>,
}

impl ScenarioConfig {
    /// Resolve `file` and `flags` (flags win); a preset named in either
    /// replaces the file's values for `Ωc`, `Ωr`, `ψ`, `γ/Γ` and the grid.
    pub fn resolve(file: ScenarioOverrides, flags: ScenarioOverrides) -> Result<Self, CliError> {
        let preset = flags.preset.or(file.preset);
        let mut merged = file;
        let mut plot = PlotQuantity::ChiPsi;
        if let Some(p) = preset {
            let (oc, or, psi, quantity) = p.parameters();
            merged.omega_c = Some(oc);
            merged.omega_r = Some(or);
            merged.psi = Some(psi);
            merged.gamma_ratio = Some(DEFAULT_GAMMA_RATIO);
            merged.delta_min = None;
            merged.delta_max = None;
            merged.delta_points = Some(DEFAULT_DELTA_POINTS);
            plot = quantity;
        }
        let m = merged.merge(flags);

        let omega_c = m.omega_c.unwrap_or(1.0);
        let omega_r = m.omega_r.unwrap_or(0.0);
        let sigma = omega_r / SQRT_2;
        let cfg = ScenarioConfig {
            omega_c,
            omega_r,
            psi: m.psi.unwrap_or(0.0),
            gamma_ratio: m.gamma_ratio.unwrap_or(DEFAULT_GAMMA_RATIO),
            delta_min: m.delta_min.unwrap_or(-2.0 * sigma - 1.0),
            delta_max: m.delta_max.unwrap_or(2.0 * sigma + 1.0),
            delta_points: m.delta_points.unwrap_or(DEFAULT_DELTA_POINTS),
            outputs: dedup(m.outputs.unwrap_or_else(|| vec![OutputFormat::Csv])),
            preset,
            plot,
            probe: m.probe.unwrap_or(DEFAULT_PROBE),
            psi_points: m.psi_points.unwrap_or(DEFAULT_PSI_POINTS),
            deltas: m.deltas,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn preset(preset: Preset) -> Self {
        Self::resolve(
            ScenarioOverrides {
                preset: Some(preset),
                ..Default::default()
            },
            ScenarioOverrides::default(),
        )
        .expect("presets are valid")
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |msg: String| Err(CliError::Config(msg));
        for (name, v) in [
            ("omega_c", self.omega_c),
            ("omega_r", self.omega_r),
            ("psi", self.psi),
            ("gamma_ratio", self.gamma_ratio),
            ("delta_min", self.delta_min),
            ("delta_max", self.delta_max),
            ("probe", self.probe),
        ] {
            if !v.is_finite() {
                return bad(format!("{name} must be finite, got {v}"));
            }
        }
        if self.omega_c < 0.0 || self.omega_r < 0.0 || self.probe < 0.0 {
            return bad("omega_c, omega_r and probe must be non-negative".into());
        }
        if self.gamma_ratio <= 0.0 {
            return bad(format!(
                "gamma_ratio must be positive, got {}",
                self.gamma_ratio
            ));
        }
        if self.delta_points < 2 {
            return bad(format!(
                "delta_points must be at least 2, got {}",
                self.delta_points
            ));
        }
        if self.delta_min >= self.delta_max {
            return bad(format!(
                "delta_min ({}) must be below delta_max ({})",
                self.delta_min, self.delta_max
            ));
        }
        if self.psi_points < 2 {
            return bad(format!(
                "psi_points must be at least 2, got {}",
                self.psi_points
            ));
        }
        if let Some(d) = &self.deltas {
            if d.is_empty() || d.iter().any(|x| !x.is_finite()) {
                return bad("deltas must be a non-empty list of finite values".into());
            }
        }
        Ok(())
    }

    pub fn light_shift(&self) -> f64 {
        self.omega_r / SQRT_2
    }
}

fn dedup(formats: Vec<OutputFormat>) -> Vec<OutputFormat> {
    let mut out = Vec::new();
    for f in formats {
        if !out.contains(&f) {
            out.push(f);
        }
    }
    out
}
