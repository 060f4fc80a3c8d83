use std::f64::consts::FRAC_PI_2;
use std::path::PathBuf;

use eit_core::liouville::{steady_state_analytic, steady_state_numeric};
use eit_core::model::{find_dark_states, DEFAULT_DARK_TOLERANCE};
use eit_core::spectroscopy::{
    chi_of_psi, linspace, non_raman_angle_analytic, non_raman_angle_numeric,
    non_raman_sin2_analytic, spectrum_sweep, ResponseSolver, SusceptibilityPoint,
};
use eit_core::{ComplexMatrix5, DriveConfig, Error, PolarizationConfig, RelaxationParams, C64};
use serde::Serialize;
use serde_json::value::RawValue;

use crate::config::{OutputFormat, PlotQuantity, Preset, ScenarioConfig};
use crate::output::{self, num, ConfigEcho, Series};
use crate::{Cli, CliError, Command, ScenarioArgs};

/// What a command produced, for the caller to report.
#[derive(Debug, Default)]
pub struct Outcome {
    pub files: Vec<PathBuf>,
    pub messages: Vec<String>,
    pub warnings: Vec<String>,
}

pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    let (args, preset) = match &cli.command {
        Command::Preset { name, args } => (args, Some(*name)),
        Command::Spectrum(a)
        | Command::Darkstates(a)
        | Command::AngleScan(a)
        | Command::Steady(a) => (a, None),
    };
    let cfg = args.resolve(preset)?;
    let body = || match &cli.command {
        Command::Spectrum(a) | Command::Preset { args: a, .. } => run_spectrum(&cfg, a),
        Command::Darkstates(a) => run_darkstates(&cfg, a),
        Command::AngleScan(a) => run_angle_scan(&cfg, a),
        Command::Steady(a) => run_steady(&cfg, a),
    };
    match args.workers {
        Some(0) => Err(CliError::Config("--workers must be at least 1".into())),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Config(format!("cannot start worker pool: {e}")))?
            .install(body),
        None => body(),
    }
}

pub fn relaxation(cfg: &ScenarioConfig) -> RelaxationParams {
    RelaxationParams::with_gamma_ratio(cfg.gamma_ratio)
}

/// Drive with the scenario's coupling and rf, probe of Rabi modulus `probe`.
pub fn drive(cfg: &ScenarioConfig, delta: f64, probe: f64) -> Result<DriveConfig, CliError> {
    Ok(PolarizationConfig::from_rabi(probe, cfg.psi, cfg.omega_r)?.drive(delta, cfg.omega_c)?)
}

pub fn delta_grid(cfg: &ScenarioConfig) -> Vec<f64> {
    linspace(cfg.delta_min, cfg.delta_max, cfg.delta_points)
}

/// Susceptibility spectrum over the scenario's detuning grid.
pub fn spectrum_points(cfg: &ScenarioConfig) -> Result<Vec<SusceptibilityPoint>, CliError> {
    let d = drive(cfg, 0.0, 0.0)?;
    Ok(spectrum_sweep(
        &d,
        &relaxation(cfg),
        cfg.psi,
        &delta_grid(cfg),
    )?)
}

fn title(cfg: &ScenarioConfig) -> String {
    let head = cfg.preset.map(|p| format!("{p}: ")).unwrap_or_default();
    format!(
        "{head}Ωc = {}Γ, Ωr = {}Γ, ψ = {:.4}, γ/Γ = {:e}",
        cfg.omega_c, cfg.omega_r, cfg.psi, cfg.gamma_ratio
    )
}

pub fn spectrum_svg(cfg: &ScenarioConfig, points: &[SusceptibilityPoint]) -> String {
    let x: Vec<f64> = points.iter().map(|p| p.delta).collect();
    let (pick, y_label): (fn(&SusceptibilityPoint) -> C64, _) = match cfg.plot {
        PlotQuantity::ChiPsi => (|p| p.chi_psi, "χ(ψ) / λ"),
        PlotQuantity::DeltaChi => (|p| p.delta_chi, "δχ / λ"),
    };
    let series = [
        Series {
            label: "Im",
            values: points.iter().map(|p| pick(p).im).collect(),
            dashed: false,
        },
        Series {
            label: "Re",
            values: points.iter().map(|p| pick(p).re).collect(),
            dashed: true,
        },
    ];
    output::svg_plot(&title(cfg), "Δ / Γ", y_label, &x, &series)
}

fn stem(cfg: &ScenarioConfig) -> &'static str {
    cfg.preset.map(Preset::name).unwrap_or("spectrum")
}

fn run_spectrum(cfg: &ScenarioConfig, args: &ScenarioArgs) -> Result<Outcome, CliError> {
    let points = spectrum_points(cfg)?;
    let mut outcome = Outcome::default();
    for &format in &cfg.outputs {
        let contents = match format {
            OutputFormat::Csv => output::spectrum_csv(&points),
            OutputFormat::Json => output::spectrum_json(cfg, &points),
            OutputFormat::Svg => spectrum_svg(cfg, &points),
        };
        let name = format!("{}.{}", stem(cfg), format.extension());
        outcome
            .files
            .push(output::write_file(&args.out, &name, &contents)?);
    }
    Ok(outcome)
}

#[derive(Serialize)]
struct DarkRecordOut {
    eigenvalue: Box<RawValue>,
    excited_overlap: Box<RawValue>,
    kind: eit_core::DarkKind,
    /// `[re, im]` amplitudes on |1⟩, |1′⟩, |2⟩, |3⟩, |4⟩.
    eigenvector: Vec<[Box<RawValue>; 2]>,
}

#[derive(Serialize)]
struct DarkPointOut {
    delta: Box<RawValue>,
    records: Vec<DarkRecordOut>,
}

#[derive(Serialize)]
struct DarkConfigOut {
    #[serde(flatten)]
    scenario: ConfigEcho,
    probe: Box<RawValue>,
    dark_tolerance: Box<RawValue>,
}

#[derive(Serialize)]
struct DarkReportOut {
    config: DarkConfigOut,
    warnings: Vec<String>,
    points: Vec<DarkPointOut>,
}

fn pair(z: C64) -> [Box<RawValue>; 2] {
    [num(z.re), num(z.im)]
}

fn run_darkstates(cfg: &ScenarioConfig, args: &ScenarioArgs) -> Result<Outcome, CliError> {
    let mut outcome = Outcome::default();
    let deltas = cfg.deltas.clone().unwrap_or_else(|| delta_grid(cfg));
    let mut points = Vec::with_capacity(deltas.len());
    let mut warnings: Vec<String> = Vec::new();
    for &delta in &deltas {
        let report = find_dark_states(&drive(cfg, delta, cfg.probe)?, DEFAULT_DARK_TOLERANCE)
            .map_err(|e| Error::AtDetuning {
                delta,
                source: Box::new(e),
            })?;
        for w in report.warnings {
            if !warnings.contains(&w) {
                warnings.push(w);
            }
        }
        let records = report
            .records
            .iter()
            .map(|r| DarkRecordOut {
                eigenvalue: num(r.eigenvalue),
                excited_overlap: num(r.excited_overlap),
                kind: r.kind,
                eigenvector: r.eigenvector.iter().map(|&z| pair(z)).collect(),
            })
            .collect();
        points.push(DarkPointOut {
            delta: num(delta),
            records,
        });
    }
    let report = DarkReportOut {
        config: DarkConfigOut {
            scenario: ConfigEcho::new(cfg),
            probe: num(cfg.probe),
            dark_tolerance: num(DEFAULT_DARK_TOLERANCE),
        },
        warnings: warnings.clone(),
        points,
    };
    let text = serde_json::to_string(&report).expect("report serializes") + "\n";
    outcome
        .files
        .push(output::write_file(&args.out, "darkstates.json", &text)?);
    outcome.warnings.extend(warnings);
    Ok(outcome)
}

/// Result of a resonant angle scan.
#[derive(Debug, Clone, PartialEq)]
pub struct AngleScan {
    /// `(ψ, χ(ψ))` at `Δ = 0`.
    pub table: Vec<(f64, C64)>,
    pub numeric: Option<f64>,
    pub analytic: Option<f64>,
    /// Right-hand side of the `sin²ψ` transparency condition.
    pub rhs: f64,
}

impl AngleScan {
    pub fn relative_difference(&self) -> Option<f64> {
        match (self.numeric, self.analytic) {
            (Some(n), Some(a)) => Some((n - a).abs() / a.abs()),
            _ => None,
        }
    }

    pub fn report_lines(&self) -> Vec<String> {
        let mut lines = Vec::new();
        match self.numeric {
            Some(n) => lines.push(format!("numeric transparency angle: {n:.10} rad")),
            None => lines.push(format!(
                "no transparency angle (sin²ψ condition RHS = {})",
                self.rhs
            )),
        }
        match self.analytic {
            Some(a) => lines.push(format!("analytic transparency angle: {a:.10} rad")),
            None => lines.push(format!(
                "analytic: no transparency angle (sin²ψ condition RHS = {})",
                self.rhs
            )),
        }
        if let Some(d) = self.relative_difference() {
            lines.push(format!("relative difference: {d:.3e}"));
        }
        lines
    }
}

pub fn angle_scan(cfg: &ScenarioConfig) -> Result<AngleScan, CliError> {
    let r = relaxation(cfg);
    let d = drive(cfg, 0.0, 0.0)?;
    let chi = ResponseSolver::new(&d, &r)?.chi_components()?;
    let table = linspace(0.0, FRAC_PI_2, cfg.psi_points)
        .into_iter()
        .map(|psi| (psi, chi_of_psi(0.0, chi, psi).chi_psi))
        .collect();
    let numeric = match non_raman_angle_numeric(&d, &r, (0.0, FRAC_PI_2)) {
        Ok(root) => Some(root),
        Err(Error::NoRootInBracket { .. }) => None,
        Err(e) => return Err(e.into()),
    };
    let rhs = non_raman_sin2_analytic(cfg.omega_c, cfg.omega_r, r.gamma_ex);
    let analytic = non_raman_angle_analytic(cfg.omega_c, cfg.omega_r, r.gamma_ex).ok();
    Ok(AngleScan {
        table,
        numeric,
        analytic,
        rhs,
    })
}

#[derive(Serialize)]
struct AngleRootOut {
    config: ConfigEcho,
    numeric: Option<Box<RawValue>>,
    analytic: Option<Box<RawValue>>,
    relative_difference: Option<Box<RawValue>>,
    rhs: Box<RawValue>,
}

const ANGLE_COLUMNS: [&str; 3] = ["psi", "re_chi_psi", "im_chi_psi"];

fn run_angle_scan(cfg: &ScenarioConfig, args: &ScenarioArgs) -> Result<Outcome, CliError> {
    let scan = angle_scan(cfg)?;
    let mut outcome = Outcome {
        messages: scan.report_lines(),
        ..Default::default()
    };
    let rows = || scan.table.iter().map(|&(psi, c)| vec![psi, c.re, c.im]);
    for &format in &cfg.outputs {
        let contents = match format {
            OutputFormat::Csv => output::csv(&ANGLE_COLUMNS, rows()),
            OutputFormat::Json => output::table_json(&ConfigEcho::new(cfg), &ANGLE_COLUMNS, rows()),
            OutputFormat::Svg => {
                let x: Vec<f64> = scan.table.iter().map(|t| t.0).collect();
                let series = [
                    Series {
                        label: "Im",
                        values: scan.table.iter().map(|t| t.1.im).collect(),
                        dashed: false,
                    },
                    Series {
                        label: "Re",
                        values: scan.table.iter().map(|t| t.1.re).collect(),
                        dashed: true,
                    },
                ];
                output::svg_plot(
                    &format!("Δ = 0, {}", title(cfg)),
                    "ψ / rad",
                    "χ(ψ) / λ",
                    &x,
                    &series,
                )
            }
        };
        let name = format!("angle_scan.{}", format.extension());
        outcome
            .files
            .push(output::write_file(&args.out, &name, &contents)?);
    }
    let root = AngleRootOut {
        config: ConfigEcho::new(cfg),
        numeric: scan.numeric.map(num),
        analytic: scan.analytic.map(num),
        relative_difference: scan.relative_difference().map(num),
        rhs: num(scan.rhs),
    };
    let text = serde_json::to_string(&root).expect("report serializes") + "\n";
    outcome.files.push(output::write_file(
        &args.out,
        "angle_scan_root.json",
        &text,
    )?);
    Ok(outcome)
}

fn matrix_out(m: &ComplexMatrix5) -> Vec<Vec<[Box<RawValue>; 2]>> {
    (0..5)
        .map(|i| (0..5).map(|j| pair(m[(i, j)])).collect())
        .collect()
}

#[derive(Serialize)]
struct SteadyOut {
    config: ConfigEcho,
    numeric: Vec<Vec<[Box<RawValue>; 2]>>,
    analytic: Vec<Vec<[Box<RawValue>; 2]>>,
    max_abs_difference: Box<RawValue>,
}

fn run_steady(cfg: &ScenarioConfig, args: &ScenarioArgs) -> Result<Outcome, CliError> {
    let mut outcome = Outcome::default();
    let r = relaxation(cfg);
    let d = drive(cfg, 0.0, 0.0)?;
    let numeric = steady_state_numeric(&d, &r)?;
    let analytic = steady_state_analytic(&d, &r)?;
    outcome.warnings.extend(analytic.warning.clone());
    let diff = eit_core::matrix::max_abs(&(numeric - analytic.rho));
    outcome
        .messages
        .push(format!("max |ρ_numeric − ρ_closed_form| = {diff:.3e}"));
    let report = SteadyOut {
        config: ConfigEcho::new(cfg),
        numeric: matrix_out(&numeric),
        analytic: matrix_out(&analytic.rho),
        max_abs_difference: num(diff),
    };
    let text = serde_json::to_string(&report).expect("report serializes") + "\n";
    outcome
        .files
        .push(output::write_file(&args.out, "steady.json", &text)?);
    Ok(outcome)
}
