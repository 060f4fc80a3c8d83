//! Probe susceptibility tensor, absorption and refraction, and the transparency
//! angle.
//!
//! # Reduced units
//!
//! The medium polarization is `Px = 2dϱ(σ41 + σ41′)`, `Py = 2idϱ(σ41′ − σ41)`,
//! and the probe Rabi frequencies are `Ωp = d(Ex + iEy)/(√2ħ)`,
//! `Ω′p = d(Ex − iEy)/(√2ħ)`. With `λ = √2ϱd²/(ħΓ)` and `d/ħ = 1` this gives
//!
//! ```text
//! χab / λ = √2 Γ p_a / E_b,   p_x = σ41 + σ41′,   p_y = i(σ41′ − σ41)
//! ```
//!
//! so for an x-polarized probe with `Ωp = Ω′p = a`, `χx/λ = Γ(σ41 + σ41′)/a`.
//! All susceptibilities below are in units of `λ`.

use std::f64::consts::{FRAC_PI_2, PI, SQRT_2};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{ensure_finite, Error, Result};
use crate::liouville::{
    linear_response_with_system, steady_state_numeric, BorderedSystem, RelaxationParams,
    Superoperator,
};
use crate::matrix::{ComplexMatrix5, Level, C64};
use crate::model::{build_h0, DriveConfig};

/// Probe Rabi amplitude used for response solves. The response is exactly
/// linear, so the value cancels in `χ`.
pub const PROBE_AMPLITUDE: f64 = 1e-3;
/// Largest accepted off-diagonal tensor element relative to the diagonal one.
pub const CROSS_TOLERANCE: f64 = 1e-10;
/// Bisection tolerance in `ψ`.
pub const ANGLE_TOLERANCE: f64 = 1e-8;

const I: C64 = C64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SusceptibilityPoint {
    pub delta: f64,
    pub psi: f64,
    pub chi_x: C64,
    pub chi_y: C64,
    /// `χx cos²ψ + χy sin²ψ`.
    pub chi_psi: C64,
    /// `χy − χx`.
    pub delta_chi: C64,
    /// `8π² Im χ(ψ)`.
    pub f_abs: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DispersionPoint {
    /// `kc/ωp` to first order in `χ`.
    pub n_eff: f64,
    /// `k²` in units of `(ωp/c)²`.
    pub k2_exact: f64,
    /// `−εx/εy`, the value of `cot φ · tan ψ`.
    pub phi_psi_ratio: f64,
}

/// Steady state and factored generator at one detuning; answers probe
/// response queries for arbitrary probe polarizations.
pub struct ResponseSolver {
    cfg: DriveConfig,
    r: RelaxationParams,
    l: Superoperator,
    system: BorderedSystem,
    rho: ComplexMatrix5,
}

impl ResponseSolver {
    /// Probe fields in `cfg` are ignored.
    pub fn new(cfg: &DriveConfig, r: &RelaxationParams) -> Result<Self> {
        let cfg = cfg.without_probe();
        let rho = steady_state_numeric(&cfg, r)?;
        let l = crate::liouville::liouvillian(&build_h0(&cfg)?, r)?;
        let system = BorderedSystem::new(&l);
        Ok(Self {
            cfg,
            r: *r,
            l,
            system,
            rho,
        })
    }

    pub fn steady_state(&self) -> &ComplexMatrix5 {
        &self.rho
    }

    pub fn relaxation(&self) -> &RelaxationParams {
        &self.r
    }

    /// Medium polarization `(Px, Py)` in units of `λ·(field)` for a probe with
    /// reduced electric components `(Ex, Ey)`.
    pub fn polarization(&self, ex: C64, ey: C64) -> Result<(C64, C64)> {
        let probe = self
            .cfg
            .with_probe((ex + I * ey) / SQRT_2, (ex - I * ey) / SQRT_2);
        let resp = linear_response_with_system(&self.l, &self.system, &probe, &self.rho)?;
        let s41 = resp.sigma[(Level::Four.index(), Level::One.index())];
        let s41p = resp.sigma[(Level::Four.index(), Level::OnePrime.index())];
        let g = SQRT_2 * self.r.gamma_sp;
        Ok(((s41 + s41p) * g, I * (s41p - s41) * g))
    }

    /// `(χx, χy)` from probes aligned with `x` and `y`, checking that the
    /// tensor has no off-diagonal part.
    pub fn chi_components(&self) -> Result<(C64, C64)> {
        let e = C64::new(SQRT_2 * PROBE_AMPLITUDE, 0.0);
        let (px, py_cross) = self.polarization(e, C64::default())?;
        let (px_cross, py) = self.polarization(C64::default(), e)?;
        let (chi_x, chi_y) = (px / e, py / e);
        let scale = chi_x.norm().max(chi_y.norm());
        let ratio = if scale > 0.0 {
            (py_cross.norm().max(px_cross.norm()) / e.norm()) / scale
        } else {
            0.0
        };
        if ratio > CROSS_TOLERANCE {
            return Err(Error::AnisotropyViolated { ratio });
        }
        Ok((chi_x, chi_y))
    }

    /// `χ(ψ)` from a single probe polarized at angle `ψ` to `x`: the component
    /// of the induced polarization along the probe field.
    pub fn chi_oblique(&self, psi: f64) -> Result<C64> {
        let (c, s) = (psi.cos(), psi.sin());
        let e = SQRT_2 * PROBE_AMPLITUDE;
        let (px, py) = self.polarization(C64::new(e * c, 0.0), C64::new(e * s, 0.0))?;
        Ok((px * c + py * s) / e)
    }
}

/// `(χx, χy)` at detuning `delta` for the coupling and rf fields in `cfg`.
pub fn chi_components(cfg: &DriveConfig, r: &RelaxationParams, delta: f64) -> Result<(C64, C64)> {
    ResponseSolver::new(&cfg.with_delta(delta), r)?.chi_components()
}

pub fn chi_of_psi(delta: f64, chi: (C64, C64), psi: f64) -> SusceptibilityPoint {
    let (chi_x, chi_y) = chi;
    let (c2, s2) = (psi.cos().powi(2), psi.sin().powi(2));
    let chi_psi = chi_x * c2 + chi_y * s2;
    let mut point = SusceptibilityPoint {
        delta,
        psi,
        chi_x,
        chi_y,
        chi_psi,
        delta_chi: chi_y - chi_x,
        f_abs: 0.0,
    };
    point.f_abs = absorption_f(&point);
    point
}

/// Absorbed-energy ratio `F = 8π² Im χ(ψ)`; negative values mean gain.
pub fn absorption_f(point: &SusceptibilityPoint) -> f64 {
    let (c2, s2) = (point.psi.cos().powi(2), point.psi.sin().powi(2));
    8.0 * PI * PI * (point.chi_x * c2 + point.chi_y * s2).im
}

/// Linearized refractive index `1 + 2π Re χ(ψ)`.
pub fn linear_index(point: &SusceptibilityPoint) -> f64 {
    1.0 + 2.0 * PI * point.chi_psi.re
}

/// Fresnel relations in the transparent regime (imaginary parts dropped),
/// with `εa = 1 + 4π Re χa`.
pub fn dispersion(point: &SusceptibilityPoint, psi: f64) -> Result<DispersionPoint> {
    let ex = 1.0 + 4.0 * PI * point.chi_x.re;
    let ey = 1.0 + 4.0 * PI * point.chi_y.re;
    let (c2, s2) = (psi.cos().powi(2), psi.sin().powi(2));
    let denominator = ex * c2 + ey * s2;
    if denominator.abs() < 1e-12 {
        return Err(Error::PropagationSingular { denominator });
    }
    Ok(DispersionPoint {
        n_eff: 1.0 + 2.0 * PI * (point.chi_x.re * c2 + point.chi_y.re * s2),
        k2_exact: (ex * ex * c2 + ey * ey * s2) / denominator,
        phi_psi_ratio: -ex / ey,
    })
}

/// Resonant `Im χ(ψ)` to second order in `Ωr/Ωc` (`Γ = 1`, `Δ = 0`):
///
/// ```text
/// Im χ = 4γ/(8γ + 3Ωc² + 10Ωc²γ) · [(Ωc² − 2γΩc² + 4γ)/(γ(Ωc² + 2γ)) · (Ωr/Ωc)² sin²ψ − 1]
/// ```
pub fn im_chi_resonant_analytic(omega_c: f64, omega_r: f64, gamma: f64, psi: f64) -> f64 {
    let oc2 = omega_c * omega_c;
    let prefactor = 4.0 * gamma / (8.0 * gamma + 3.0 * oc2 + 10.0 * oc2 * gamma);
    let gain = (oc2 - 2.0 * gamma * oc2 + 4.0 * gamma) / (gamma * (oc2 + 2.0 * gamma));
    prefactor * (gain * (omega_r * omega_r / oc2) * psi.sin().powi(2) - 1.0)
}

/// `sin²ψ` at which the resonant `Im χ` of [`im_chi_resonant_analytic`] vanishes.
pub fn non_raman_sin2_analytic(omega_c: f64, omega_r: f64, gamma: f64) -> f64 {
    let oc2 = omega_c * omega_c;
    gamma * (oc2 + 2.0 * gamma) / (oc2 - 2.0 * gamma * oc2 + 4.0 * gamma) * oc2
        / (omega_r * omega_r)
}

pub fn non_raman_angle_analytic(omega_c: f64, omega_r: f64, gamma: f64) -> Result<f64> {
    let rhs = non_raman_sin2_analytic(omega_c, omega_r, gamma);
    if rhs.is_nan() || rhs <= 0.0 {
        return Err(Error::invalid(
            "omega_c/omega_r/gamma",
            format!("transparency condition gives sin²ψ = {rhs}"),
        ));
    }
    if rhs > 1.0 {
        return Err(Error::NoTransparencyAngle { rhs });
    }
    Ok(rhs.sqrt().asin())
}

/// Bisection root of `ψ ↦ Im χ(ψ)` at `Δ = 0`, each evaluation an oblique
/// probe solve. If `bracket` holds no sign change it is widened to `[0, π/2]`.
pub fn non_raman_angle_numeric(
    cfg: &DriveConfig,
    r: &RelaxationParams,
    bracket: (f64, f64),
) -> Result<f64> {
    ensure_finite("bracket.0", bracket.0)?;
    ensure_finite("bracket.1", bracket.1)?;
    let solver = ResponseSolver::new(&cfg.with_delta(0.0), r)?;
    let f = |psi: f64| solver.chi_oblique(psi).map(|c| c.im);

    let (mut lo, mut hi) = (bracket.0.min(bracket.1), bracket.0.max(bracket.1));
    let (mut flo, mut fhi) = (f(lo)?, f(hi)?);
    if flo * fhi > 0.0 {
        (lo, hi) = (0.0, FRAC_PI_2);
        (flo, fhi) = (f(lo)?, f(hi)?);
        if flo * fhi > 0.0 {
            return Err(Error::NoRootInBracket { lo, hi });
        }
    }
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    while hi - lo > ANGLE_TOLERANCE {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid)?;
        if fm == 0.0 {
            return Ok(mid);
        }
        if (fm < 0.0) == (flo < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// One [`SusceptibilityPoint`] per grid value, evaluated in parallel; output
/// order follows `delta_grid`.
pub fn spectrum_sweep(
    cfg: &DriveConfig,
    r: &RelaxationParams,
    psi: f64,
    delta_grid: &[f64],
) -> Result<Vec<SusceptibilityPoint>> {
    ensure_finite("psi", psi)?;
    if let Some(bad) = delta_grid.iter().find(|d| !d.is_finite()) {
        return Err(Error::invalid(
            "delta_grid",
            format!("non-finite value {bad}"),
        ));
    }
    if delta_grid.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::invalid("delta_grid", "must be sorted ascending"));
    }
    delta_grid
        .par_iter()
        .map(|&delta| {
            chi_components(cfg, r, delta)
                .map(|chi| chi_of_psi(delta, chi, psi))
                .map_err(|e| Error::AtDetuning {
                    delta,
                    source: Box::new(e),
                })
        })
        .collect()
}

/// `n` evenly spaced values from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![lo],
        _ => (0..n)
            .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
            .collect(),
    }
}

/// Indices of discrete local minima whose prominence (height of the lower of
/// the two enclosing barriers above the minimum) is at least `min_prominence`.
/// Plateaus count once, at their first index.
pub fn local_minima(values: &[f64], min_prominence: f64) -> Vec<usize> {
    let n = values.len();
    let mut out = Vec::new();
    let mut i = 1;
    while i + 1 < n {
        let v = values[i];
        if values[i - 1] > v {
            let mut j = i;
            while j + 1 < n && values[j + 1] == v {
                j += 1;
            }
            if j + 1 < n && values[j + 1] > v && prominence(values, i, j) >= min_prominence {
                out.push(i);
            }
            i = j + 1;
        } else {
            i += 1;
        }
    }
    out
}

fn prominence(values: &[f64], first: usize, last: usize) -> f64 {
    let v = values[first];
    // Highest point passed before the series drops below `v` (or the edge).
    let barrier = |side: &mut dyn Iterator<Item = &f64>| {
        let mut peak = v;
        for &x in side {
            if x < v {
                break;
            }
            peak = peak.max(x);
        }
        peak
    };
    let left = barrier(&mut values[..first].iter().rev());
    let right = barrier(&mut values[last + 1..].iter());
    left.min(right) - v
}

/// [`local_minima`] with the prominence threshold `rel · (max − min)`.
pub fn significant_minima(values: &[f64], rel: f64) -> Vec<usize> {
    let (lo, hi) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| {
            (a.min(x), b.max(x))
        });
    let span = if values.is_empty() { 0.0 } else { hi - lo };
    if span <= 0.0 {
        return Vec::new();
    }
    local_minima(values, rel * span)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::PolarizationConfig;
    use proptest::prelude::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn drive(omega_c: f64, omega_r: f64) -> DriveConfig {
        PolarizationConfig::from_rabi(0.0, 0.0, omega_r)
            .unwrap()
            .drive(0.0, omega_c)
            .unwrap()
    }

    #[test]
    fn chi_of_psi_examples() {
        let (a, b) = (C64::new(1.0, -2.0), C64::new(-0.5, 3.0));
        assert_eq!(chi_of_psi(0.0, (a, b), 0.0).chi_psi, a);
        assert!((chi_of_psi(0.0, (a, b), FRAC_PI_2).chi_psi - b).norm() < 1e-15);
        assert!((chi_of_psi(0.0, (a, b), PI / 4.0).chi_psi - (a + b) * 0.5).norm() < 1e-15);
    }

    #[test]
    fn absorption_examples() {
        assert_eq!(chi_of_psi(0.0, (c(1.0), c(2.0)), 0.7).f_abs, 0.0);
        let p = chi_of_psi(0.0, (C64::new(0.0, -1.3325e-4), c(0.0)), 0.0);
        assert!((p.f_abs - -1.052e-2).abs() < 1e-5);
        let chi = (C64::new(0.1, -0.4), C64::new(0.2, 0.9));
        for psi in [0.1, 0.8, 2.0] {
            let a = chi_of_psi(0.0, chi, psi).f_abs;
            let b = chi_of_psi(0.0, chi, psi + PI).f_abs;
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn vacuum_dispersion() {
        let d = dispersion(&chi_of_psi(0.0, (c(0.0), c(0.0)), 0.3), 0.3).unwrap();
        assert_eq!((d.k2_exact, d.n_eff, d.phi_psi_ratio), (1.0, 1.0, -1.0));
    }

    #[test]
    fn single_axis_dispersion() {
        let chi = (C64::new(0.01, 0.0), C64::new(-0.02, 0.0));
        let d = dispersion(&chi_of_psi(0.0, chi, 0.0), 0.0).unwrap();
        assert!((d.k2_exact - (1.0 + 4.0 * PI * 0.01)).abs() < 1e-14);
        assert!((d.n_eff - (1.0 + 2.0 * PI * 0.01)).abs() < 1e-14);
    }

    #[test]
    fn singular_dispersion() {
        let chi = (c(-1.0 / (4.0 * PI)), c(0.0));
        let err = dispersion(&chi_of_psi(0.0, chi, 0.0), 0.0).unwrap_err();
        assert!(matches!(err, Error::PropagationSingular { .. }));
    }

    #[test]
    fn resonant_formula_values() {
        let v = im_chi_resonant_analytic(1.0, 0.01, 1e-4, 0.0);
        assert!((v - -4e-4 / 3.0018).abs() < 1e-15);
        assert!((v - -1.3325e-4).abs() < 1e-8);
        for psi in [0.3, 1.0, FRAC_PI_2] {
            assert_eq!(im_chi_resonant_analytic(1.0, 0.0, 1e-4, psi), v);
        }
        let psi = non_raman_angle_analytic(1.0, 0.1, 1e-4).unwrap();
        assert!(im_chi_resonant_analytic(1.0, 0.1, 1e-4, psi).abs() < 1e-18);
    }

    #[test]
    fn analytic_angle_values() {
        let s2 = non_raman_sin2_analytic(1.0, 0.1, 1e-4);
        assert!((s2 - 1.0000e-2).abs() < 1e-5);
        let psi = non_raman_angle_analytic(1.0, 0.1, 1e-4).unwrap();
        assert!((psi - 0.10017).abs() < 1e-5);
        assert!(non_raman_angle_analytic(1.0, 1e6, 1e-4).unwrap() < 1e-6);
        match non_raman_angle_analytic(1.0, 0.005, 1e-4) {
            Err(Error::NoTransparencyAngle { rhs }) => assert!((rhs - 4.0).abs() < 1e-2),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn gain_at_resonance_without_rf_angle() {
        for (oc, y) in [(0.5, 1e-4), (1.0, 1e-3), (4.0, 1e-4)] {
            let (chi_x, _) = chi_components(
                &drive(oc, 0.01),
                &RelaxationParams::with_gamma_ratio(y),
                0.0,
            )
            .unwrap();
            assert!(chi_x.im < 0.0);
        }
    }

    #[test]
    fn isotropic_without_rf() {
        let r = RelaxationParams::default();
        for delta in [-1.0, -0.1, 0.0, 0.05, 0.7] {
            let (x, y) = chi_components(&drive(1.0, 0.0), &r, delta).unwrap();
            assert!((x - y).norm() <= 1e-10 * x.norm());
        }
    }

    #[test]
    fn oblique_probe_matches_tensor() {
        let r = RelaxationParams::default();
        let solver = ResponseSolver::new(&drive(1.0, 0.1).with_delta(0.03), &r).unwrap();
        let chi = solver.chi_components().unwrap();
        for psi in [0.0, 0.2, 0.9, FRAC_PI_2] {
            let direct = solver.chi_oblique(psi).unwrap();
            let composed = chi_of_psi(0.0, chi, psi).chi_psi;
            assert!((direct - composed).norm() <= 1e-10 * composed.norm());
        }
    }

    #[test]
    fn no_root_without_rf() {
        let r = RelaxationParams::default();
        let err = non_raman_angle_numeric(&drive(1.0, 0.0), &r, (0.0, FRAC_PI_2)).unwrap_err();
        assert!(matches!(err, Error::NoRootInBracket { .. }));
    }

    #[test]
    fn sweep_preserves_order_and_tags_errors() {
        let r = RelaxationParams::default();
        let grid = linspace(-1.0, 1.0, 9);
        let points = spectrum_sweep(&drive(1.0, 0.1), &r, 0.4, &grid).unwrap();
        assert_eq!(points.iter().map(|p| p.delta).collect::<Vec<_>>(), grid);
        assert!(spectrum_sweep(&drive(1.0, 0.1), &r, 0.4, &[1.0, 0.0]).is_err());
        let err = spectrum_sweep(
            &drive(1.0, 0.1),
            &RelaxationParams::with_gamma_ratio(-1.0),
            0.4,
            &[0.5],
        )
        .unwrap_err();
        assert!(matches!(err, Error::AtDetuning { delta, .. } if delta == 0.5));
    }

    #[test]
    fn minima_detection() {
        let v = [3.0, 1.0, 2.0, 1.9, 2.5, 0.0, 4.0];
        assert_eq!(local_minima(&v, 0.0), vec![1, 3, 5]);
        assert_eq!(local_minima(&v, 0.5), vec![1, 5]);
        assert_eq!(local_minima(&[1.0, 0.0, 0.0, 1.0], 0.0), vec![1]);
        assert!(local_minima(&[0.0, 1.0, 2.0], 0.0).is_empty());
        assert_eq!(significant_minima(&v, 0.2), vec![1, 5]);
        assert!(significant_minima(&[1.0; 5], 0.1).is_empty());
    }

    #[test]
    fn linspace_endpoints() {
        let g = linspace(-2.0, 2.0, 801);
        assert_eq!((g[0], g[400], g[800]), (-2.0, 0.0, 2.0));
        assert_eq!(linspace(1.0, 2.0, 1), vec![1.0]);
    }

    proptest! {
        #[test]
        fn decomposition_identity(
            xr in -1.0..1.0f64, xi in -1.0..1.0f64, yr in -1.0..1.0f64, yi in -1.0..1.0f64, psi in -4.0..4.0f64
        ) {
            let chi = (C64::new(xr, xi), C64::new(yr, yi));
            let p = chi_of_psi(0.0, chi, psi);
            let p0 = chi_of_psi(0.0, chi, 0.0);
            let lhs = p.chi_psi - p0.chi_psi;
            let rhs = p.delta_chi * psi.sin().powi(2);
            prop_assert!((lhs - rhs).norm() < 1e-12);
            prop_assert!((p.delta_chi - (chi.1 - chi.0)).norm() < 1e-12);
        }

        #[test]
        fn small_chi_index_is_first_order(
            x in -1e-4..1e-4f64, y in -1e-4..1e-4f64, psi in 0.0..PI
        ) {
            let p = chi_of_psi(0.0, (c(x), c(y)), psi);
            let d = dispersion(&p, psi).unwrap();
            let m = x.abs().max(y.abs());
            prop_assert!((d.k2_exact.sqrt() - d.n_eff).abs() <= 200.0 * m * m + 1e-15);
            prop_assert_eq!(d.n_eff, linear_index(&p));
        }
    }
}
