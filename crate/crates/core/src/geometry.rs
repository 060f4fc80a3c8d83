//! Field polarizations to Rabi frequencies for the hydrogen 1S realization.
//!
//! Level assignment (see [`Level::hydrogen_label`](crate::Level::hydrogen_label)):
//! `|1⟩ = |S,1;1⟩`, `|1′⟩ = |S,1;−1⟩`, `|2⟩ = |S,1;0⟩`, `|3⟩ = |S,0;0⟩`,
//! `|4⟩ = |P,0;0⟩`. The probe couples `|4⟩` to the `m = ±1` pair through the
//! circular components of its electric field; the rf field couples `|3⟩` to the
//! same pair through the circular components of its magnetic field.
//!
//! Dipole constants are absorbed into the amplitudes (`d/ħ = m/ħ = 1`), so
//! components are given directly in units of `Γ`:
//!
//! ```text
//! Ωp = (Ex + iEy)/√2     Ω′p = (Ex − iEy)/√2
//! Ωr = (Hx + iHy)/√2     Ω′r = (Hx − iHy)/√2
//! ```

use std::f64::consts::SQRT_2;

use crate::error::{Error, Result};
use crate::matrix::C64;
use crate::model::DriveConfig;

const I: C64 = C64::new(0.0, 1.0);

/// Probe and rf field polarizations in the transverse plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PolarizationConfig {
    /// Linear polarizations. The rf wave is polarized along `x`, so its
    /// magnetic vector lies along `y`; the probe electric vector makes the
    /// angle `psi` with `x`. At `psi = 0` the probe E is perpendicular to the
    /// rf H, at `psi = π/2` parallel to it.
    Angle { e_amp: f64, psi: f64, h_amp: f64 },
    /// Arbitrary (possibly elliptic) components, used verbatim.
    Components { ex: C64, ey: C64, hx: C64, hy: C64 },
}

impl PolarizationConfig {
    pub fn angle(e_amp: f64, psi: f64, h_amp: f64) -> Result<Self> {
        let p = Self::Angle { e_amp, psi, h_amp };
        p.validate()?;
        Ok(p)
    }

    pub fn components(ex: C64, ey: C64, hx: C64, hy: C64) -> Result<Self> {
        let p = Self::Components { ex, ey, hx, hy };
        p.validate()?;
        Ok(p)
    }

    /// Angle form parameterized by Rabi magnitudes: each circular probe
    /// component has modulus `probe`, each circular rf component `rf`.
    pub fn from_rabi(probe: f64, psi: f64, rf: f64) -> Result<Self> {
        Self::angle(SQRT_2 * probe, psi, SQRT_2 * rf)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::Angle { e_amp, psi, h_amp } => {
                for (name, v) in [("e_amp", e_amp), ("h_amp", h_amp)] {
                    if !(v.is_finite() && v >= 0.0) {
                        return Err(Error::invalid(
                            name,
                            format!("must be finite and non-negative, got {v}"),
                        ));
                    }
                }
                crate::error::ensure_finite("psi", psi)
            }
            Self::Components { ex, ey, hx, hy } => {
                for (name, z) in [("ex", ex), ("ey", ey), ("hx", hx), ("hy", hy)] {
                    if !(z.re.is_finite() && z.im.is_finite()) {
                        return Err(Error::invalid(name, format!("must be finite, got {z}")));
                    }
                }
                Ok(())
            }
        }
    }

    /// `(Ex, Ey, Hx, Hy)`.
    pub fn field_components(&self) -> (C64, C64, C64, C64) {
        match *self {
            Self::Angle { e_amp, psi, h_amp } => (
                C64::new(e_amp * psi.cos(), 0.0),
                C64::new(e_amp * psi.sin(), 0.0),
                C64::default(),
                C64::new(h_amp, 0.0),
            ),
            Self::Components { ex, ey, hx, hy } => (ex, ey, hx, hy),
        }
    }

    /// Same rf field, probe replaced by the given electric components.
    pub fn with_probe_field(&self, ex: C64, ey: C64) -> Self {
        let (_, _, hx, hy) = self.field_components();
        Self::Components { ex, ey, hx, hy }
    }

    /// Same probe, rf replaced by the given magnetic components.
    pub fn with_rf_field(&self, hx: C64, hy: C64) -> Self {
        let (ex, ey, _, _) = self.field_components();
        Self::Components { ex, ey, hx, hy }
    }

    /// Same configuration with the rf amplitude multiplied by `factor`.
    pub fn scale_rf(&self, factor: f64) -> Self {
        let (_, _, hx, hy) = self.field_components();
        self.with_rf_field(hx * factor, hy * factor)
    }

    pub fn h_norm(&self) -> f64 {
        let (_, _, hx, hy) = self.field_components();
        (hx.norm_sqr() + hy.norm_sqr()).sqrt()
    }

    /// Drive configuration with these probe/rf fields plus coupling and detuning.
    pub fn drive(&self, delta: f64, omega_c: f64) -> Result<DriveConfig> {
        self.validate()?;
        let (p, pp) = probe_rabi(self);
        let (r, rp) = rf_rabi(self);
        let cfg = DriveConfig::default()
            .with_delta(delta)
            .with_coupling(omega_c)
            .with_rf(r, rp)
            .with_probe(p, pp);
        cfg.validate()?;
        Ok(cfg)
    }
}

fn circular(x: C64, y: C64) -> (C64, C64) {
    ((x + I * y) / SQRT_2, (x - I * y) / SQRT_2)
}

/// `(Ωp, Ω′p)`.
pub fn probe_rabi(p: &PolarizationConfig) -> (C64, C64) {
    let (ex, ey, _, _) = p.field_components();
    circular(ex, ey)
}

/// `(Ωr, Ω′r)`.
pub fn rf_rabi(p: &PolarizationConfig) -> (C64, C64) {
    let (_, _, hx, hy) = p.field_components();
    circular(hx, hy)
}

/// `(Ω₀, Ω)` from the vector and scalar products of the fields:
/// `Ω₀ = i(EyHx − ExHy)/|H|`, `Ω = (ExH̄x + EyH̄y)/|H|`.
pub fn dressed_rabi_geometric(p: &PolarizationConfig) -> Result<(C64, C64)> {
    p.validate()?;
    let (ex, ey, hx, hy) = p.field_components();
    let h = p.h_norm();
    if h == 0.0 {
        return Err(Error::RfFieldRequired);
    }
    let omega0 = I * (ey * hx - ex * hy) / h;
    let omega = (ex * hx.conj() + ey * hy.conj()) / h;
    Ok((omega0, omega))
}
