//! Density-matrix dynamics: relaxation superoperators, steady state, linear
//! probe response and a brute-force time integrator.
//!
//! The generator is `dρ/dt = L ρ` with
//!
//! ```text
//! L = D_sp + D_ex − C(H₀),    C(h): X ↦ i[h, X]
//! ```
//!
//! where `D_sp` and `D_ex` carry the (negative) spontaneous-emission and
//! spin-exchange rates. To first order in the probe, `σ` obeys
//! `L σ = i[V, ρ]`.

mod dynamics;
mod solve;
mod superop;

pub use dynamics::time_evolve;
pub use solve::{
    linear_response, linear_response_with_system, steady_state_analytic, steady_state_numeric,
    AnalyticSteadyState, BorderedSystem, SolveDiagnostics, SolveMethod, RESIDUAL_LIMIT,
};
pub use superop::{
    coherent_superop, liouvillian, spin_exchange_superop, spontaneous_superop, Superoperator,
};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix5;

/// Relaxation rates in units of `Γ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RelaxationParams {
    /// Excited-state decay rate `Γ`.
    pub gamma_sp: f64,
    /// Spin-exchange rate `γ`.
    pub gamma_ex: f64,
    /// Also dephase optical coherences `σ4β` at rate `γ` (off by default).
    pub optical_exchange_dephasing: bool,
}

impl Default for RelaxationParams {
    fn default() -> Self {
        Self {
            gamma_sp: 1.0,
            gamma_ex: 1e-4,
            optical_exchange_dephasing: false,
        }
    }
}

impl RelaxationParams {
    /// `Γ = 1` with the given `γ/Γ`.
    pub fn with_gamma_ratio(gamma_ratio: f64) -> Self {
        Self {
            gamma_ex: gamma_ratio,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma_sp.is_finite() && self.gamma_sp > 0.0) {
            return Err(Error::invalid(
                "gamma_sp",
                format!("must be positive, got {}", self.gamma_sp),
            ));
        }
        if !(self.gamma_ex.is_finite() && self.gamma_ex >= 0.0) {
            return Err(Error::invalid(
                "gamma_ex",
                format!("must be non-negative, got {}", self.gamma_ex),
            ));
        }
        Ok(())
    }
}

/// First-order density correction for the probe amplitudes in the drive.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearResponse {
    pub sigma: ComplexMatrix5,
    /// `‖L σ − i vec([V, ρ])‖`.
    pub residual: f64,
    pub diagnostics: SolveDiagnostics,
}
