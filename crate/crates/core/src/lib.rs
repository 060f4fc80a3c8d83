//! Numerical model of electromagnetically induced transparency in a
//! degenerate four-level atom.
//!
//! The atom has a twice-degenerate ground level (`|1⟩`, `|1′⟩`), two further
//! metastable levels `|2⟩` and `|3⟩`, and a single lifetime-broadened excited
//! level `|4⟩`. A coupling laser drives `|2⟩ → |4⟩`, an rf field drives
//! `|1⟩,|1′⟩ → |3⟩`, and a weak probe laser is scanned across `|1⟩,|1′⟩ → |4⟩`.
//!
//! Units throughout: `ħ = 1`, all frequencies in units of the excited-state
//! decay rate `Γ`, susceptibilities in units of `λ = √2ϱd²/(ħΓ)`.
//!
//! Module map:
//!
//! * [`model`] builds Hamiltonians, the rf-dressed basis and dark-state reports.
//! * [`geometry`] maps field polarizations (hydrogen 1S hyperfine realization)
//!   onto complex Rabi frequencies.
//! * [`liouville`] assembles superoperators and solves for steady states,
//!   probe linear response, and RK4 dynamics.
//! * [`spectroscopy`] turns responses into susceptibility spectra, absorption
//!   and dispersion observables, and transparency-angle predictions.

pub mod error;
pub mod geometry;
pub mod liouville;
pub mod matrix;
pub mod model;
pub mod spectroscopy;

pub use error::{Error, Result};
pub use geometry::PolarizationConfig;
pub use liouville::{LinearResponse, RelaxationParams, Superoperator};
pub use matrix::{ComplexMatrix5, Level, C64};
pub use model::{DarkKind, DarkStateReport, DressedBasis, DriveConfig};
pub use spectroscopy::{DispersionPoint, SusceptibilityPoint};
