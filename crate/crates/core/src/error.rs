use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("dressed basis undefined without rf field")]
    NoRfField,

    #[error("rf field required")]
    RfFieldRequired,

    #[error("operator is not Hermitian (max |H - H†| = {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("singular system: {0}")]
    Singular(String),

    #[error(
        "ill-conditioned response solve: residual {residual:e}, condition estimate {condition:e}"
    )]
    IllConditioned { residual: f64, condition: f64 },

    #[error("unphysical density matrix: {0}")]
    Unphysical(String),

    #[error("integration unstable: trace drift {drift:e} at t = {time}")]
    Unstable { drift: f64, time: f64 },

    #[error("anisotropy model violated: cross-polarization ratio {ratio:e}")]
    AnisotropyViolated { ratio: f64 },

    #[error("propagation singular: effective permittivity {denominator:e}")]
    PropagationSingular { denominator: f64 },

    #[error("no transparency angle: rf field too weak (sin²ψ = {rhs})")]
    NoTransparencyAngle { rhs: f64 },

    #[error("no non-Raman resonance in bracket [{lo}, {hi}]")]
    NoRootInBracket { lo: f64, hi: f64 },

    #[error("at Δ = {delta}: {source}")]
    AtDetuning {
        delta: f64,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}

pub(crate) fn ensure_finite(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(name, format!("must be finite, got {value}")))
    }
}
