use thiserror::Error;

use crate::pulse::TimeGrid;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("outside asymptotic regime: |delta_eff| = {delta_eff:.6e} rad/s must exceed {bound:.6e} rad/s; use the exact group velocity")]
    OutsideAsymptoticRegime { delta_eff: f64, bound: f64 },

    #[error("group delay {delay:.3e} s is too close to zero; group velocity diverges")]
    SingularVelocity { delay: f64 },

    #[error("invalid integration step: {0}")]
    InvalidStep(String),

    #[error("weak-probe assumption violated at t = {time:.6e} s (|rho| = {magnitude:.4})")]
    WeakProbeViolated { time: f64, magnitude: f64 },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("pulse does not fit in time window: {0}")]
    WindowTooSmall(String),

    #[error("grid does not resolve the medium response: {reason}; suggested grid: n = {}, dt = {:.6e} s", suggested.n, suggested.dt)]
    GridResolution { reason: String, suggested: TimeGrid },

    #[error("envelope cannot be fitted by a Gaussian: {0}")]
    Unfittable(String),

    #[error("calibration failed after {iterations} iterations (residuals: gain {gain_residual:.3e}, advance {advance_residual:.3e}){}", note.as_deref().map(|n| format!(": {n}")).unwrap_or_default())]
    CalibrationFailed {
        iterations: usize,
        gain_residual: f64,
        advance_residual: f64,
        note: Option<String>,
    },

    #[error("no crossover found: {0}")]
    NotFound(String),

    #[error("regime error: {0}")]
    Regime(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
