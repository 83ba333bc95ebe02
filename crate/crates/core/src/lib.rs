//! Fast-light (negative group velocity) propagation of a weak Gaussian probe
//! pulse through a single-channel active Raman gain medium.
//!
//! The crate is organised bottom-up:
//!
//! * [`medium`]: frequency-domain linear response of the three-level medium
//!   (Raman response, transfer kernel, group delay and velocity, crossovers).
//! * [`bloch`]: independent time-domain check of the kernel from the
//!   density-matrix equations of motion.
//! * [`pulse`] and [`fit`]: Gaussian pulse synthesis, FFT propagation and
//!   Gaussian-fit metrology.
//! * [`experiments`]: calibration of the unknown medium constants and the
//!   advance-time, Rabi-frequency, detuning and narrowing studies.
//!
//! All angular frequencies are in rad/s, times in s, lengths in m.

// `!(x > 0.0)` is used on purpose to reject NaN along with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bloch;
pub mod error;
pub mod exec;
pub mod experiments;
pub mod fit;
pub mod medium;
pub mod pulse;

pub use error::{Error, Result};
pub use exec::Execution;

pub use num_complex::Complex64 as C64;

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Convert an ordinary frequency in Hz to angular frequency in rad/s.
#[inline]
pub fn hz(nu: f64) -> f64 {
    std::f64::consts::TAU * nu
}
