//! The advance-time run, the Rabi-frequency and two-photon-detuning sweeps,
//! the pulse-narrowing study, and the calibration they all share.

mod calibration;
mod fig2;
mod narrowing;
mod sweeps;

pub use calibration::{calibrate, calibrate_fig2, Calibration, CalibrationTarget, GainReference};
pub use fig2::{run_fig2, Edge, EdgeSample, Fig2Report, GridOptions};
pub use narrowing::{narrowing_study, NarrowingRow, NarrowingTable};
pub use sweeps::{
    sweep_detuning, sweep_rabi, DetuningDiagnostics, DetuningSweep, RabiDiagnostics, RabiSweep, SweepResult,
};

use serde::{Deserialize, Serialize};

/// Ordinary least-squares line `y = intercept + slope·x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub n_points: usize,
}

impl LinearFit {
    /// Returns `None` for fewer than two points or constant `x`.
    pub fn fit(x: &[f64], y: &[f64]) -> Option<LinearFit> {
        let n = x.len().min(y.len());
        if n < 2 {
            return None;
        }
        let nf = n as f64;
        let mx = x[..n].iter().sum::<f64>() / nf;
        let my = y[..n].iter().sum::<f64>() / nf;
        let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
        for (&a, &b) in x.iter().zip(y) {
            let (dx, dy) = (a - mx, b - my);
            sxx += dx * dx;
            sxy += dx * dy;
            syy += dy * dy;
        }
        if sxx == 0.0 {
            return None;
        }
        let slope = sxy / sxx;
        let ss_res = syy - slope * sxy;
        let r_squared = if syy == 0.0 { 1.0 } else { 1.0 - ss_res.max(0.0) / syy };
        Some(LinearFit { slope, intercept: my - slope * mx, r_squared, n_points: n })
    }
}
