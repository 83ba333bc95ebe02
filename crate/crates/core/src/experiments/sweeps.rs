//! Group-velocity sweeps over the pump Rabi frequency and the two-photon
//! detuning.

use serde::{Deserialize, Serialize};

use super::LinearFit;
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::medium::MediumParams;

/// Per-point results shared by both sweeps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult<D> {
    /// Independent variable (rad/s).
    pub variable: Vec<f64>,
    /// Signed exact group velocity, m/s.
    pub group_velocity: Vec<f64>,
    /// `L/c − group delay`, s.
    pub advance: Vec<f64>,
    /// Whether each point entered the diagnostics fit.
    pub in_fit: Vec<bool>,
    pub diagnostics: D,
}

/// Pump Rabi-frequency sweep at fixed Δc and δ₂ph.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RabiSweep {
    pub omega_c_min: f64,
    pub omega_c_max: f64,
    pub points: usize,
    pub delta_c: f64,
    pub delta_2ph: f64,
}

impl RabiSweep {
    /// Ωc from 2π×5 to 2π×15 MHz at Δc = 2π×2.2 GHz, δ₂ph = 2π×400 kHz.
    pub fn fig3a() -> Self {
        RabiSweep {
            omega_c_min: crate::hz(5e6),
            omega_c_max: crate::hz(15e6),
            points: 41,
            delta_c: crate::hz(2.2e9),
            delta_2ph: crate::hz(400e3),
        }
    }

    pub fn omega_c_values(&self) -> Vec<f64> {
        linspace(self.omega_c_min, self.omega_c_max, self.points)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RabiDiagnostics {
    /// Log–log fit of |Vg| against Ωc over points with `|Stark shift| < |δ₂ph|/4`.
    pub power_law: LinearFit,
    pub all_negative_in_fit: bool,
}

pub fn sweep_rabi(base: &MediumParams, sweep: &RabiSweep, exec: Execution) -> Result<SweepResult<RabiDiagnostics>> {
    if sweep.points < 2 || !(sweep.omega_c_min > 0.0) || !(sweep.omega_c_min < sweep.omega_c_max) {
        return Err(Error::invalid("Rabi sweep needs at least 2 points over a positive increasing range"));
    }
    let fixed = base.with_delta_c(sweep.delta_c).with_delta_2ph(sweep.delta_2ph);
    fixed.validate()?;
    let variable = sweep.omega_c_values();
    let rows = exec.try_map(&variable, |&oc| -> Result<(f64, f64, bool)> {
        let p = fixed.with_omega_c(oc);
        let valid = p.stark_shift()?.abs() < p.delta_2ph.abs() / 4.0;
        Ok((p.group_velocity_exact()?, p.advance_time(), valid))
    })?;
    let group_velocity: Vec<f64> = rows.iter().map(|r| r.0).collect();
    let advance = rows.iter().map(|r| r.1).collect();
    let in_fit: Vec<bool> = rows.iter().map(|r| r.2).collect();

    let (lx, ly): (Vec<f64>, Vec<f64>) = variable
        .iter()
        .zip(&group_velocity)
        .zip(&in_fit)
        .filter(|(_, &ok)| ok)
        .map(|((&oc, &v), _)| (oc.ln(), v.abs().ln()))
        .unzip();
    let power_law = LinearFit::fit(&lx, &ly)
        .ok_or_else(|| Error::Regime("fewer than two Rabi frequencies with a negligible Stark shift".into()))?;
    let all_negative_in_fit = group_velocity.iter().zip(&in_fit).filter(|(_, &ok)| ok).all(|(&v, _)| v < 0.0);
    Ok(SweepResult {
        variable,
        group_velocity,
        advance,
        in_fit,
        diagnostics: RabiDiagnostics { power_law, all_negative_in_fit },
    })
}

/// Two-photon-detuning sweep symmetric about the shifted Raman resonance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetuningSweep {
    /// Half-span in units of γ₃₁.
    pub span_gamma: f64,
    /// Number of points; forced odd so the resonance is sampled.
    pub points: usize,
    /// Fit region: `|δ_eff| > fit_min_gamma·γ₃₁`.
    pub fit_min_gamma: f64,
}

impl Default for DetuningSweep {
    fn default() -> Self {
        DetuningSweep { span_gamma: 10.0, points: 201, fit_min_gamma: 5.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetuningDiagnostics {
    /// Shifted resonance δ₀ (two-photon detuning of the pole center).
    pub resonance: f64,
    /// `δ₂ph − δ₀` of each point, exactly as used by the fits.
    pub offsets: Vec<f64>,
    /// Linear fit of |Vg| against offset² over the fit region.
    pub quadratic: LinearFit,
    /// Linear fit of the advance against offset⁻² over the fit region.
    pub inverse_square: LinearFit,
    /// Largest `|adv(δ₀+x) − adv(δ₀−x)| / max(|adv(δ₀+x)|, |adv(δ₀−x)|)`.
    pub symmetry_error: f64,
    /// Detunings where the transit time equals L/c.
    pub crossovers: Vec<f64>,
}

pub fn sweep_detuning(
    base: &MediumParams,
    sweep: &DetuningSweep,
    exec: Execution,
) -> Result<SweepResult<DetuningDiagnostics>> {
    base.validate()?;
    if !(sweep.span_gamma > 0.0) || sweep.points < 3 {
        return Err(Error::invalid("detuning sweep needs a positive span and at least 3 points"));
    }
    let half = (sweep.points - 1) / 2;
    let resonance = base.resonance_detuning();
    let step = sweep.span_gamma * base.gamma31 / half as f64;
    let offsets: Vec<f64> = (0..=2 * half).map(|k| (k as f64 - half as f64) * step).collect();
    let variable: Vec<f64> = offsets.iter().map(|x| resonance + x).collect();

    let rows = exec.try_map(&variable, |&d| -> Result<(f64, f64)> {
        let p = base.with_delta_2ph(d);
        Ok((p.group_velocity_exact()?, p.advance_time()))
    })?;
    let group_velocity: Vec<f64> = rows.iter().map(|r| r.0).collect();
    let advance: Vec<f64> = rows.iter().map(|r| r.1).collect();
    let cut = sweep.fit_min_gamma * base.gamma31;
    let in_fit: Vec<bool> = offsets.iter().map(|x| x.abs() > cut).collect();

    let fit_region = || offsets.iter().zip(&in_fit).enumerate().filter(|(_, (_, &ok))| ok).map(|(i, (&x, _))| (i, x));
    let (qx, qy): (Vec<f64>, Vec<f64>) = fit_region().map(|(i, x)| (x * x, group_velocity[i].abs())).unzip();
    let (ix, iy): (Vec<f64>, Vec<f64>) = fit_region().map(|(i, x)| (1.0 / (x * x), advance[i])).unzip();
    let quadratic =
        LinearFit::fit(&qx, &qy).ok_or_else(|| Error::Regime("no detunings beyond the fit threshold".into()))?;
    let inverse_square =
        LinearFit::fit(&ix, &iy).ok_or_else(|| Error::Regime("no detunings beyond the fit threshold".into()))?;

    let n = advance.len();
    let symmetry_error = (0..half)
        .map(|k| {
            let (a, b) = (advance[k], advance[n - 1 - k]);
            let scale = a.abs().max(b.abs());
            if scale == 0.0 {
                0.0
            } else {
                (a - b).abs() / scale
            }
        })
        .fold(0.0, f64::max);

    let span = sweep.span_gamma * base.gamma31;
    let crossovers = base.find_crossover_detunings((resonance - span, resonance + span))?;
    Ok(SweepResult {
        variable,
        group_velocity,
        advance,
        in_fit,
        diagnostics: DetuningDiagnostics { resonance, offsets, quadratic, inverse_square, symmetry_error, crossovers },
    })
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    let last = (n - 1) as f64;
    (0..n).map(|i| if i + 1 == n { b } else { a + (b - a) * (i as f64 / last) }).collect()
}
