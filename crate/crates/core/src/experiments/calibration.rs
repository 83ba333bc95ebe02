//! Calibration of the two constants the measurements leave free, κ₁₂ and
//! γ₃₁, against a measured Raman gain and advance time.

use nalgebra::{Matrix2, Vector2};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::medium::MediumParams;

/// Where along the spectrum the gain target is measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GainReference {
    /// Intensity gain `2 Re K(0)` experienced by the probe carrier.
    Carrier,
    /// Maximum of `2 Re K(ω)` over ω (top of the Raman gain line).
    Peak,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CalibrationTarget {
    /// Intensity gain coefficient, m⁻¹.
    pub gain_target: f64,
    /// Lead over a vacuum reference at the probe detuning, s.
    pub advance_target: f64,
    pub gain_reference: GainReference,
    /// Fixed drive and geometry; `kappa12` and `gamma31` are ignored.
    pub base: MediumParams,
}

impl CalibrationTarget {
    /// G = 0.05 cm⁻¹ and 220 ns advance at the 15.4 μs run's drive.
    pub fn fig2() -> Self {
        CalibrationTarget {
            gain_target: 5.0,
            advance_target: 220e-9,
            gain_reference: GainReference::Carrier,
            base: MediumParams::fig2(1.0, 1.0),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gain_target > 0.0) || !self.gain_target.is_finite() {
            return Err(Error::invalid(format!("gain target must be positive, got {}", self.gain_target)));
        }
        if !(self.advance_target > 0.0) || !self.advance_target.is_finite() {
            return Err(Error::invalid(format!("advance target must be positive, got {}", self.advance_target)));
        }
        self.base.with_kappa12(1.0).with_gamma31(1.0).validate()
    }

    /// Gain and advance of the model with the given constants.
    pub fn observables(&self, kappa12: f64, gamma31: f64) -> (f64, f64) {
        let p = self.base.with_kappa12(kappa12).with_gamma31(gamma31);
        let gain = match self.gain_reference {
            GainReference::Carrier => p.intensity_gain(0.0),
            GainReference::Peak => p.peak_intensity_gain(),
        };
        (gain, p.advance_time())
    }

    /// Seed from the far-detuned closure
    /// `2κ₁₂Ωc²/(γ₃₁Δc²) = G` and `Lκ₁₂Ωc²/(Δc²δ_eff²) = δt`.
    pub fn asymptotic_seed(&self) -> Result<(f64, f64)> {
        let b = &self.base;
        let delta_eff = b.delta_2ph - b.stark_shift()?;
        let g0 = self.advance_target * delta_eff * delta_eff / b.length;
        if b.omega_c == 0.0 || g0 == 0.0 {
            return Err(Error::invalid("calibration needs a pump and a detuning off the shifted resonance"));
        }
        Ok((g0 * b.delta_c * b.delta_c / (b.omega_c * b.omega_c), 2.0 * g0 / self.gain_target))
    }

    /// Largest advance compatible with the gain target when it is referenced
    /// to the gain peak: with `K = iA/(x + iΓ)` and `2A/Γ = G`, the advance
    /// `L·A(x² − Γ²)/(x² + Γ²)²` never exceeds `L·G/(8|x|)`.
    pub fn peak_reference_advance_bound(&self) -> f64 {
        let x = self.base.with_gamma31(1.0).effective_detuning().abs();
        self.base.length * self.gain_target / (8.0 * x)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    pub kappa12: f64,
    pub gamma31: f64,
    pub iterations: usize,
    /// Relative residuals at exit.
    pub gain_residual: f64,
    pub advance_residual: f64,
    pub params: MediumParams,
}

const MAX_ITERATIONS: usize = 100;
const EXIT_TOLERANCE: f64 = 1e-6;
const FD_STEP: f64 = 1e-6;

/// Solve `{gain(κ₁₂, γ₃₁) = G, advance(κ₁₂, γ₃₁) = δt}` with the full kernel.
///
/// Damped Newton in `(ln κ₁₂, ln γ₃₁)` with a central finite-difference
/// Jacobian and step halving on the residual norm. Iterates to
/// floating-point convergence; fails if the relative residuals are not
/// below 10⁻⁶ after 100 iterations.
pub fn calibrate(target: &CalibrationTarget, seed: (f64, f64)) -> Result<Calibration> {
    target.validate()?;
    let (k0, g0) = seed;
    if !(k0 > 0.0 && g0 > 0.0) || !k0.is_finite() || !g0.is_finite() {
        return Err(Error::invalid(format!("calibration seed must be positive, got ({k0}, {g0})")));
    }
    let residual = |z: &Vector2<f64>| -> Vector2<f64> {
        let (gain, adv) = target.observables(z[0].exp(), z[1].exp());
        Vector2::new(gain / target.gain_target - 1.0, adv / target.advance_target - 1.0)
    };

    let mut z = Vector2::new(k0.ln(), g0.ln());
    let mut r = residual(&z);
    let mut iterations = 0;
    while iterations < MAX_ITERATIONS {
        if r.amax() < 1e-14 {
            break;
        }
        iterations += 1;
        let mut jac = Matrix2::zeros();
        for col in 0..2 {
            let mut zp = z;
            let mut zm = z;
            zp[col] += FD_STEP;
            zm[col] -= FD_STEP;
            jac.set_column(col, &((residual(&zp) - residual(&zm)) / (2.0 * FD_STEP)));
        }
        let Some(mut step) = jac.lu().solve(&(-r)) else { break };
        // Keep each update within a factor e² of the current constants.
        let norm = step.amax();
        if norm > 2.0 {
            step *= 2.0 / norm;
        }
        let mut lambda = 1.0;
        let mut accepted = false;
        for _ in 0..40 {
            let trial = z + step * lambda;
            let rt = residual(&trial);
            if rt.iter().all(|v| v.is_finite()) && rt.norm() < r.norm() {
                z = trial;
                r = rt;
                accepted = true;
                break;
            }
            lambda *= 0.5;
        }
        if !accepted {
            break;
        }
    }

    if !(r.amax() < EXIT_TOLERANCE) {
        let note = match target.gain_reference {
            GainReference::Peak => Some(format!(
                "a peak gain of {:.4} m^-1 allows at most {:.4e} s of advance at this detuning",
                target.gain_target,
                target.peak_reference_advance_bound()
            )),
            GainReference::Carrier => None,
        };
        return Err(Error::CalibrationFailed {
            iterations,
            gain_residual: r[0],
            advance_residual: r[1],
            note,
        });
    }
    let (kappa12, gamma31) = (z[0].exp(), z[1].exp());
    Ok(Calibration {
        kappa12,
        gamma31,
        iterations,
        gain_residual: r[0],
        advance_residual: r[1],
        params: target.base.with_kappa12(kappa12).with_gamma31(gamma31),
    })
}

/// Calibrate the default targets from the asymptotic seed.
pub fn calibrate_fig2() -> Result<Calibration> {
    let target = CalibrationTarget::fig2();
    calibrate(&target, target.asymptotic_seed()?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hz;
    use approx::assert_relative_eq;

    #[test]
    fn seed_orders_of_magnitude() {
        let (k, g) = CalibrationTarget::fig2().asymptotic_seed().unwrap();
        assert!(k > 1e10 && k < 1e12, "{k}");
        assert!(g > hz(100e3) && g < hz(400e3), "{g}");
    }

    #[test]
    fn fig2_calibration_reproduces_targets() {
        let target = CalibrationTarget::fig2();
        let cal = calibrate_fig2().unwrap();
        let (gain, adv) = target.observables(cal.kappa12, cal.gamma31);
        assert_relative_eq!(gain, 5.0, max_relative = 1e-6);
        assert_relative_eq!(adv, 220e-9, max_relative = 1e-6);
        assert_relative_eq!(cal.params.advance_time(), 220e-9, max_relative = 1e-6);
    }

    #[test]
    fn calibration_is_idempotent() {
        let cal = calibrate_fig2().unwrap();
        let (gain, adv) = CalibrationTarget::fig2().observables(cal.kappa12, cal.gamma31);
        let again = CalibrationTarget { gain_target: gain, advance_target: adv, ..CalibrationTarget::fig2() };
        let seed = again.asymptotic_seed().unwrap();
        let cal2 = calibrate(&again, seed).unwrap();
        assert_relative_eq!(cal2.kappa12, cal.kappa12, max_relative = 1e-9);
        assert_relative_eq!(cal2.gamma31, cal.gamma31, max_relative = 1e-9);
    }

    #[test]
    fn both_constants_respond_to_gain_target() {
        let base = calibrate_fig2().unwrap();
        let doubled = CalibrationTarget { gain_target: 10.0, ..CalibrationTarget::fig2() };
        let cal = calibrate(&doubled, (base.kappa12, base.gamma31)).unwrap();
        assert!((cal.kappa12 / base.kappa12 - 1.0).abs() > 1e-3);
        assert!((cal.gamma31 / base.gamma31 - 1.0).abs() > 1e-3);
        let (gain, adv) = doubled.observables(cal.kappa12, cal.gamma31);
        assert_relative_eq!(gain, 10.0, max_relative = 1e-6);
        assert_relative_eq!(adv, 220e-9, max_relative = 1e-6);
    }

    #[test]
    fn peak_reference_is_infeasible_at_fig2_detuning() {
        let target = CalibrationTarget { gain_reference: GainReference::Peak, ..CalibrationTarget::fig2() };
        assert!(target.peak_reference_advance_bound() < 60e-9);
        let seed = target.asymptotic_seed().unwrap();
        match calibrate(&target, seed) {
            Err(Error::CalibrationFailed { note: Some(_), .. }) => {}
            other => panic!("expected calibration failure, got {other:?}"),
        }
    }

    #[test]
    fn peak_reference_when_feasible() {
        let target = CalibrationTarget {
            gain_reference: GainReference::Peak,
            advance_target: 30e-9,
            ..CalibrationTarget::fig2()
        };
        let cal = calibrate(&target, target.asymptotic_seed().unwrap()).unwrap();
        assert_relative_eq!(cal.params.peak_intensity_gain(), 5.0, max_relative = 1e-6);
        assert_relative_eq!(cal.params.advance_time(), 30e-9, max_relative = 1e-6);
    }

    #[test]
    fn bad_inputs() {
        let t = CalibrationTarget::fig2();
        assert!(calibrate(&t, (0.0, 1.0)).is_err());
        assert!(calibrate(&CalibrationTarget { advance_target: -1.0, ..t }, (1.0, 1.0)).is_err());
    }
}
