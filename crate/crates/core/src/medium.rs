//! Frequency-domain linear response of the three-level active Raman gain
//! medium.
//!
//! The probe envelope obeys `dΛ/dz = (iω/c + K(ω)) Λ` in Fourier space, with
//!
//! ```text
//! K(ω) = iκ₁₂|Ωc|² W(ω) / [(Δc − iγ₂₃)(Δc + iγ₂₁)]
//! W(ω) = 1 / [ω + δ₂ph + iγ₃₁ − |Ωc|²/(Δc + iγ₂₁)]
//! ```
//!
//! where `δ₂ph = Δp − Δc`. `K` is a single complex pole; its real part is the
//! amplitude gain per unit length and `d(Im K)/dω` the extra group delay per
//! unit length. The Fourier convention is `Λ(ω) = ∫ Ω(t) e^{+iωt} dt`, so a
//! positive phase slope is a delay.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::{C64, SPEED_OF_LIGHT};

/// Physical constants of the medium and of the pump drive.
///
/// All frequencies and rates are angular (rad/s). `delta_2ph` is signed,
/// `Δp − Δc`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MediumParams {
    /// Propagation coupling constant, m⁻¹·s⁻¹.
    pub kappa12: f64,
    /// Pump half Rabi frequency Ωc.
    pub omega_c: f64,
    /// Pump one-photon detuning Δc.
    pub delta_c: f64,
    /// Two-photon detuning Δp − Δc.
    pub delta_2ph: f64,
    pub gamma21: f64,
    pub gamma23: f64,
    /// Ground-state (Raman) decoherence rate.
    pub gamma31: f64,
    /// Medium length, m.
    pub length: f64,
}

impl MediumParams {
    /// Drive of the 15.4 μs advance-time run: Ωc = 2π×25 MHz, Δc = 2π×3 GHz,
    /// δ₂ph = 2π×400 kHz, γ₂₁ = γ₂₃ = 2π×3 MHz, L = 10 cm. `kappa12` and
    /// `gamma31` are not known a priori; see [`crate::experiments::calibrate`].
    pub fn fig2(kappa12: f64, gamma31: f64) -> Self {
        MediumParams {
            kappa12,
            omega_c: crate::hz(25e6),
            delta_c: crate::hz(3e9),
            delta_2ph: crate::hz(400e3),
            gamma21: crate::hz(3e6),
            gamma23: crate::hz(3e6),
            gamma31,
            length: 0.1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let all = [
            ("kappa12", self.kappa12),
            ("omega_c", self.omega_c),
            ("delta_c", self.delta_c),
            ("delta_2ph", self.delta_2ph),
            ("gamma21", self.gamma21),
            ("gamma23", self.gamma23),
            ("gamma31", self.gamma31),
            ("length", self.length),
        ];
        if let Some((name, _)) = all.iter().find(|(_, v)| !v.is_finite()) {
            return Err(Error::invalid(format!("{name} must be finite")));
        }
        for (name, v) in [("gamma21", self.gamma21), ("gamma23", self.gamma23), ("gamma31", self.gamma31)] {
            if v <= 0.0 {
                return Err(Error::invalid(format!("{name} must be positive, got {v}")));
            }
        }
        if self.length <= 0.0 {
            return Err(Error::invalid(format!("length must be positive, got {}", self.length)));
        }
        if self.kappa12 < 0.0 {
            return Err(Error::invalid(format!("kappa12 must be non-negative, got {}", self.kappa12)));
        }
        Ok(())
    }

    /// Far-detuned regime required by the asymptotic group-velocity formula.
    pub fn is_far_detuned(&self) -> bool {
        let scale = self.gamma21.max(self.gamma23).max(self.omega_c.abs());
        self.delta_c.abs() > 100.0 * scale
    }

    pub fn with_kappa12(mut self, kappa12: f64) -> Self {
        self.kappa12 = kappa12;
        self
    }

    pub fn with_gamma31(mut self, gamma31: f64) -> Self {
        self.gamma31 = gamma31;
        self
    }

    pub fn with_omega_c(mut self, omega_c: f64) -> Self {
        self.omega_c = omega_c;
        self
    }

    pub fn with_delta_c(mut self, delta_c: f64) -> Self {
        self.delta_c = delta_c;
        self
    }

    pub fn with_delta_2ph(mut self, delta_2ph: f64) -> Self {
        self.delta_2ph = delta_2ph;
        self
    }

    pub fn with_length(mut self, length: f64) -> Self {
        self.length = length;
        self
    }

    /// Pump-induced term `|Ωc|²/(Δc + iγ₂₁)` of the Raman denominator.
    pub fn stark_term(&self) -> C64 {
        C64::from(self.omega_c * self.omega_c) / C64::new(self.delta_c, self.gamma21)
    }

    /// `W(ω)`, evaluated exactly.
    pub fn raman_response(&self, omega: f64) -> C64 {
        let denom = C64::new(omega + self.delta_2ph, self.gamma31) - self.stark_term();
        denom.inv()
    }

    /// Complex prefactor `iκ₁₂|Ωc|² / [(Δc − iγ₂₃)(Δc + iγ₂₁)]` so that
    /// `K = prefactor · W`. It carries the whole |Ωc|² dependence of `K`
    /// except for the Stark term inside `W`.
    pub fn kernel_prefactor(&self) -> C64 {
        let num = C64::new(0.0, self.kappa12 * self.omega_c * self.omega_c);
        num / (C64::new(self.delta_c, -self.gamma23) * C64::new(self.delta_c, self.gamma21))
    }

    /// `K(ω)` in m⁻¹, without the vacuum term `iω/c`.
    pub fn transfer_kernel(&self, omega: f64) -> C64 {
        self.kernel_prefactor() * self.raman_response(omega)
    }

    /// `dK/dω = −prefactor · W²`, s/m.
    pub fn kernel_derivative(&self, omega: f64) -> C64 {
        let w = self.raman_response(omega);
        -self.kernel_prefactor() * w * w
    }

    /// Intensity gain `2 Re K(ω)`, m⁻¹.
    pub fn intensity_gain(&self, omega: f64) -> f64 {
        2.0 * self.transfer_kernel(omega).re
    }

    /// Medium contribution to the group delay per unit length, `d(Im K)/dω`.
    pub fn group_delay_density(&self, omega: f64) -> f64 {
        self.kernel_derivative(omega).im
    }

    /// Real part of the pole of `W` in the ω plane: `Re(stark_term) − δ₂ph`.
    /// Gain and group delay are symmetric about this point.
    pub fn pole_center(&self) -> f64 {
        self.stark_term().re - self.delta_2ph
    }

    /// Two-photon detuning of the shifted Raman resonance (the δ₂ph that puts
    /// the pole center on the probe carrier).
    pub fn resonance_detuning(&self) -> f64 {
        self.stark_term().re
    }

    /// Detuning of the probe carrier from the shifted resonance, `δ₂ph − Re(stark_term)`.
    pub fn effective_detuning(&self) -> f64 {
        -self.pole_center()
    }

    /// Half width of the Raman line: `γ₃₁ + |Ωc|²γ₂₁/(Δc² + γ₂₁²)`.
    pub fn raman_linewidth(&self) -> f64 {
        self.gamma31 - self.stark_term().im
    }

    /// ac Stark shift `|Ωc|²/Δc`, signed by Δc.
    pub fn stark_shift(&self) -> Result<f64> {
        if self.delta_c == 0.0 {
            return Err(Error::invalid("delta_c must be nonzero for the Stark shift"));
        }
        Ok(self.omega_c * self.omega_c / self.delta_c)
    }

    /// Transit time through the medium at the probe carrier,
    /// `L/c + L·d(Im K)/dω|₀`.
    pub fn group_delay_exact(&self) -> f64 {
        self.length / SPEED_OF_LIGHT + self.length * self.group_delay_density(0.0)
    }

    /// Lead of the carrier group over a vacuum reference,
    /// `L/c − group_delay_exact`, computed without the cancellation.
    pub fn advance_time(&self) -> f64 {
        -self.length * self.group_delay_density(0.0)
    }

    /// Central finite-difference estimate of the group delay with a step of
    /// `rel_step · γ₃₁`. Used to cross-check the closed-form derivative.
    pub fn group_delay_finite_difference(&self, rel_step: f64) -> f64 {
        let h = rel_step * self.gamma31;
        let slope = (self.transfer_kernel(h).im - self.transfer_kernel(-h).im) / (2.0 * h);
        self.length / SPEED_OF_LIGHT + self.length * slope
    }

    /// Signed group velocity `L / group_delay_exact`.
    pub fn group_velocity_exact(&self) -> Result<f64> {
        let delay = self.group_delay_exact();
        if delay.abs() < 1e-15 {
            return Err(Error::SingularVelocity { delay });
        }
        Ok(self.length / delay)
    }

    /// Far-detuned asymptotic group velocity
    /// `−Δc²(δ₂ph − |Ωc|²/Δc)² / (κ₁₂|Ωc|²)`.
    pub fn group_velocity_eq3(&self) -> Result<f64> {
        let delta_eff = self.delta_2ph - self.stark_shift()?;
        let bound = 3.0 * self.gamma31;
        if delta_eff.abs() <= bound {
            return Err(Error::OutsideAsymptoticRegime { delta_eff, bound });
        }
        let coupling = self.kappa12 * self.omega_c * self.omega_c;
        if coupling == 0.0 {
            return Err(Error::invalid("asymptotic group velocity needs kappa12 > 0 and omega_c != 0"));
        }
        Ok(-(self.delta_c * delta_eff).powi(2) / coupling)
    }

    /// Fourier detuning at which the intensity gain peaks.
    ///
    /// With `K = P/(x + iΓ)`, `x = ω − pole_center`, the gain
    /// `Re K = (Re P·x + Im P·Γ)/(x² + Γ²)` peaks at
    /// `x* = (|P| − Im P)Γ/Re P` (`x* = 0` when P is imaginary).
    pub fn gain_peak_omega(&self) -> f64 {
        let p = self.kernel_prefactor();
        let gamma = self.raman_linewidth();
        let x = if p.re == 0.0 {
            0.0
        } else {
            (p.norm() - p.im) * gamma / p.re
        };
        self.pole_center() + x
    }

    /// Peak intensity gain `max_ω 2 Re K = (|P| + Im P)/Γ`.
    pub fn peak_intensity_gain(&self) -> f64 {
        let p = self.kernel_prefactor();
        (p.norm() + p.im) / self.raman_linewidth()
    }

    /// All two-photon detunings in `window` where the transit time equals the
    /// vacuum time `L/c`, i.e. where `d(Im K)/dω|₀` changes sign.
    ///
    /// Brackets are located by a sign scan at γ₃₁/20 resolution and refined by
    /// bisection down to floating-point resolution.
    pub fn find_crossover_detunings(&self, window: (f64, f64)) -> Result<Vec<f64>> {
        self.validate()?;
        let (lo, hi) = window;
        if !(lo < hi) {
            return Err(Error::invalid(format!("crossover window [{lo}, {hi}] is empty")));
        }
        let center = self.resonance_detuning();
        if !(lo < center && center < hi) {
            return Err(Error::invalid(format!(
                "crossover window [{lo:.6e}, {hi:.6e}] does not contain the shifted resonance {center:.6e}"
            )));
        }
        let f = |d: f64| self.with_delta_2ph(d).group_delay_density(0.0);
        let step = self.gamma31 / 20.0;
        let n = ((hi - lo) / step).ceil() as usize;
        let mut roots = Vec::new();
        let mut a = lo;
        let mut fa = f(a);
        for i in 1..=n {
            let b = if i == n { hi } else { lo + i as f64 * step };
            let fb = f(b);
            if fa == 0.0 {
                roots.push(a);
            } else if fa.signum() != fb.signum() && fb != 0.0 {
                roots.push(bisect(&f, a, b, fa));
            }
            a = b;
            fa = fb;
        }
        if fa == 0.0 {
            roots.push(a);
        }
        if roots.is_empty() {
            return Err(Error::NotFound(format!(
                "group delay equals L/c nowhere in [{lo:.6e}, {hi:.6e}] rad/s"
            )));
        }
        Ok(roots)
    }

    /// Tabulate the kernel on a uniform grid of `n_samples` points.
    pub fn dispersion_profile(&self, omega_min: f64, omega_max: f64, n_samples: usize) -> Result<DispersionProfile> {
        if !(omega_min < omega_max) || !omega_min.is_finite() || !omega_max.is_finite() {
            return Err(Error::invalid(format!("invalid frequency range [{omega_min}, {omega_max}]")));
        }
        if n_samples < 2 {
            return Err(Error::invalid(format!("need at least 2 samples, got {n_samples}")));
        }
        let span = omega_max - omega_min;
        let last = (n_samples - 1) as f64;
        let points = (0..n_samples)
            .map(|i| {
                let omega = if i == n_samples - 1 { omega_max } else { omega_min + span * (i as f64 / last) };
                DispersionPoint::new(self, omega)
            })
            .collect();
        Ok(DispersionProfile { params: *self, points })
    }
}

fn bisect(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64, mut fa: f64) -> f64 {
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let fm = f(m);
        if fm == 0.0 {
            return m;
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// Microscopic quantities entering the coupling constant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MicroscopicInputs {
    /// Atom number density, m⁻³.
    pub n0: f64,
    /// Probe carrier angular frequency, rad/s.
    pub omega_p: f64,
    /// Dipole matrix element magnitude |D₂₁|.
    pub d21: f64,
}

/// `κ₁₂ = 2π N₀ ωₚ |D₂₁|² / c`, evaluated literally.
///
/// The formula comes without a unit system (no ħ, no ε₀), so the number it
/// returns for SI inputs is not an SI coupling constant. Prefer a calibrated
/// `kappa12` (see [`crate::experiments::calibrate`]).
pub fn kappa_from_microscopic(m: &MicroscopicInputs) -> Result<f64> {
    if !(m.n0 >= 0.0) || !m.n0.is_finite() {
        return Err(Error::invalid(format!("n0 must be non-negative, got {}", m.n0)));
    }
    if !(m.omega_p > 0.0) || !m.omega_p.is_finite() {
        return Err(Error::invalid(format!("omega_p must be positive, got {}", m.omega_p)));
    }
    if !(m.d21 > 0.0) || !m.d21.is_finite() {
        return Err(Error::invalid(format!("d21 must be positive, got {}", m.d21)));
    }
    Ok(std::f64::consts::TAU * m.n0 * m.omega_p * m.d21 * m.d21 / SPEED_OF_LIGHT)
}

/// One row of a [`DispersionProfile`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DispersionPoint {
    pub omega: f64,
    pub kernel: C64,
    /// `2 Re K`, m⁻¹.
    pub intensity_gain: f64,
    /// `d(Im K)/dω`, s/m.
    pub group_delay_density: f64,
}

impl DispersionPoint {
    pub fn new(p: &MediumParams, omega: f64) -> Self {
        let kernel = p.transfer_kernel(omega);
        DispersionPoint {
            omega,
            kernel,
            intensity_gain: 2.0 * kernel.re,
            group_delay_density: p.group_delay_density(omega),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DispersionProfile {
    pub params: MediumParams,
    pub points: Vec<DispersionPoint>,
}

impl DispersionProfile {
    pub fn omegas(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().map(|p| p.omega)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hz;
    use approx::assert_relative_eq;

    fn calibrated_like() -> MediumParams {
        // Close to the calibrated default constants.
        MediumParams::fig2(1.048e11, hz(101.35e3))
    }

    #[test]
    fn pole_center_value_without_pump() {
        let p = calibrated_like().with_omega_c(0.0);
        let w = p.raman_response(-p.delta_2ph);
        assert_relative_eq!(w.re, 0.0, epsilon = 1e-30);
        assert_relative_eq!(w.im, -1.0 / p.gamma31, max_relative = 1e-15);
    }

    #[test]
    fn raman_response_decays_far_away() {
        let p = calibrated_like();
        for omega in [1e10, -1e12, 1e14] {
            let w = p.raman_response(omega);
            assert_relative_eq!(w.norm() * omega.abs(), 1.0, max_relative = 1e-3);
        }
    }

    #[test]
    fn raman_response_at_fig2_carrier() {
        // Independent evaluation with explicit real arithmetic.
        let p = calibrated_like();
        let (oc, dc, g21) = (p.omega_c, p.delta_c, p.gamma21);
        let s_re = oc * oc * dc / (dc * dc + g21 * g21);
        let s_im = -oc * oc * g21 / (dc * dc + g21 * g21);
        let (a, b) = (p.delta_2ph - s_re, p.gamma31 - s_im);
        let (re, im) = (a / (a * a + b * b), -b / (a * a + b * b));
        let w = p.raman_response(0.0);
        assert_relative_eq!(w.re, re, max_relative = 1e-12);
        assert_relative_eq!(w.im, im, max_relative = 1e-12);
    }

    #[test]
    fn kernel_vanishes_without_pump() {
        let p = calibrated_like().with_omega_c(0.0);
        for omega in [-1e6, 0.0, 3e5] {
            assert_eq!(p.transfer_kernel(omega), C64::new(0.0, 0.0));
        }
        assert_eq!(p.group_delay_exact(), p.length / SPEED_OF_LIGHT);
        assert_relative_eq!(p.group_velocity_exact().unwrap(), SPEED_OF_LIGHT, max_relative = 1e-15);
    }

    #[test]
    fn kernel_is_linear_in_kappa() {
        let p = calibrated_like();
        let q = p.with_kappa12(p.kappa12 * 7.5);
        for omega in [-2e6, 0.0, 1.1e6] {
            let (a, b) = (p.transfer_kernel(omega) * 7.5, q.transfer_kernel(omega));
            assert_relative_eq!(a.re, b.re, max_relative = 1e-14);
            assert_relative_eq!(a.im, b.im, max_relative = 1e-14);
        }
    }

    #[test]
    fn peak_gain_matches_far_detuned_limit() {
        let p = calibrated_like();
        let approx = 2.0 * p.kappa12 * p.omega_c.powi(2) / (p.gamma31 * p.delta_c.powi(2));
        let peak = p.peak_intensity_gain();
        // O(γ/Δc) plus the pump broadening Ωc²γ₂₁/Δc² of the line.
        assert_relative_eq!(peak, approx, max_relative = 5e-3);
        assert_relative_eq!(peak, p.intensity_gain(p.gain_peak_omega()), max_relative = 1e-12);
    }

    #[test]
    fn peak_gain_with_unequal_dephasing() {
        let mut p = calibrated_like();
        p.gamma23 = hz(30e6);
        let x0 = p.gain_peak_omega();
        let g0 = p.intensity_gain(x0);
        assert_relative_eq!(g0, p.peak_intensity_gain(), max_relative = 1e-12);
        for dx in [-1e3, -1.0, 1.0, 1e3] {
            assert!(p.intensity_gain(x0 + dx) < g0);
        }
    }

    #[test]
    fn stark_shift_values() {
        let p = calibrated_like();
        assert_relative_eq!(p.stark_shift().unwrap(), hz(25e6 * 25e6 / 3e9), max_relative = 1e-14);
        assert_relative_eq!(p.stark_shift().unwrap() / hz(1.0), 208_333.333, max_relative = 1e-8);
        let q = p.with_delta_c(hz(2.2e9));
        assert_relative_eq!(q.stark_shift().unwrap() / hz(1.0), 284_090.909, max_relative = 1e-8);
        assert_eq!(p.with_omega_c(0.0).stark_shift().unwrap(), 0.0);
        assert!(matches!(p.with_delta_c(0.0).stark_shift(), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn group_delay_at_pole_center_is_subluminal() {
        let p = calibrated_like();
        let q = p.with_delta_2ph(p.resonance_detuning());
        let g0 = p.kappa12 * p.omega_c.powi(2) / p.delta_c.powi(2);
        let expect = q.length / SPEED_OF_LIGHT + q.length * g0 / q.raman_linewidth().powi(2);
        assert!(q.group_delay_exact() > q.length / SPEED_OF_LIGHT);
        assert_relative_eq!(q.group_delay_exact(), expect, max_relative = 1e-5);
        let v = q.group_velocity_exact().unwrap();
        assert!(v > 0.0 && v < SPEED_OF_LIGHT);
    }

    #[test]
    fn closed_form_delay_matches_finite_difference() {
        let p = calibrated_like();
        for d in [hz(400e3), hz(600e3), hz(-300e3), hz(1.5e6)] {
            let q = p.with_delta_2ph(d);
            let exact = q.group_delay_exact();
            let fd = q.group_delay_finite_difference(1e-6);
            assert_relative_eq!(exact, fd, max_relative = 1e-6);
        }
    }

    #[test]
    fn eq3_scaling() {
        let p = calibrated_like().with_delta_2ph(hz(1.2e6));
        let v1 = p.group_velocity_eq3().unwrap();
        assert!(v1 < 0.0);
        let s = p.stark_shift().unwrap();
        let d_eff = p.delta_2ph - s;
        let v2 = p.with_delta_2ph(s + 2.0 * d_eff).group_velocity_eq3().unwrap();
        assert_relative_eq!(v2 / v1, 4.0, max_relative = 1e-12);
    }

    #[test]
    fn eq3_rejects_near_resonance() {
        let p = calibrated_like();
        let q = p.with_delta_2ph(p.stark_shift().unwrap() + p.gamma31);
        assert!(matches!(q.group_velocity_eq3(), Err(Error::OutsideAsymptoticRegime { .. })));
    }

    #[test]
    fn singular_velocity_at_crossover() {
        let p = calibrated_like().with_length(1e-30);
        // L/c ~ 3e-39 s: the delay itself is below the singular threshold.
        assert!(matches!(p.group_velocity_exact(), Err(Error::SingularVelocity { .. })));
    }

    #[test]
    fn crossovers_bracket_the_resonance_symmetrically() {
        let p = calibrated_like();
        let c = p.resonance_detuning();
        let w = 10.0 * p.gamma31;
        let roots = p.find_crossover_detunings((c - w, c + w)).unwrap();
        assert_eq!(roots.len(), 2);
        let gamma = p.raman_linewidth();
        assert_relative_eq!(c - roots[0], gamma, max_relative = 1e-9);
        assert_relative_eq!(roots[1] - c, gamma, max_relative = 1e-9);
        assert!(((roots[0] + roots[1]) / 2.0 - c).abs() < 1e-6 * p.gamma31);
    }

    #[test]
    fn crossover_window_errors() {
        let p = calibrated_like();
        let c = p.resonance_detuning();
        assert!(matches!(
            p.find_crossover_detunings((c + 1.0, c + 2.0)),
            Err(Error::InvalidParameter(_))
        ));
        // Window containing the resonance but no sign change.
        let narrow = 0.1 * p.gamma31;
        assert!(matches!(p.find_crossover_detunings((c - narrow, c + narrow)), Err(Error::NotFound(_))));
    }

    #[test]
    fn crossovers_do_not_depend_on_coupling() {
        let p = calibrated_like();
        let c = p.resonance_detuning();
        let w = (c - 10.0 * p.gamma31, c + 10.0 * p.gamma31);
        let a = p.find_crossover_detunings(w).unwrap();
        let b = p.with_kappa12(10.0 * p.kappa12).find_crossover_detunings(w).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-6 * p.gamma31);
        }
    }

    #[test]
    fn dispersion_profile_shapes() {
        let p = calibrated_like();
        let prof = p.dispersion_profile(-1e6, 1e6, 2).unwrap();
        assert_eq!(prof.omegas().collect::<Vec<_>>(), vec![-1e6, 1e6]);
        let zero = p.with_omega_c(0.0).dispersion_profile(-1e6, 1e6, 11).unwrap();
        assert!(zero.points.iter().all(|pt| pt.kernel == C64::new(0.0, 0.0) && pt.intensity_gain == 0.0));
        assert!(p.dispersion_profile(1.0, 1.0, 5).is_err());
        assert!(p.dispersion_profile(0.0, 1.0, 1).is_err());
    }

    #[test]
    fn dispersion_gain_argmax_near_pole() {
        let p = calibrated_like();
        let n = 20001;
        let (lo, hi) = (-5e6, 5e6);
        let prof = p.dispersion_profile(lo, hi, n).unwrap();
        let step = (hi - lo) / (n - 1) as f64;
        let best = prof
            .points
            .iter()
            .max_by(|a, b| a.intensity_gain.total_cmp(&b.intensity_gain))
            .unwrap();
        assert!((best.omega - p.pole_center()).abs() <= step);
        for pt in &prof.points {
            assert_eq!(pt.intensity_gain, 2.0 * pt.kernel.re);
        }
    }

    #[test]
    fn microscopic_coupling() {
        let m = MicroscopicInputs { n0: 1e18, omega_p: 2.37e15, d21: 2.5e-29 };
        // 50-digit evaluation of 2π·1e18·2.37e15·(2.5e-29)²/299792458.
        assert_relative_eq!(kappa_from_microscopic(&m).unwrap(), 3.104_470_438_765_928_7e-32, max_relative = 1e-14);
        let doubled = MicroscopicInputs { d21: 5e-29, ..m };
        assert_relative_eq!(
            kappa_from_microscopic(&doubled).unwrap(),
            4.0 * kappa_from_microscopic(&m).unwrap(),
            max_relative = 1e-15
        );
        assert_eq!(kappa_from_microscopic(&MicroscopicInputs { n0: 0.0, ..m }).unwrap(), 0.0);
        assert!(kappa_from_microscopic(&MicroscopicInputs { d21: -1.0, ..m }).is_err());
        assert!(kappa_from_microscopic(&MicroscopicInputs { omega_p: 0.0, ..m }).is_err());
    }

    #[test]
    fn validation() {
        assert!(calibrated_like().validate().is_ok());
        assert!(calibrated_like().with_gamma31(0.0).validate().is_err());
        assert!(calibrated_like().with_length(-1.0).validate().is_err());
        assert!(calibrated_like().with_kappa12(-1.0).validate().is_err());
        assert!(calibrated_like().with_kappa12(f64::NAN).validate().is_err());
        assert!(calibrated_like().is_far_detuned());
        assert!(!calibrated_like().with_delta_c(hz(1e9)).is_far_detuned());
    }
}
