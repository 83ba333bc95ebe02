//! Gaussian probe pulses on a uniform time grid and their propagation through
//! the medium in the Fourier domain.
//!
//! Envelopes live in the frame rotating at the probe carrier. The spectrum is
//! `Λ(ω_k) = Σ_j f_j e^{+iω_k t_j}`, so the transfer factor
//! `exp[(iω/c + K(ω))L]` delays by the group delay.

use std::f64::consts::{LN_2, PI, TAU};

use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::medium::MediumParams;
use crate::{C64, SPEED_OF_LIGHT};

/// Smallest allowed grid.
pub const MIN_GRID_POINTS: usize = 1024;
/// Default grid: 2¹⁶ samples over 12 pulse widths.
pub const DEFAULT_GRID_POINTS: usize = 1 << 16;
pub const DEFAULT_WINDOW_FACTOR: f64 = 12.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    pub t0: f64,
    pub dt: f64,
    pub n: usize,
}

impl TimeGrid {
    pub fn new(t0: f64, dt: f64, n: usize) -> Result<Self> {
        if !n.is_power_of_two() || n < MIN_GRID_POINTS {
            return Err(Error::invalid(format!("grid size must be a power of two >= {MIN_GRID_POINTS}, got {n}")));
        }
        if !(dt > 0.0) || !dt.is_finite() || !t0.is_finite() {
            return Err(Error::invalid(format!("invalid grid t0 = {t0}, dt = {dt}")));
        }
        Ok(TimeGrid { t0, dt, n })
    }

    /// Grid of `n` points spanning `window` and centered on `center`.
    pub fn centered(center: f64, window: f64, n: usize) -> Result<Self> {
        let dt = window / n as f64;
        TimeGrid::new(center - 0.5 * window, dt, n)
    }

    /// Default grid for a pulse: `window_factor × fwhm` wide, centered on it.
    pub fn for_pulse(spec: &PulseSpec, window_factor: f64, n: usize) -> Result<Self> {
        TimeGrid::centered(spec.center_time, window_factor * spec.fwhm, n)
    }

    pub fn window(&self) -> f64 {
        self.n as f64 * self.dt
    }

    pub fn end(&self) -> f64 {
        self.t0 + self.window()
    }

    pub fn time(&self, j: usize) -> f64 {
        self.t0 + j as f64 * self.dt
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(|j| self.time(j))
    }

    /// Angular frequencies of the DFT bins in FFT order.
    pub fn angular_frequencies(&self) -> Vec<f64> {
        let n = self.n as i64;
        let dw = TAU / (self.n as f64 * self.dt);
        (0..n).map(|k| if k < n / 2 { k } else { k - n } as f64 * dw).collect()
    }

    /// Check that the grid resolves the kernel of `p`: spectral half-range
    /// `π/dt ≥ 50·max(γ₃₁, |δ_eff|)` and spectral step `2π/(n·dt) ≤ γ₃₁/10`.
    pub fn check_resolution(&self, p: &MediumParams) -> Result<()> {
        let needed_range = 50.0 * p.gamma31.max(p.effective_detuning().abs());
        let needed_step = p.gamma31 / 10.0;
        let range = PI / self.dt;
        let step = TAU / self.window();
        let mut reasons = Vec::new();
        if range < needed_range {
            reasons.push(format!("spectral half-range {range:.4e} rad/s < {needed_range:.4e} rad/s"));
        }
        if step > needed_step {
            reasons.push(format!("spectral step {step:.4e} rad/s > {needed_step:.4e} rad/s"));
        }
        if reasons.is_empty() {
            return Ok(());
        }
        Err(Error::GridResolution { reason: reasons.join("; "), suggested: self.suggest_for(p) })
    }

    /// Smallest power-of-two refinement of this grid (same center, window
    /// widened if needed) that passes [`TimeGrid::check_resolution`].
    pub fn suggest_for(&self, p: &MediumParams) -> TimeGrid {
        let center = self.t0 + 0.5 * self.window();
        let window = self.window().max(1.01 * 20.0 * PI / p.gamma31);
        let max_dt = PI / (50.0 * p.gamma31.max(p.effective_detuning().abs()));
        let mut n = self.n.max(MIN_GRID_POINTS);
        while window / (n as f64) > max_dt {
            n *= 2;
        }
        TimeGrid { t0: center - 0.5 * window, dt: window / n as f64, n }
    }
}

/// Analytic Gaussian pulse. `fwhm` is the full width at half maximum of the
/// intensity `|envelope|²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PulseSpec {
    pub fwhm: f64,
    pub peak_amplitude: f64,
    pub center_time: f64,
}

impl PulseSpec {
    pub fn new(fwhm: f64, peak_amplitude: f64, center_time: f64) -> Result<Self> {
        if !(fwhm > 0.0) || !fwhm.is_finite() {
            return Err(Error::invalid(format!("fwhm must be positive, got {fwhm}")));
        }
        if !peak_amplitude.is_finite() || !center_time.is_finite() {
            return Err(Error::invalid("pulse amplitude and center must be finite"));
        }
        Ok(PulseSpec { fwhm, peak_amplitude, center_time })
    }

    /// Envelope amplitude `A·exp(−2 ln2 (t − t₀)²/fwhm²)`.
    pub fn amplitude(&self, t: f64) -> f64 {
        let x = (t - self.center_time) / self.fwhm;
        self.peak_amplitude * (-2.0 * LN_2 * x * x).exp()
    }

    /// `∫|envelope|² dt = A²·fwhm·√(π/(4 ln2))`.
    pub fn energy(&self) -> f64 {
        self.peak_amplitude.powi(2) * self.fwhm * (PI / (4.0 * LN_2)).sqrt()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PulseEnvelope {
    pub grid: TimeGrid,
    pub samples: Vec<C64>,
}

impl PulseEnvelope {
    pub fn new(grid: TimeGrid, samples: Vec<C64>) -> Result<Self> {
        if samples.len() != grid.n {
            return Err(Error::invalid(format!("{} samples for a grid of {}", samples.len(), grid.n)));
        }
        Ok(PulseEnvelope { grid, samples })
    }

    /// `Σ|s|²·dt`.
    pub fn energy(&self) -> f64 {
        self.samples.iter().map(|s| s.norm_sqr()).sum::<f64>() * self.grid.dt
    }

    pub fn intensity(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.norm_sqr()).collect()
    }

    /// DFT `Λ_k = Σ_j f_j e^{+2πi jk/n}` (bins in FFT order).
    pub fn spectrum(&self) -> Vec<C64> {
        let mut buf = self.samples.clone();
        FftPlanner::new().plan_fft_inverse(buf.len()).process(&mut buf);
        buf
    }

    /// Inverse of [`PulseEnvelope::spectrum`].
    pub fn from_spectrum(grid: TimeGrid, mut spectrum: Vec<C64>) -> Result<Self> {
        if spectrum.len() != grid.n {
            return Err(Error::invalid(format!("{} spectral bins for a grid of {}", spectrum.len(), grid.n)));
        }
        FftPlanner::new().plan_fft_forward(spectrum.len()).process(&mut spectrum);
        let scale = 1.0 / grid.n as f64;
        spectrum.iter_mut().for_each(|s| *s *= scale);
        Ok(PulseEnvelope { grid, samples: spectrum })
    }

    pub fn scaled(&self, a: C64) -> PulseEnvelope {
        PulseEnvelope { grid: self.grid, samples: self.samples.iter().map(|s| s * a).collect() }
    }
}

/// Sample `spec` on `grid`. The pulse must sit at least 4 widths inside both
/// edges of a window at least 8 widths long.
pub fn make_gaussian_pulse(spec: &PulseSpec, grid: &TimeGrid) -> Result<PulseEnvelope> {
    let window = grid.window();
    if window < 8.0 * spec.fwhm {
        return Err(Error::WindowTooSmall(format!(
            "window {window:.4e} s is shorter than 8 x fwhm = {:.4e} s",
            8.0 * spec.fwhm
        )));
    }
    let last = grid.time(grid.n - 1);
    let margin = 4.0 * spec.fwhm;
    if spec.center_time - grid.t0 < margin || last - spec.center_time < margin {
        return Err(Error::WindowTooSmall(format!(
            "pulse center {:.4e} s is closer than 4 x fwhm to the window edges [{:.4e}, {:.4e}] s",
            spec.center_time, grid.t0, last
        )));
    }
    let samples = grid.times().map(|t| C64::from(spec.amplitude(t))).collect();
    Ok(PulseEnvelope { grid: *grid, samples })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PropagationMode {
    /// Omit the vacuum phase `iωL/c`: the output is directly comparable to a
    /// reference pulse that crossed the same length of vacuum.
    VacuumReferenced,
    /// Include the vacuum transit.
    Absolute,
}

/// Propagate `env` through the medium `p` over `p.length`.
pub fn propagate(env: &PulseEnvelope, p: &MediumParams, mode: PropagationMode) -> Result<PulseEnvelope> {
    p.validate()?;
    env.grid.check_resolution(p)?;
    Ok(propagate_with(env, p.length, mode, |omega| p.transfer_kernel(omega)))
}

/// Propagate through an arbitrary kernel `K(ω)` (m⁻¹) over `length`.
pub fn propagate_with<K>(env: &PulseEnvelope, length: f64, mode: PropagationMode, kernel: K) -> PulseEnvelope
where
    K: Fn(f64) -> C64,
{
    let mut spec = env.spectrum();
    for (s, omega) in spec.iter_mut().zip(env.grid.angular_frequencies()) {
        let mut exponent = kernel(omega) * length;
        if mode == PropagationMode::Absolute {
            exponent += C64::new(0.0, omega * length / SPEED_OF_LIGHT);
        }
        *s *= exponent.exp();
    }
    PulseEnvelope::from_spectrum(env.grid, spec).expect("spectrum length matches grid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hz;
    use approx::assert_relative_eq;

    fn spec_15() -> PulseSpec {
        PulseSpec::new(15.4e-6, 1.0, 0.0).unwrap()
    }

    fn medium() -> MediumParams {
        MediumParams::fig2(1.048e11, hz(101.35e3))
    }

    #[test]
    fn grid_validation() {
        assert!(TimeGrid::new(0.0, 1e-9, 1000).is_err());
        assert!(TimeGrid::new(0.0, 1e-9, 512).is_err());
        assert!(TimeGrid::new(0.0, 0.0, 1024).is_err());
        let g = TimeGrid::new(-1.0, 1e-3, 2048).unwrap();
        assert_relative_eq!(g.window(), 2.048);
        let w = g.angular_frequencies();
        assert_eq!(w[0], 0.0);
        assert_relative_eq!(w[1], TAU / 2.048);
        assert_relative_eq!(w[1024], -1024.0 * TAU / 2.048);
        assert_relative_eq!(w[2047], -TAU / 2.048);
    }

    #[test]
    fn half_intensity_at_half_width() {
        let s = spec_15();
        assert_relative_eq!(s.amplitude(7.7e-6).powi(2), 0.5, max_relative = 1e-12);
        assert_relative_eq!(s.amplitude(-7.7e-6).powi(2), 0.5, max_relative = 1e-12);
    }

    #[test]
    fn sampled_energy_and_edges() {
        let s = PulseSpec::new(15.4e-6, 1.7, 3e-6).unwrap();
        let g = TimeGrid::for_pulse(&s, DEFAULT_WINDOW_FACTOR, DEFAULT_GRID_POINTS).unwrap();
        let env = make_gaussian_pulse(&s, &g).unwrap();
        assert_relative_eq!(env.energy(), s.energy(), max_relative = 1e-9);
        assert!(env.samples[0].norm() < 1e-8 * s.peak_amplitude);
        assert!(env.samples[g.n - 1].norm() < 1e-8 * s.peak_amplitude);
    }

    #[test]
    fn translation_by_whole_samples() {
        let g = TimeGrid::for_pulse(&spec_15(), 12.0, 4096).unwrap();
        let shift = 37;
        let a = make_gaussian_pulse(&spec_15(), &g).unwrap();
        let moved = PulseSpec { center_time: shift as f64 * g.dt, ..spec_15() };
        let b = make_gaussian_pulse(&moved, &g).unwrap();
        for j in 0..g.n - shift {
            assert!((a.samples[j] - b.samples[j + shift]).norm() < 1e-15);
        }
    }

    #[test]
    fn placement_errors() {
        let s = spec_15();
        let small = TimeGrid::centered(0.0, 7.0 * s.fwhm, 4096).unwrap();
        assert!(matches!(make_gaussian_pulse(&s, &small), Err(Error::WindowTooSmall(_))));
        let off = TimeGrid::new(-2.0 * s.fwhm, 10.0 * s.fwhm / 4096.0, 4096).unwrap();
        assert!(matches!(make_gaussian_pulse(&s, &off), Err(Error::WindowTooSmall(_))));
    }

    #[test]
    fn spectrum_round_trip() {
        let g = TimeGrid::for_pulse(&spec_15(), 12.0, 2048).unwrap();
        let env = make_gaussian_pulse(&spec_15(), &g).unwrap();
        let back = PulseEnvelope::from_spectrum(g, env.spectrum()).unwrap();
        for (a, b) in env.samples.iter().zip(&back.samples) {
            assert!((a - b).norm() < 1e-14);
        }
    }

    #[test]
    fn no_pump_is_identity() {
        let g = TimeGrid::for_pulse(&spec_15(), DEFAULT_WINDOW_FACTOR, DEFAULT_GRID_POINTS).unwrap();
        let env = make_gaussian_pulse(&spec_15(), &g).unwrap();
        let out = propagate(&env, &medium().with_omega_c(0.0), PropagationMode::VacuumReferenced).unwrap();
        for (a, b) in env.samples.iter().zip(&out.samples) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn flat_gain_scales_without_delay() {
        let g = TimeGrid::for_pulse(&spec_15(), 12.0, 4096).unwrap();
        let env = make_gaussian_pulse(&spec_15(), &g).unwrap();
        let gain = 3.0;
        let out = propagate_with(&env, 0.1, PropagationMode::VacuumReferenced, |_| C64::from(gain));
        let f = (gain * 0.1f64).exp();
        for (a, b) in env.samples.iter().zip(&out.samples) {
            assert!((a * f - b).norm() < 1e-12);
        }
    }

    #[test]
    fn absolute_mode_adds_vacuum_delay() {
        // A 1 ns pulse over 3 m of vacuum: delay 10 ns.
        let s = PulseSpec::new(1e-9, 1.0, 0.0).unwrap();
        let g = TimeGrid::for_pulse(&s, 40.0, 4096).unwrap();
        let env = make_gaussian_pulse(&s, &g).unwrap();
        let out = propagate_with(&env, 3.0, PropagationMode::Absolute, |_| C64::new(0.0, 0.0));
        let fit_in = crate::fit::fit_gaussian(&env).unwrap();
        let fit_out = crate::fit::fit_gaussian(&out).unwrap();
        assert_relative_eq!(fit_out.peak_time - fit_in.peak_time, 3.0 / SPEED_OF_LIGHT, max_relative = 1e-6);
    }

    #[test]
    fn coarse_grid_rejected_with_suggestion() {
        let s = PulseSpec::new(5e-6, 1.0, 0.0).unwrap();
        let p = medium();
        let g = TimeGrid::for_pulse(&s, 12.0, 4096).unwrap();
        match g.check_resolution(&p) {
            Err(Error::GridResolution { suggested, .. }) => {
                assert!(suggested.check_resolution(&p).is_ok());
                assert!(suggested.n.is_power_of_two());
                assert_relative_eq!(suggested.t0 + 0.5 * suggested.window(), 0.0, epsilon = 1e-18);
            }
            other => panic!("expected grid-resolution error, got {other:?}"),
        }
    }
}
