//! Time-domain check of the transfer kernel from the density-matrix
//! equations of motion of the three-level system, with ρ₃₃ ≈ 1:
//!
//! ```text
//! ρ̇₁₂ = −iΩc e^{iΔc t} ρ₁₃ − γ₁₂ ρ₁₂
//! ρ̇₁₃ =  iΩp e^{iΔp t} ρ₂₃ − iΩc e^{−iΔc t} ρ₁₂ − γ₁₃ ρ₁₃
//! ρ̇₂₃ =  iΩp e^{−iΔp t} ρ₁₃ + iΩc e^{−iΔc t} ρ₃₃ − γ₂₃ ρ₂₃
//! ```
//!
//! Ωp and Ωc are taken real. γ₁₂ is the same constant as γ₂₁ and γ₁₃ the
//! same as γ₃₁. The oscillating factors are kept explicitly, so the
//! integrator must resolve the one-photon detunings.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::medium::MediumParams;
use crate::C64;

const I: C64 = C64 { re: 0.0, im: 1.0 };

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlochState {
    pub time: f64,
    pub rho12: C64,
    pub rho13: C64,
    pub rho23: C64,
}

impl BlochState {
    pub fn zero(time: f64) -> Self {
        let z = C64::new(0.0, 0.0);
        BlochState { time, rho12: z, rho13: z, rho23: z }
    }

    fn max_norm(&self) -> f64 {
        self.rho12.norm().max(self.rho13.norm()).max(self.rho23.norm())
    }

    pub fn get(&self, which: Coherence) -> C64 {
        match which {
            Coherence::Rho12 => self.rho12,
            Coherence::Rho13 => self.rho13,
            Coherence::Rho23 => self.rho23,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Coherence {
    Rho12,
    Rho13,
    Rho23,
}

/// Probe drive on top of a medium. `delta_p` is authoritative for the
/// oracle; [`DriveParams::new`] sets it to `Δc + δ₂ph`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriveParams {
    /// Probe half Rabi frequency Ωp, rad/s.
    pub omega_p: f64,
    /// Probe one-photon detuning Δp, rad/s.
    pub delta_p: f64,
    pub medium: MediumParams,
}

impl DriveParams {
    pub fn new(medium: MediumParams, omega_p: f64) -> Self {
        DriveParams { omega_p, delta_p: medium.delta_c + medium.delta_2ph, medium }
    }

    /// Scaled-down drive for the ODE oracle (Δc = 2π×50 MHz, Ωc = 2π×2 MHz,
    /// γ₃₁ = 2π×50 kHz, γ₂₁ = γ₂₃ = 10⁻³Δc, δ₂ph = 2π×200 kHz, Ωp = Ωc/1000).
    /// Full-scale Δc would need ~10⁷ carrier periods to reach steady state.
    pub fn scaled_preset() -> Self {
        let medium = MediumParams {
            kappa12: 1.0,
            omega_c: crate::hz(2e6),
            delta_c: crate::hz(50e6),
            delta_2ph: crate::hz(200e3),
            gamma21: crate::hz(50e3),
            gamma23: crate::hz(50e3),
            gamma31: crate::hz(50e3),
            length: 0.1,
        };
        DriveParams::new(medium, medium.omega_c / 1000.0)
    }

    pub fn two_photon_detuning(&self) -> f64 {
        self.delta_p - self.medium.delta_c
    }

    pub fn validate(&self) -> Result<()> {
        self.medium.validate()?;
        if !self.omega_p.is_finite() || !self.delta_p.is_finite() {
            return Err(Error::invalid("probe drive must be finite"));
        }
        if self.omega_p.abs() > self.medium.omega_c.abs() / 100.0 {
            return Err(Error::invalid(format!(
                "weak probe requires |omega_p| <= |omega_c|/100 (omega_p = {:.4e}, omega_c = {:.4e})",
                self.omega_p, self.medium.omega_c
            )));
        }
        Ok(())
    }

    /// Largest step allowed by the integrator.
    pub fn max_step(&self) -> f64 {
        let m = &self.medium;
        let fastest = [m.delta_c.abs(), self.delta_p.abs(), m.omega_c.abs(), m.gamma21, m.gamma23, m.gamma31]
            .into_iter()
            .fold(0.0, f64::max);
        1.0 / (50.0 * fastest)
    }

    fn rhs(&self, t: f64, y: &[C64; 3]) -> [C64; 3] {
        let m = &self.medium;
        let ec = C64::cis(m.delta_c * t);
        let ep = C64::cis(self.delta_p * t);
        let (oc, op) = (m.omega_c, self.omega_p);
        let [r12, r13, r23] = *y;
        [
            -I * oc * ec * r13 - m.gamma21 * r12,
            I * op * ep * r23 - I * oc * ec.conj() * r12 - m.gamma31 * r13,
            I * op * ep.conj() * r13 + I * oc * ec.conj() - m.gamma23 * r23,
        ]
    }
}

/// Options for [`integrate_bloch_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegrationOptions {
    pub initial: BlochState,
    pub t_end: f64,
    pub dt: f64,
    /// Record every `record_stride`-th step (the final state is always kept).
    pub record_stride: usize,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Trajectory {
    pub states: Vec<BlochState>,
}

impl Trajectory {
    pub fn last(&self) -> Option<&BlochState> {
        self.states.last()
    }
}

/// Integrate from rest at t = 0 with fixed-step RK4, recording every step.
pub fn integrate_bloch(d: &DriveParams, t_end: f64, dt: f64) -> Result<Trajectory> {
    integrate_bloch_with(
        d,
        &IntegrationOptions { initial: BlochState::zero(0.0), t_end, dt, record_stride: 1 },
    )
}

pub fn integrate_bloch_with(d: &DriveParams, opts: &IntegrationOptions) -> Result<Trajectory> {
    d.validate()?;
    let t0 = opts.initial.time;
    let span = opts.t_end - t0;
    let dt = opts.dt;
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::InvalidStep(format!("dt must be positive, got {dt}")));
    }
    let max_dt = d.max_step();
    if dt > max_dt * (1.0 + 1e-12) {
        return Err(Error::InvalidStep(format!("dt = {dt:.4e} s exceeds the limit {max_dt:.4e} s")));
    }
    let settle = 10.0 / d.medium.gamma31;
    if span < settle * (1.0 - 1e-12) {
        return Err(Error::InvalidStep(format!(
            "integration span {span:.4e} s is shorter than 10/gamma31 = {settle:.4e} s"
        )));
    }
    if opts.record_stride == 0 {
        return Err(Error::InvalidStep("record_stride must be at least 1".into()));
    }

    let steps = (span / dt).round() as usize;
    let mut y = [opts.initial.rho12, opts.initial.rho13, opts.initial.rho23];
    let mut states = Vec::with_capacity(steps / opts.record_stride + 2);
    states.push(opts.initial);
    let half = 0.5 * dt;
    for k in 0..steps {
        let t = t0 + k as f64 * dt;
        let k1 = d.rhs(t, &y);
        let k2 = d.rhs(t + half, &axpy(&y, half, &k1));
        let k3 = d.rhs(t + half, &axpy(&y, half, &k2));
        let k4 = d.rhs(t + dt, &axpy(&y, dt, &k3));
        for i in 0..3 {
            y[i] += (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) * (dt / 6.0);
        }
        let state = BlochState { time: t0 + (k + 1) as f64 * dt, rho12: y[0], rho13: y[1], rho23: y[2] };
        let mag = state.max_norm();
        if !(mag <= 1.1) {
            return Err(Error::WeakProbeViolated { time: state.time, magnitude: mag });
        }
        if (k + 1) % opts.record_stride == 0 || k + 1 == steps {
            states.push(state);
        }
    }
    Ok(Trajectory { states })
}

fn axpy(y: &[C64; 3], h: f64, k: &[C64; 3]) -> [C64; 3] {
    [y[0] + k[0] * h, y[1] + k[1] * h, y[2] + k[2] * h]
}

/// First-order-in-Ωp steady state: `ρ₂₃ = A e^{−iΔc t}`,
/// `ρ₁₃ = B e^{i(Δp−Δc)t}`, `ρ₁₂ = C e^{iΔp t}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SteadyState {
    pub a: C64,
    pub b: C64,
    pub c: C64,
}

/// Closed-form steady state to first order in the probe.
///
/// With Δp → Δc, `−i` times the denominator of `B` is the complex conjugate
/// of the denominator of `W(0)`.
pub fn steady_state_perturbative(d: &DriveParams) -> SteadyState {
    let m = &d.medium;
    let (oc, op) = (m.omega_c, d.omega_p);
    let a = I * oc / C64::new(m.gamma23, -m.delta_c);
    let g12_dp = C64::new(m.gamma21, d.delta_p);
    let b_den = C64::new(m.gamma31, d.delta_p - m.delta_c) + oc * oc / g12_dp;
    let b = I * op * a / b_den;
    let c = -I * oc * b / g12_dp;
    SteadyState { a, b, c }
}

impl SteadyState {
    pub fn get(&self, which: Coherence) -> C64 {
        match which {
            Coherence::Rho12 => self.c,
            Coherence::Rho13 => self.b,
            Coherence::Rho23 => self.a,
        }
    }
}

/// Carrier frequency of each coherence in the steady state.
pub fn reference_frequency(d: &DriveParams, which: Coherence) -> f64 {
    match which {
        Coherence::Rho12 => d.delta_p,
        Coherence::Rho13 => d.delta_p - d.medium.delta_c,
        Coherence::Rho23 => -d.medium.delta_c,
    }
}

/// Complex amplitude of `which` on the carrier `e^{i·reference·t}`: the
/// coherence is multiplied by `e^{−i·reference·t}` and averaged over the last
/// 20% of the trajectory.
pub fn extract_coherence_amplitude(traj: &Trajectory, which: Coherence, reference: f64) -> Result<C64> {
    let (first, last) = match (traj.states.first(), traj.states.last()) {
        (Some(f), Some(l)) => (f.time, l.time),
        _ => return Err(Error::InsufficientData("empty trajectory".into())),
    };
    let start = last - 0.2 * (last - first);
    let window: Vec<&BlochState> = traj.states.iter().filter(|s| s.time >= start).collect();
    if window.len() < 16 {
        return Err(Error::InsufficientData(format!(
            "demodulation window holds {} samples, need at least 16",
            window.len()
        )));
    }
    let duration = last - window[0].time;
    if reference != 0.0 {
        let cycles = duration * reference.abs() / std::f64::consts::TAU;
        if cycles < 5.0 {
            return Err(Error::InsufficientData(format!(
                "demodulation window spans {cycles:.2} reference cycles, need at least 5"
            )));
        }
    }
    let sum: C64 = window.iter().map(|s| s.get(which) * C64::cis(-reference * s.time)).sum();
    Ok(sum / window.len() as f64)
}

/// Comparison of the first-order steady state with the transfer kernel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    /// Amplitude `C` of ρ₁₂ on `e^{iΔp t}`.
    pub coherence_c: C64,
    /// `C*/Ωp`, the response that the kernel predicts.
    pub coherence_response: C64,
    /// `K(0)/(iκ₁₂) = |Ωc|² W(0) / [(Δc − iγ₂₃)(Δc + iγ₂₁)]`.
    pub kernel_prediction: C64,
    pub relative_deviation: f64,
    /// `(γ₂₁ + |δ₂ph|)/|Δc| + 10⁻⁶`: the size of the Δp ≈ Δc replacement
    /// that separates the two expressions.
    pub deviation_bound: f64,
}

impl OracleResult {
    pub fn within_bound(&self) -> bool {
        self.relative_deviation < self.deviation_bound
    }
}

/// Check the closed-form steady state against the transfer kernel at the
/// probe carrier. The kernel is evaluated with `δ₂ph = Δp − Δc` of the drive.
pub fn cross_check_kernel(d: &DriveParams) -> Result<OracleResult> {
    d.validate()?;
    if d.omega_p == 0.0 {
        return Err(Error::invalid("omega_p must be nonzero to form the probe response"));
    }
    let ss = steady_state_perturbative(d);
    let coherence_response = ss.c.conj() / d.omega_p;
    let medium = d.medium.with_delta_2ph(d.two_photon_detuning()).with_kappa12(1.0);
    let kernel_prediction = medium.transfer_kernel(0.0) / I;
    let relative_deviation = (coherence_response - kernel_prediction).norm() / kernel_prediction.norm();
    let deviation_bound = (medium.gamma21 + d.two_photon_detuning().abs()) / medium.delta_c.abs() + 1e-6;
    Ok(OracleResult {
        coherence_c: ss.c,
        coherence_response,
        kernel_prediction,
        relative_deviation,
        deviation_bound,
    })
}

/// Integrated-versus-closed-form comparison of the steady state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OdeCheck {
    pub integrated: SteadyState,
    pub closed_form: SteadyState,
    /// `max` over the three amplitudes of `|integrated − closed| / |closed|`
    /// (amplitudes that vanish in closed form are skipped).
    pub relative_deviation: f64,
}

/// Integrate from rest for `settle_factor / γ₃₁` and demodulate all three
/// coherences.
pub fn cross_check_ode(d: &DriveParams, settle_factor: f64, dt: f64, record_stride: usize) -> Result<OdeCheck> {
    let t_end = settle_factor / d.medium.gamma31;
    let traj = integrate_bloch_with(
        d,
        &IntegrationOptions { initial: BlochState::zero(0.0), t_end, dt, record_stride },
    )?;
    let amp = |which| extract_coherence_amplitude(&traj, which, reference_frequency(d, which));
    let integrated = SteadyState { a: amp(Coherence::Rho23)?, b: amp(Coherence::Rho13)?, c: amp(Coherence::Rho12)? };
    let closed_form = steady_state_perturbative(d);
    let relative_deviation = [Coherence::Rho12, Coherence::Rho13, Coherence::Rho23]
        .into_iter()
        .filter(|&w| closed_form.get(w).norm() > 0.0)
        .map(|w| (integrated.get(w) - closed_form.get(w)).norm() / closed_form.get(w).norm())
        .fold(0.0, f64::max);
    Ok(OdeCheck { integrated, closed_form, relative_deviation })
}
