//! The density-matrix oracle against its own closed form and against the
//! transfer kernel.

use fastlight_core::bloch::{
    cross_check_kernel, cross_check_ode, extract_coherence_amplitude, integrate_bloch_with, reference_frequency,
    steady_state_perturbative, BlochState, Coherence, DriveParams, IntegrationOptions, Trajectory,
};
use fastlight_core::medium::MediumParams;
use fastlight_core::{hz, Error, C64};

const SETTLE: f64 = 45.0;

fn amplitude(d: &DriveParams, t0: f64, dt: f64) -> C64 {
    let traj = integrate_bloch_with(
        d,
        &IntegrationOptions { initial: BlochState::zero(t0), t_end: t0 + SETTLE / d.medium.gamma31, dt, record_stride: 1 },
    )
    .unwrap();
    extract_coherence_amplitude(&traj, Coherence::Rho12, reference_frequency(d, Coherence::Rho12)).unwrap()
}

#[test]
fn ode_matches_closed_form() {
    let d = DriveParams::scaled_preset();
    let check = cross_check_ode(&d, SETTLE, d.max_step(), 4).unwrap();
    assert!(check.relative_deviation < 1e-3, "{}", check.relative_deviation);
}

#[test]
fn halving_the_step_converges() {
    let d = DriveParams::scaled_preset();
    let coarse = amplitude(&d, 0.0, d.max_step());
    let fine = amplitude(&d, 0.0, 0.5 * d.max_step());
    assert!((coarse - fine).norm() / fine.norm() < 1e-8, "{}", (coarse - fine).norm() / fine.norm());
}

#[test]
fn start_time_does_not_matter() {
    let d = DriveParams::scaled_preset();
    let a = amplitude(&d, 0.0, d.max_step());
    let b = amplitude(&d, 1.234e-6, d.max_step());
    assert!((a - b).norm() / a.norm() < 1e-6);
}

#[test]
fn response_is_linear_in_probe() {
    let d = DriveParams::scaled_preset();
    let half = DriveParams { omega_p: 0.5 * d.omega_p, ..d };
    let r1 = amplitude(&d, 0.0, d.max_step()) / d.omega_p;
    let r2 = amplitude(&half, 0.0, d.max_step()) / half.omega_p;
    assert!((r1 - r2).norm() / r1.norm() < 1e-6);
}

#[test]
fn closed_form_matches_kernel_at_full_scale() {
    let m = MediumParams::fig2(1e11, hz(40e3));
    for delta in [hz(100e3), hz(208e3), hz(400e3), hz(-300e3)] {
        let r = cross_check_kernel(&DriveParams::new(m.with_delta_2ph(delta), m.omega_c / 1000.0)).unwrap();
        assert!(r.relative_deviation < 1e-2, "{delta}: {}", r.relative_deviation);
        assert!(r.within_bound());
    }
}

#[test]
fn raman_peak_matches_kernel_pole() {
    // |B| as a function of the probe detuning peaks at the shifted resonance.
    let m = MediumParams::fig2(1e11, hz(40e3));
    let d0 = m.resonance_detuning();
    let b_at = |delta: f64| steady_state_perturbative(&DriveParams::new(m.with_delta_2ph(delta), 1.0)).b.norm();
    let (mut lo, mut hi) = (d0 - m.gamma31, d0 + m.gamma31);
    let ratio = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..200 {
        let a = hi - ratio * (hi - lo);
        let b = lo + ratio * (hi - lo);
        if b_at(a) < b_at(b) {
            lo = a;
        } else {
            hi = b;
        }
    }
    let peak = 0.5 * (lo + hi);
    assert!((peak - d0).abs() < 1e-3 * m.gamma31, "{} vs {}", peak, d0);
}

#[test]
fn demodulation_rejects_other_tones() {
    let (f_ref, f_other) = (hz(200e3), hz(1.1e6));
    let a = C64::new(0.3, -0.2);
    let dt = 1e-8;
    let states = (0..20000)
        .map(|k| {
            let t = k as f64 * dt;
            let v = a * C64::cis(f_ref * t) + C64::cis(f_other * t);
            BlochState { time: t, rho12: v, rho13: v, rho23: v }
        })
        .collect();
    let got = extract_coherence_amplitude(&Trajectory { states }, Coherence::Rho12, f_ref).unwrap();
    assert!((got - a).norm() < 0.05 * a.norm(), "{got}");
}

#[test]
fn strong_probe_is_rejected() {
    let d = DriveParams::scaled_preset();
    assert!(matches!(
        cross_check_ode(&DriveParams { omega_p: d.medium.omega_c, ..d }, SETTLE, d.max_step(), 1),
        Err(Error::InvalidParameter(_))
    ));
}

#[test]
fn bad_steps_are_rejected() {
    let d = DriveParams::scaled_preset();
    let opts = |dt, t_end| IntegrationOptions { initial: BlochState::zero(0.0), t_end, dt, record_stride: 1 };
    let long = SETTLE / d.medium.gamma31;
    assert!(matches!(integrate_bloch_with(&d, &opts(2.0 * d.max_step(), long)), Err(Error::InvalidStep(_))));
    assert!(matches!(integrate_bloch_with(&d, &opts(d.max_step(), 1.0 / d.medium.gamma31)), Err(Error::InvalidStep(_))));
    assert!(matches!(integrate_bloch_with(&d, &opts(-1.0, long)), Err(Error::InvalidStep(_))));
}
