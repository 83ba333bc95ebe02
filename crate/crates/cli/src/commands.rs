//! One function per command: build the core inputs from the config, run,
//! and tabulate.

use clap::ValueEnum;
use fastlight_core::bloch::{cross_check_kernel, cross_check_ode, DriveParams};
use fastlight_core::experiments::{
    calibrate, narrowing_study, run_fig2, sweep_detuning, sweep_rabi, CalibrationTarget, DetuningSweep, GainReference,
    GridOptions, RabiSweep,
};
use fastlight_core::fit::pulse_metrics;
use fastlight_core::medium::MediumParams;
use fastlight_core::pulse::{make_gaussian_pulse, propagate, PropagationMode, PulseSpec};
use fastlight_core::{hz, Error, Execution};
use serde_json::json;

use crate::config::{ExecutionKey, GainReferenceKey, ModeKey, RunConfig};
use crate::output::{num, Check, Constants, Table};
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    Dispersion,
    Propagate,
    Fig2,
    SweepRabi,
    SweepDetuning,
    Narrowing,
    Calibrate,
    OracleCheck,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Dispersion => "dispersion",
            Command::Propagate => "propagate",
            Command::Fig2 => "fig2",
            Command::SweepRabi => "sweep-rabi",
            Command::SweepDetuning => "sweep-detuning",
            Command::Narrowing => "narrowing",
            Command::Calibrate => "calibrate",
            Command::OracleCheck => "oracle-check",
        }
    }
}

pub struct Outcome {
    pub table: Table,
    pub constants: Option<Constants>,
    pub metrics: serde_json::Value,
    pub checks: Vec<Check>,
}

/// Map a core error onto the exit-code classes: bad inputs are
/// configuration errors, everything else is numerical.
fn core(command: Command) -> impl Fn(Error) -> CliError {
    move |e| {
        let msg = format!("{}: {e}", command.name());
        match e {
            Error::InvalidParameter(_) | Error::WindowTooSmall(_) => CliError::Config(msg),
            _ => CliError::Numerical(msg),
        }
    }
}

fn base_medium(cfg: &RunConfig) -> MediumParams {
    MediumParams {
        kappa12: cfg.kappa12.unwrap_or(1.0),
        omega_c: hz(cfg.omega_c_hz),
        delta_c: hz(cfg.delta_c_hz),
        delta_2ph: hz(cfg.delta_2ph_hz),
        gamma21: hz(cfg.gamma21_hz),
        gamma23: hz(cfg.gamma23_hz),
        gamma31: hz(cfg.gamma31_hz.unwrap_or(1.0)),
        length: cfg.length_m,
    }
}

fn target(cfg: &RunConfig) -> CalibrationTarget {
    CalibrationTarget {
        gain_target: cfg.gain_target_per_m,
        advance_target: cfg.advance_target_s,
        gain_reference: match cfg.gain_reference {
            GainReferenceKey::Carrier => GainReference::Carrier,
            GainReferenceKey::Peak => GainReference::Peak,
        },
        base: base_medium(cfg),
    }
}

fn run_calibration(cfg: &RunConfig, command: Command) -> Result<(MediumParams, Constants), CliError> {
    let t = target(cfg);
    let seed = match (cfg.kappa12, cfg.gamma31_hz) {
        (Some(k), Some(g)) => (k, hz(g)),
        _ => t.asymptotic_seed().map_err(core(command))?,
    };
    let cal = calibrate(&t, seed).map_err(core(command))?;
    Ok((
        cal.params,
        Constants {
            kappa12: cal.kappa12,
            gamma31_hz: cal.gamma31 / hz(1.0),
            calibrated: true,
            iterations: Some(cal.iterations),
            gain_residual: Some(cal.gain_residual),
            advance_residual: Some(cal.advance_residual),
        },
    ))
}

/// The configured medium, calibrating κ₁₂ and γ₃₁ when they are not given.
fn medium(cfg: &RunConfig, command: Command) -> Result<(MediumParams, Constants), CliError> {
    let p = match (cfg.kappa12, cfg.gamma31_hz) {
        (Some(k), Some(g)) => {
            let c = Constants {
                kappa12: k,
                gamma31_hz: g,
                calibrated: false,
                iterations: None,
                gain_residual: None,
                advance_residual: None,
            };
            (base_medium(cfg), c)
        }
        _ => run_calibration(cfg, command)?,
    };
    p.0.validate().map_err(core(command))?;
    Ok(p)
}

fn grid_options(cfg: &RunConfig) -> GridOptions {
    GridOptions { n: cfg.grid_n, window_factor: cfg.window_factor, auto_refine: cfg.auto_refine }
}

fn execution(cfg: &RunConfig) -> Execution {
    match cfg.execution {
        ExecutionKey::Parallel => Execution::Parallel,
        ExecutionKey::Sequential => Execution::Sequential,
    }
}

pub fn run(command: Command, cfg: &RunConfig) -> Result<Outcome, CliError> {
    match command {
        Command::Dispersion => dispersion(cfg),
        Command::Propagate => propagate_cmd(cfg),
        Command::Fig2 => fig2(cfg),
        Command::SweepRabi => rabi(cfg),
        Command::SweepDetuning => detuning(cfg),
        Command::Narrowing => narrowing(cfg),
        Command::Calibrate => calibrate_cmd(cfg),
        Command::OracleCheck => oracle(cfg),
    }
}

fn dispersion(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let cmd = Command::Dispersion;
    let (p, constants) = medium(cfg, cmd)?;
    let profile = p.dispersion_profile(hz(cfg.omega_min_hz), hz(cfg.omega_max_hz), cfg.n_samples).map_err(core(cmd))?;
    let mut table = Table::new(&["omega", "re_k", "im_k", "intensity_gain", "group_delay_density"]);
    for pt in &profile.points {
        table.push(vec![
            num(pt.omega),
            num(pt.kernel.re),
            num(pt.kernel.im),
            num(pt.intensity_gain),
            num(pt.group_delay_density),
        ]);
    }
    let metrics = json!({
        "pole_center": p.pole_center(),
        "resonance_detuning": p.resonance_detuning(),
        "raman_linewidth": p.raman_linewidth(),
        "carrier_intensity_gain": p.intensity_gain(0.0),
        "peak_intensity_gain": p.peak_intensity_gain(),
        "gain_peak_omega": p.gain_peak_omega(),
        "group_delay": p.group_delay_exact(),
        "advance": p.advance_time(),
    });
    Ok(Outcome { table, constants: Some(constants), metrics, checks: Vec::new() })
}

fn propagate_cmd(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let cmd = Command::Propagate;
    let (p, constants) = medium(cfg, cmd)?;
    let spec = PulseSpec::new(cfg.fwhm_s, cfg.peak_amplitude, cfg.center_time_s).map_err(core(cmd))?;
    let grid = grid_options(cfg).grid_for(&spec, &p).map_err(core(cmd))?;
    let input = make_gaussian_pulse(&spec, &grid).map_err(core(cmd))?;
    let mode = match cfg.propagation_mode {
        ModeKey::Vacuum => PropagationMode::VacuumReferenced,
        ModeKey::Absolute => PropagationMode::Absolute,
    };
    let output = propagate(&input, &p, mode).map_err(core(cmd))?;
    let m = pulse_metrics(&input, &output).map_err(core(cmd))?;

    let mut table = Table::new(&["time", "input_re", "input_im", "output_re", "output_im"]);
    for (j, (a, b)) in input.samples.iter().zip(&output.samples).enumerate() {
        table.push(vec![num(grid.time(j)), num(a.re), num(a.im), num(b.re), num(b.im)]);
    }

    let spectrum = input.spectrum();
    let (mut weighted, mut total) = (0.0, 0.0);
    for (s, w) in spectrum.iter().zip(grid.angular_frequencies()) {
        weighted += s.norm_sqr() * (p.intensity_gain(w) * p.length).exp();
        total += s.norm_sqr();
    }
    let parseval = (m.energy_gain - weighted / total).abs() / m.energy_gain;
    let metrics = json!({
        "grid": grid,
        "pulse": metrics_json(&m),
        "predicted_advance": p.advance_time(),
    });
    let checks = vec![Check::below("parseval_energy_gain_identity", parseval, 1e-9)];
    Ok(Outcome { table, constants: Some(constants), metrics, checks })
}

fn metrics_json(m: &fastlight_core::fit::PulseMetrics) -> serde_json::Value {
    serde_json::to_value(m).expect("metrics serialize")
}

fn fig2(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let cmd = Command::Fig2;
    let (p, constants) = medium(cfg, cmd)?;
    let r = run_fig2(&p, cfg.fwhm_s, &grid_options(cfg)).map_err(core(cmd))?;
    let mut table = Table::new(&["edge", "time", "reference", "output", "output_normalized"]);
    for e in &r.edges {
        let edge = match e.edge {
            fastlight_core::experiments::Edge::Front => "front",
            fastlight_core::experiments::Edge::Rear => "rear",
        };
        table.push(vec![edge.into(), num(e.time), num(e.reference), num(e.output), num(e.output_normalized)]);
    }
    let m = &r.metrics;
    let metrics = json!({
        "advance": m.advance,
        "advance_err": m.advance_err,
        "advance_fraction": r.advance_fraction,
        "predicted_advance": r.predicted_advance,
        "energy_gain": m.energy_gain,
        "narrowing_fraction": m.narrowing_fraction,
        "distortion": m.distortion,
        "grid": r.grid,
        "input": m.input,
        "output": m.output,
    });
    let checks = vec![
        Check::range("advance_s", m.advance, Some(200e-9), Some(240e-9)),
        Check::range("advance_fraction", r.advance_fraction, Some(0.012), Some(0.016)),
        Check::below("distortion", m.distortion, 1e-3),
        Check::below("abs_narrowing_fraction", m.narrowing_fraction.abs(), 0.02),
    ];
    Ok(Outcome { table, constants: Some(constants), metrics, checks })
}

fn rabi(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let cmd = Command::SweepRabi;
    let (p, constants) = medium(cfg, cmd)?;
    let sweep = RabiSweep {
        omega_c_min: hz(cfg.rabi_min_hz),
        omega_c_max: hz(cfg.rabi_max_hz),
        points: cfg.rabi_points,
        delta_c: hz(cfg.rabi_delta_c_hz),
        delta_2ph: hz(cfg.rabi_delta_2ph_hz),
    };
    let r = sweep_rabi(&p, &sweep, execution(cfg)).map_err(core(cmd))?;
    let mut table = Table::new(&["omega_c", "group_velocity", "advance", "in_fit"]);
    for i in 0..r.variable.len() {
        table.push(vec![
            num(r.variable[i]),
            num(r.group_velocity[i]),
            num(r.advance[i]),
            r.in_fit[i].to_string(),
        ]);
    }
    let d = &r.diagnostics;
    let metrics = json!({ "power_law": d.power_law, "all_negative_in_fit": d.all_negative_in_fit });
    let checks = vec![
        Check::range("power_law_exponent", d.power_law.slope, Some(-2.1), Some(-1.9)),
        Check::holds("all_group_velocities_negative", r.group_velocity.iter().all(|&v| v < 0.0)),
    ];
    Ok(Outcome { table, constants: Some(constants), metrics, checks })
}

fn detuning(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let cmd = Command::SweepDetuning;
    let (p, constants) = medium(cfg, cmd)?;
    let sweep = DetuningSweep {
        span_gamma: cfg.detuning_span_gamma,
        points: cfg.detuning_points,
        fit_min_gamma: cfg.detuning_fit_min_gamma,
    };
    let r = sweep_detuning(&p, &sweep, execution(cfg)).map_err(core(cmd))?;
    let d = &r.diagnostics;
    let mut table = Table::new(&["delta_2ph", "offset", "group_velocity", "advance", "in_fit"]);
    for i in 0..r.variable.len() {
        table.push(vec![
            num(r.variable[i]),
            num(d.offsets[i]),
            num(r.group_velocity[i]),
            num(r.advance[i]),
            r.in_fit[i].to_string(),
        ]);
    }
    let center = d.crossovers.iter().sum::<f64>() / d.crossovers.len() as f64;
    let metrics = json!({
        "resonance": d.resonance,
        "quadratic": d.quadratic,
        "inverse_square": d.inverse_square,
        "symmetry_error": d.symmetry_error,
        "crossovers": d.crossovers,
        "window_center_hz": center / hz(1.0),
    });
    let checks = vec![
        Check::above("quadratic_r_squared", d.quadratic.r_squared, 0.999),
        Check::below("symmetry_error", d.symmetry_error, 1e-6),
        Check::range("crossover_count", d.crossovers.len() as f64, Some(2.0), Some(2.0)),
        Check::range("window_center_hz", center / hz(1.0), Some(180e3), Some(220e3)),
    ];
    Ok(Outcome { table, constants: Some(constants), metrics, checks })
}

fn narrowing(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let cmd = Command::Narrowing;
    let (p, constants) = medium(cfg, cmd)?;
    let detunings: Vec<f64> = cfg.narrowing_delta_2ph_hz.iter().map(|&v| hz(v)).collect();
    let t = narrowing_study(&p, &cfg.narrowing_fwhms_s, &detunings, &grid_options(cfg), execution(cfg))
        .map_err(core(cmd))?;
    let mut table = Table::new(&[
        "fwhm",
        "delta_2ph",
        "delta_eff",
        "advance",
        "narrowing_fraction",
        "energy_gain",
        "distortion",
        "superluminal_side",
    ]);
    for r in &t.rows {
        table.push(vec![
            num(r.fwhm),
            num(r.delta_2ph),
            num(r.delta_eff),
            num(r.advance),
            num(r.narrowing_fraction),
            num(r.energy_gain),
            num(r.distortion),
            r.superluminal_side.to_string(),
        ]);
    }
    let mut checks = vec![
        Check::holds("increases_as_width_decreases", t.increases_as_width_decreases),
        Check::holds("increases_as_detuning_decreases", t.increases_as_detuning_decreases),
    ];
    // Shortest against longest pulse at the configured detuning, when it is in the table.
    let widths = &cfg.narrowing_fwhms_s;
    let shortest = widths.iter().cloned().fold(f64::INFINITY, f64::min);
    let longest = widths.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if let (Some(s), Some(l)) = (t.get(shortest, p.delta_2ph), t.get(longest, p.delta_2ph)) {
        if shortest < longest {
            checks.push(Check::above("narrowing_ratio_shortest_to_longest", s.narrowing_fraction / l.narrowing_fraction, 4.0));
            checks.push(Check::above("shortest_pulse_advance_s", s.advance, 220e-9));
        }
    }
    let metrics = json!({
        "increases_as_width_decreases": t.increases_as_width_decreases,
        "increases_as_detuning_decreases": t.increases_as_detuning_decreases,
        "rows": t.rows.len(),
    });
    Ok(Outcome { table, constants: Some(constants), metrics, checks })
}

fn calibrate_cmd(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let cmd = Command::Calibrate;
    let (p, c) = run_calibration(cfg, cmd)?;
    let mut table = Table::new(&["kappa12", "gamma31", "iterations", "gain_residual", "advance_residual"]);
    let (gr, ar) = (c.gain_residual.unwrap_or(f64::NAN), c.advance_residual.unwrap_or(f64::NAN));
    table.push(vec![
        num(c.kappa12),
        num(p.gamma31),
        c.iterations.unwrap_or(0).to_string(),
        num(gr),
        num(ar),
    ]);
    let metrics = json!({
        "carrier_intensity_gain": p.intensity_gain(0.0),
        "peak_intensity_gain": p.peak_intensity_gain(),
        "advance": p.advance_time(),
        "stark_shift": p.stark_shift().ok(),
        "raman_linewidth": p.raman_linewidth(),
    });
    let checks = vec![Check::below("gain_residual", gr.abs(), 1e-6), Check::below("advance_residual", ar.abs(), 1e-6)];
    Ok(Outcome { table, constants: Some(c), metrics, checks })
}

fn oracle(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let cmd = Command::OracleCheck;
    let (p, constants) = medium(cfg, cmd)?;
    let omega_p = cfg.omega_p_hz.map(hz).unwrap_or(p.omega_c / 1000.0);
    let kernel = cross_check_kernel(&DriveParams::new(p, omega_p)).map_err(core(cmd))?;
    let scaled = DriveParams::scaled_preset();
    let ode = cross_check_ode(&scaled, cfg.oracle_settle, scaled.max_step(), 1).map_err(core(cmd))?;
    let mut table = Table::new(&["comparison", "relative_deviation", "bound"]);
    table.push(vec!["steady_state_vs_kernel".into(), num(kernel.relative_deviation), num(1e-2)]);
    table.push(vec!["ode_vs_steady_state".into(), num(ode.relative_deviation), num(1e-3)]);
    let metrics = json!({
        "relative_deviation": kernel.relative_deviation,
        "kernel": kernel,
        "ode": ode,
        "ode_drive": scaled,
    });
    let checks = vec![
        Check::below("relative_deviation", kernel.relative_deviation, 1e-2),
        Check::below("ode_relative_deviation", ode.relative_deviation, 1e-3),
    ];
    Ok(Outcome { table, constants: Some(constants), metrics, checks })
}
