//! Flat `key = value` run configuration.
//!
//! Frequencies are ordinary frequencies ν in Hz (the simulator works with
//! ω = 2πν), times are in s and lengths in m. A value may carry a unit suffix
//! separated by whitespace (`25 MHz`, `15.4 us`, `10 cm`), which must match
//! the quantity the key names. Serialization writes bare SI numbers with
//! shortest round-trip formatting, so `parse(serialize(c)) == c`.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum GainReferenceKey {
    Carrier,
    Peak,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeKey {
    Vacuum,
    Absolute,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ExecutionKey {
    Parallel,
    Sequential,
}

/// Every key the configuration accepts. Field names are the config keys.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    /// Coupling constant κ₁₂ in m⁻¹s⁻¹. Calibrated when absent.
    pub kappa12: Option<f64>,
    /// Raman decoherence rate γ₃₁/2π. Calibrated when absent.
    pub gamma31_hz: Option<f64>,
    pub omega_c_hz: f64,
    pub delta_c_hz: f64,
    pub delta_2ph_hz: f64,
    pub gamma21_hz: f64,
    pub gamma23_hz: f64,
    pub length_m: f64,

    pub gain_target_per_m: f64,
    pub advance_target_s: f64,
    pub gain_reference: GainReferenceKey,

    pub fwhm_s: f64,
    pub peak_amplitude: f64,
    pub center_time_s: f64,
    pub propagation_mode: ModeKey,

    pub grid_n: usize,
    pub window_factor: f64,
    pub auto_refine: bool,

    /// Fourier-detuning range of the dispersion table.
    pub omega_min_hz: f64,
    pub omega_max_hz: f64,
    pub n_samples: usize,

    pub rabi_min_hz: f64,
    pub rabi_max_hz: f64,
    pub rabi_points: usize,
    pub rabi_delta_c_hz: f64,
    pub rabi_delta_2ph_hz: f64,

    pub detuning_span_gamma: f64,
    pub detuning_points: usize,
    pub detuning_fit_min_gamma: f64,

    pub narrowing_fwhms_s: Vec<f64>,
    pub narrowing_delta_2ph_hz: Vec<f64>,

    /// Probe Rabi frequency Ωp/2π of the oracle; Ωc/1000 when absent.
    pub omega_p_hz: Option<f64>,
    /// Length of the ODE integration in units of 1/γ₃₁.
    pub oracle_settle: f64,

    pub execution: ExecutionKey,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            kappa12: None,
            gamma31_hz: None,
            omega_c_hz: 25e6,
            delta_c_hz: 3e9,
            delta_2ph_hz: 400e3,
            gamma21_hz: 3e6,
            gamma23_hz: 3e6,
            length_m: 0.1,
            gain_target_per_m: 5.0,
            advance_target_s: 220e-9,
            gain_reference: GainReferenceKey::Carrier,
            fwhm_s: 15.4e-6,
            peak_amplitude: 1.0,
            center_time_s: 0.0,
            propagation_mode: ModeKey::Vacuum,
            grid_n: 65536,
            window_factor: 12.0,
            auto_refine: true,
            omega_min_hz: -2e6,
            omega_max_hz: 2e6,
            n_samples: 801,
            rabi_min_hz: 5e6,
            rabi_max_hz: 15e6,
            rabi_points: 41,
            rabi_delta_c_hz: 2.2e9,
            rabi_delta_2ph_hz: 400e3,
            detuning_span_gamma: 10.0,
            detuning_points: 201,
            detuning_fit_min_gamma: 5.0,
            narrowing_fwhms_s: vec![5e-6, 8e-6, 12e-6, 15.4e-6],
            narrowing_delta_2ph_hz: vec![300e3, 400e3, 500e3],
            omega_p_hz: None,
            oracle_settle: 60.0,
            execution: ExecutionKey::Parallel,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub key: Option<String>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.line, &self.key) {
            (Some(l), Some(k)) => write!(f, "line {l}: key `{k}`: {}", self.message),
            (Some(l), None) => write!(f, "line {l}: {}", self.message),
            (None, Some(k)) => write!(f, "key `{k}`: {}", self.message),
            (None, None) => f.write_str(&self.message),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Unit {
    Hz,
    Seconds,
    Meters,
    PerMeter,
    Plain,
}

impl Unit {
    fn scales(self) -> &'static [(&'static str, f64)] {
        match self {
            Unit::Hz => &[("Hz", 1.0), ("kHz", 1e3), ("MHz", 1e6), ("GHz", 1e9)],
            Unit::Seconds => &[("s", 1.0), ("ms", 1e-3), ("us", 1e-6), ("μs", 1e-6), ("ns", 1e-9)],
            Unit::Meters => &[("m", 1.0), ("cm", 1e-2), ("mm", 1e-3)],
            Unit::PerMeter => &[("m^-1", 1.0), ("/m", 1.0), ("cm^-1", 100.0), ("/cm", 100.0)],
            Unit::Plain => &[],
        }
    }

    fn describe(self) -> &'static str {
        match self {
            Unit::Hz => "a frequency in Hz",
            Unit::Seconds => "a time in s",
            Unit::Meters => "a length in m",
            Unit::PerMeter => "a gain in m^-1",
            Unit::Plain => "a dimensionless number",
        }
    }
}

fn number(text: &str, unit: Unit) -> Result<f64, String> {
    let mut parts = text.split_whitespace();
    let (num, suffix) = (parts.next().unwrap_or(""), parts.next());
    if parts.next().is_some() {
        return Err(format!("cannot parse `{text}` as a number"));
    }
    let value: f64 = num.parse().map_err(|_| format!("cannot parse `{text}` as a number"))?;
    if !value.is_finite() {
        return Err(format!("`{text}` is not finite"));
    }
    match suffix {
        None => Ok(value),
        Some(s) => match unit.scales().iter().find(|(name, _)| *name == s) {
            Some((_, scale)) => Ok(value * scale),
            None => {
                let accepted: Vec<&str> = unit.scales().iter().map(|(n, _)| *n).collect();
                if accepted.is_empty() {
                    Err(format!("unit `{s}` given for {}, which takes no unit", unit.describe()))
                } else {
                    Err(format!("unit `{s}` does not fit {} (accepted: {})", unit.describe(), accepted.join(", ")))
                }
            }
        },
    }
}

fn count(text: &str) -> Result<usize, String> {
    text.parse().map_err(|_| format!("cannot parse `{text}` as a non-negative integer"))
}

fn list(text: &str, unit: Unit) -> Result<Vec<f64>, String> {
    text.split(',').map(|item| number(item.trim(), unit)).collect()
}

fn boolean(text: &str) -> Result<bool, String> {
    match text {
        "true" => Ok(true),
        "false" => Ok(false),
        _ => Err(format!("expected `true` or `false`, got `{text}`")),
    }
}

fn choice<T: Copy>(text: &str, options: &[(&str, T)]) -> Result<T, String> {
    options.iter().find(|(n, _)| *n == text).map(|(_, v)| *v).ok_or_else(|| {
        let names: Vec<&str> = options.iter().map(|(n, _)| *n).collect();
        format!("expected one of {}, got `{text}`", names.join(", "))
    })
}

const GAIN_REFERENCES: &[(&str, GainReferenceKey)] =
    &[("carrier", GainReferenceKey::Carrier), ("peak", GainReferenceKey::Peak)];
const MODES: &[(&str, ModeKey)] = &[("vacuum", ModeKey::Vacuum), ("absolute", ModeKey::Absolute)];
const EXECUTIONS: &[(&str, ExecutionKey)] =
    &[("parallel", ExecutionKey::Parallel), ("sequential", ExecutionKey::Sequential)];

fn name_of<T: PartialEq>(options: &[(&'static str, T)], v: &T) -> &'static str {
    options.iter().find(|(_, o)| o == v).map(|(n, _)| *n).expect("every variant is listed")
}

impl RunConfig {
    /// Assign one key. Returns `Err(None)` for an unknown key.
    fn set(&mut self, key: &str, v: &str) -> Result<(), Option<String>> {
        use Unit::*;
        let r = match key {
            "kappa12" => number(v, Plain).map(|x| self.kappa12 = Some(x)),
            "gamma31_hz" => number(v, Hz).map(|x| self.gamma31_hz = Some(x)),
            "omega_c_hz" => number(v, Hz).map(|x| self.omega_c_hz = x),
            "delta_c_hz" => number(v, Hz).map(|x| self.delta_c_hz = x),
            "delta_2ph_hz" => number(v, Hz).map(|x| self.delta_2ph_hz = x),
            "gamma21_hz" => number(v, Hz).map(|x| self.gamma21_hz = x),
            "gamma23_hz" => number(v, Hz).map(|x| self.gamma23_hz = x),
            "length_m" => number(v, Meters).map(|x| self.length_m = x),
            "gain_target_per_m" => number(v, PerMeter).map(|x| self.gain_target_per_m = x),
            "advance_target_s" => number(v, Seconds).map(|x| self.advance_target_s = x),
            "gain_reference" => choice(v, GAIN_REFERENCES).map(|x| self.gain_reference = x),
            "fwhm_s" => number(v, Seconds).map(|x| self.fwhm_s = x),
            "peak_amplitude" => number(v, Plain).map(|x| self.peak_amplitude = x),
            "center_time_s" => number(v, Seconds).map(|x| self.center_time_s = x),
            "propagation_mode" => choice(v, MODES).map(|x| self.propagation_mode = x),
            "grid_n" => count(v).map(|x| self.grid_n = x),
            "window_factor" => number(v, Plain).map(|x| self.window_factor = x),
            "auto_refine" => boolean(v).map(|x| self.auto_refine = x),
            "omega_min_hz" => number(v, Hz).map(|x| self.omega_min_hz = x),
            "omega_max_hz" => number(v, Hz).map(|x| self.omega_max_hz = x),
            "n_samples" => count(v).map(|x| self.n_samples = x),
            "rabi_min_hz" => number(v, Hz).map(|x| self.rabi_min_hz = x),
            "rabi_max_hz" => number(v, Hz).map(|x| self.rabi_max_hz = x),
            "rabi_points" => count(v).map(|x| self.rabi_points = x),
            "rabi_delta_c_hz" => number(v, Hz).map(|x| self.rabi_delta_c_hz = x),
            "rabi_delta_2ph_hz" => number(v, Hz).map(|x| self.rabi_delta_2ph_hz = x),
            "detuning_span_gamma" => number(v, Plain).map(|x| self.detuning_span_gamma = x),
            "detuning_points" => count(v).map(|x| self.detuning_points = x),
            "detuning_fit_min_gamma" => number(v, Plain).map(|x| self.detuning_fit_min_gamma = x),
            "narrowing_fwhms_s" => list(v, Seconds).map(|x| self.narrowing_fwhms_s = x),
            "narrowing_delta_2ph_hz" => list(v, Hz).map(|x| self.narrowing_delta_2ph_hz = x),
            "omega_p_hz" => number(v, Hz).map(|x| self.omega_p_hz = Some(x)),
            "oracle_settle" => number(v, Plain).map(|x| self.oracle_settle = x),
            "execution" => choice(v, EXECUTIONS).map(|x| self.execution = x),
            _ => return Err(None),
        };
        r.map_err(Some)
    }

    /// All keys in a fixed order with their serialized values.
    pub fn entries(&self) -> Vec<(&'static str, String)> {
        let f = |x: f64| format!("{x:?}");
        let fl = |xs: &[f64]| xs.iter().map(|&x| f(x)).collect::<Vec<_>>().join(", ");
        let mut out = Vec::new();
        if let Some(k) = self.kappa12 {
            out.push(("kappa12", f(k)));
        }
        if let Some(g) = self.gamma31_hz {
            out.push(("gamma31_hz", f(g)));
        }
        out.extend([
            ("omega_c_hz", f(self.omega_c_hz)),
            ("delta_c_hz", f(self.delta_c_hz)),
            ("delta_2ph_hz", f(self.delta_2ph_hz)),
            ("gamma21_hz", f(self.gamma21_hz)),
            ("gamma23_hz", f(self.gamma23_hz)),
            ("length_m", f(self.length_m)),
            ("gain_target_per_m", f(self.gain_target_per_m)),
            ("advance_target_s", f(self.advance_target_s)),
            ("gain_reference", name_of(GAIN_REFERENCES, &self.gain_reference).to_string()),
            ("fwhm_s", f(self.fwhm_s)),
            ("peak_amplitude", f(self.peak_amplitude)),
            ("center_time_s", f(self.center_time_s)),
            ("propagation_mode", name_of(MODES, &self.propagation_mode).to_string()),
            ("grid_n", self.grid_n.to_string()),
            ("window_factor", f(self.window_factor)),
            ("auto_refine", self.auto_refine.to_string()),
            ("omega_min_hz", f(self.omega_min_hz)),
            ("omega_max_hz", f(self.omega_max_hz)),
            ("n_samples", self.n_samples.to_string()),
            ("rabi_min_hz", f(self.rabi_min_hz)),
            ("rabi_max_hz", f(self.rabi_max_hz)),
            ("rabi_points", self.rabi_points.to_string()),
            ("rabi_delta_c_hz", f(self.rabi_delta_c_hz)),
            ("rabi_delta_2ph_hz", f(self.rabi_delta_2ph_hz)),
            ("detuning_span_gamma", f(self.detuning_span_gamma)),
            ("detuning_points", self.detuning_points.to_string()),
            ("detuning_fit_min_gamma", f(self.detuning_fit_min_gamma)),
            ("narrowing_fwhms_s", fl(&self.narrowing_fwhms_s)),
            ("narrowing_delta_2ph_hz", fl(&self.narrowing_delta_2ph_hz)),
        ]);
        if let Some(p) = self.omega_p_hz {
            out.push(("omega_p_hz", f(p)));
        }
        out.push(("oracle_settle", f(self.oracle_settle)));
        out.push(("execution", name_of(EXECUTIONS, &self.execution).to_string()));
        out
    }

    pub fn to_text(&self) -> String {
        self.entries().into_iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
    }
}

pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let mut cfg = RunConfig::default();
    let mut seen: BTreeMap<String, usize> = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let Some((key, value)) = content.split_once('=') else {
            return Err(ConfigError { line: Some(line), key: None, message: format!("expected `key = value`, got `{content}`") });
        };
        let (key, value) = (key.trim(), value.trim());
        let err = |message: String| ConfigError { line: Some(line), key: Some(key.to_string()), message };
        if value.is_empty() {
            return Err(err("missing value".into()));
        }
        if let Some(first) = seen.insert(key.to_string(), line) {
            return Err(err(format!("duplicate key, first set on line {first}")));
        }
        match cfg.set(key, value) {
            Ok(()) => {}
            Err(None) => return Err(err("unknown key".into())),
            Err(Some(m)) => return Err(err(m)),
        }
    }
    match (seen.get("kappa12"), seen.get("gamma31_hz")) {
        (Some(&l), None) => Err(ConfigError {
            line: Some(l),
            key: Some("gamma31_hz".into()),
            message: "missing required key: kappa12 and gamma31_hz must be given together (omit both to calibrate)".into(),
        }),
        (None, Some(&l)) => Err(ConfigError {
            line: Some(l),
            key: Some("kappa12".into()),
            message: "missing required key: kappa12 and gamma31_hz must be given together (omit both to calibrate)".into(),
        }),
        _ => Ok(cfg),
    }
}
