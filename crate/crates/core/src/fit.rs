//! Gaussian-fit metrology of pulse envelopes.

use std::f64::consts::LN_2;

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pulse::PulseEnvelope;

/// Fraction of the peak intensity that delimits the fit window.
pub const FIT_THRESHOLD: f64 = 0.1;
/// Minimum number of samples above half maximum.
pub const MIN_SAMPLES_ABOVE_HALF: usize = 32;

/// Best-fit `height·exp(−4 ln2 (t − peak_time)²/fwhm²)` to `|envelope|²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianFit {
    pub peak_time: f64,
    pub peak_time_err: f64,
    pub fwhm: f64,
    pub fwhm_err: f64,
    pub height: f64,
    /// RMS of `(data − fit)/height` over the fit window.
    pub residual: f64,
}

/// Least-squares Gaussian fit to the intensity of `env`.
///
/// Samples above 10% of the maximum are fitted by weighted quadratic
/// regression of `ln I`, followed by one Gauss–Newton step on the linear
/// residuals. Uncertainties come from the covariance with unit weights.
pub fn fit_gaussian(env: &PulseEnvelope) -> Result<GaussianFit> {
    let intensity = env.intensity();
    let (peak_idx, &peak) = intensity
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .ok_or_else(|| Error::Unfittable("empty envelope".into()))?;
    if !(peak > 0.0) || !peak.is_finite() {
        return Err(Error::Unfittable("envelope has no positive finite maximum".into()));
    }

    let threshold = FIT_THRESHOLD * peak;
    let mut lo = peak_idx;
    while lo > 0 && intensity[lo - 1] > threshold {
        lo -= 1;
    }
    let mut hi = peak_idx;
    while hi + 1 < intensity.len() && intensity[hi + 1] > threshold {
        hi += 1;
    }
    let outside = intensity[..lo].iter().chain(&intensity[hi + 1..]).any(|&v| v > threshold);
    if outside {
        return Err(Error::Unfittable("more than one lobe above the fit threshold".into()));
    }
    let above_half = intensity[lo..=hi].iter().filter(|&&v| v > 0.5 * peak).count();
    if above_half < MIN_SAMPLES_ABOVE_HALF {
        return Err(Error::Unfittable(format!(
            "{above_half} samples above half maximum, need {MIN_SAMPLES_ABOVE_HALF}"
        )));
    }

    let grid = env.grid;
    let t_ref = grid.time(peak_idx);
    let scale = 0.5 * above_half as f64 * grid.dt;
    let u: Vec<f64> = (lo..=hi).map(|j| (grid.time(j) - t_ref) / scale).collect();
    let data: Vec<f64> = intensity[lo..=hi].iter().map(|v| v / peak).collect();

    // Weighted regression of ln I on (1, u, u²); weights I² undo the log.
    let mut normal = Matrix3::zeros();
    let mut rhs = Vector3::zeros();
    for (&x, &y) in u.iter().zip(&data) {
        let basis = Vector3::new(1.0, x, x * x);
        let w = y * y;
        normal += basis * basis.transpose() * w;
        rhs += basis * (w * y.ln());
    }
    let c = normal
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::Unfittable("singular log-domain regression".into()))?;
    if !(c[2] < 0.0) {
        return Err(Error::Unfittable("log intensity is not concave".into()));
    }
    // Parameters in scaled units: height/peak, center (units of `scale`), width (units of `scale`).
    let mut theta = Vector3::new(
        (c[0] - c[1] * c[1] / (4.0 * c[2])).exp(),
        -c[1] / (2.0 * c[2]),
        (-4.0 * LN_2 / c[2]).sqrt(),
    );

    let (jtj, jtr, _) = gauss_newton_terms(&u, &data, &theta);
    if let Some(step) = jtj.lu().solve(&jtr) {
        let trial = theta + step;
        if trial[0] > 0.0 && trial[2] > 0.0 {
            theta = trial;
        }
    }
    let (jtj, _, ssr) = gauss_newton_terms(&u, &data, &theta);

    let m = u.len() as f64;
    let sigma2 = ssr / (m - 3.0);
    let cov = jtj.try_inverse().map(|inv| inv * sigma2).unwrap_or_else(|| Matrix3::from_element(f64::NAN));
    Ok(GaussianFit {
        peak_time: t_ref + theta[1] * scale,
        peak_time_err: cov[(1, 1)].max(0.0).sqrt() * scale,
        fwhm: theta[2] * scale,
        fwhm_err: cov[(2, 2)].max(0.0).sqrt() * scale,
        height: theta[0] * peak,
        residual: (ssr / m).sqrt() / theta[0],
    })
}

/// `JᵀJ`, `Jᵀr` and the residual sum of squares of the linear-domain model at `theta`.
fn gauss_newton_terms(u: &[f64], data: &[f64], theta: &Vector3<f64>) -> (Matrix3<f64>, Vector3<f64>, f64) {
    let (a, t0, w) = (theta[0], theta[1], theta[2]);
    let k = 4.0 * LN_2 / (w * w);
    let mut jtj = Matrix3::zeros();
    let mut jtr = Vector3::zeros();
    let mut ssr = 0.0;
    for (&x, &y) in u.iter().zip(data) {
        let d = x - t0;
        let e = (-k * d * d).exp();
        let f = a * e;
        let r = y - f;
        let j = Vector3::new(e, 2.0 * k * d * f, 2.0 * k * d * d * f / w);
        jtj += j * j.transpose();
        jtr += j * r;
        ssr += r * r;
    }
    (jtj, jtr, ssr)
}

/// Observables of one propagation run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PulseMetrics {
    pub input: GaussianFit,
    pub output: GaussianFit,
    /// Output energy over input energy.
    pub energy_gain: f64,
    /// `input.peak_time − output.peak_time`; positive means the output leads.
    pub advance: f64,
    pub advance_err: f64,
    /// `(fwhm_in − fwhm_out)/fwhm_in`.
    pub narrowing_fraction: f64,
    /// Gaussian-fit residual of the output.
    pub distortion: f64,
}

pub fn pulse_metrics(input: &PulseEnvelope, output: &PulseEnvelope) -> Result<PulseMetrics> {
    let fin = fit_gaussian(input)?;
    let fout = fit_gaussian(output)?;
    Ok(PulseMetrics {
        input: fin,
        output: fout,
        energy_gain: output.energy() / input.energy(),
        advance: fin.peak_time - fout.peak_time,
        advance_err: fin.peak_time_err.hypot(fout.peak_time_err),
        narrowing_fraction: (fin.fwhm - fout.fwhm) / fin.fwhm,
        distortion: fout.residual,
    })
}
