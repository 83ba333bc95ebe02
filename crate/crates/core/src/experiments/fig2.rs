//! Advance of a 15.4 μs Gaussian probe against a vacuum reference.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fit::{pulse_metrics, PulseMetrics};
use crate::medium::MediumParams;
use crate::pulse::{
    make_gaussian_pulse, propagate, PropagationMode, PulseEnvelope, PulseSpec, TimeGrid, DEFAULT_GRID_POINTS,
    DEFAULT_WINDOW_FACTOR,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridOptions {
    pub n: usize,
    /// Window length in units of the pulse FWHM.
    pub window_factor: f64,
    /// Replace a grid that does not resolve the kernel by the suggested one
    /// instead of failing.
    pub auto_refine: bool,
}

impl Default for GridOptions {
    fn default() -> Self {
        GridOptions { n: DEFAULT_GRID_POINTS, window_factor: DEFAULT_WINDOW_FACTOR, auto_refine: true }
    }
}

impl GridOptions {
    pub fn grid_for(&self, spec: &PulseSpec, p: &MediumParams) -> Result<TimeGrid> {
        let grid = TimeGrid::for_pulse(spec, self.window_factor, self.n)?;
        match grid.check_resolution(p) {
            Ok(()) => Ok(grid),
            Err(Error::GridResolution { suggested, .. }) if self.auto_refine => Ok(suggested),
            Err(e) => Err(e),
        }
    }
}

/// Synthesize `spec`, propagate it vacuum-referenced through `p`, return
/// (input, output).
pub(crate) fn run_pulse(
    p: &MediumParams,
    spec: &PulseSpec,
    opts: &GridOptions,
) -> Result<(PulseEnvelope, PulseEnvelope)> {
    let grid = opts.grid_for(spec, p)?;
    let input = make_gaussian_pulse(spec, &grid)?;
    let output = propagate(&input, p, PropagationMode::VacuumReferenced)?;
    Ok((input, output))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Edge {
    Front,
    Rear,
}

/// Plot sample of one pulse edge. `reference` is normalized to its own peak,
/// `output` to the reference peak (showing the gain), `output_normalized` to
/// its own peak.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EdgeSample {
    pub edge: Edge,
    pub time: f64,
    pub reference: f64,
    pub output: f64,
    pub output_normalized: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fig2Report {
    pub params: MediumParams,
    pub pulse: PulseSpec,
    pub grid: TimeGrid,
    pub metrics: PulseMetrics,
    /// `advance / fwhm`.
    pub advance_fraction: f64,
    /// `L/c − group_delay_exact` at the carrier.
    pub predicted_advance: f64,
    pub edges: Vec<EdgeSample>,
}

/// Number of plot samples per edge.
const EDGE_SAMPLES: usize = 200;

pub fn run_fig2(p: &MediumParams, fwhm: f64, opts: &GridOptions) -> Result<Fig2Report> {
    let spec = PulseSpec::new(fwhm, 1.0, 0.0)?;
    let (input, output) = run_pulse(p, &spec, opts)?;
    let metrics = pulse_metrics(&input, &output)?;
    let edges = edge_samples(&input, &output, fwhm);
    Ok(Fig2Report {
        params: *p,
        pulse: spec,
        grid: input.grid,
        advance_fraction: metrics.advance / fwhm,
        predicted_advance: p.advance_time(),
        metrics,
        edges,
    })
}

/// Samples over `[−1.5, −0.25]·fwhm` (front) and `[0.25, 1.5]·fwhm` (rear)
/// around the reference peak.
fn edge_samples(input: &PulseEnvelope, output: &PulseEnvelope, fwhm: f64) -> Vec<EdgeSample> {
    let grid = input.grid;
    let ref_i = input.intensity();
    let out_i = output.intensity();
    let ref_peak = ref_i.iter().cloned().fold(0.0, f64::max);
    let out_peak = out_i.iter().cloned().fold(0.0, f64::max);
    let center = grid.t0 + 0.5 * grid.window();
    let mut rows = Vec::with_capacity(2 * EDGE_SAMPLES);
    for (edge, lo, hi) in [(Edge::Front, -1.5, -0.25), (Edge::Rear, 0.25, 1.5)] {
        let (t_lo, t_hi) = (center + lo * fwhm, center + hi * fwhm);
        let j_lo = ((t_lo - grid.t0) / grid.dt).ceil().max(0.0) as usize;
        let j_hi = (((t_hi - grid.t0) / grid.dt).floor() as usize).min(grid.n - 1);
        let stride = ((j_hi - j_lo) / EDGE_SAMPLES).max(1);
        for j in (j_lo..=j_hi).step_by(stride) {
            rows.push(EdgeSample {
                edge,
                time: grid.time(j),
                reference: ref_i[j] / ref_peak,
                output: out_i[j] / ref_peak,
                output_normalized: out_i[j] / out_peak,
            });
        }
    }
    rows
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::calibrate_fig2;

    #[test]
    fn fig2_run_leads_by_about_220_ns() {
        let cal = calibrate_fig2().unwrap();
        let r = run_fig2(&cal.params, 15.4e-6, &GridOptions::default()).unwrap();
        assert!((r.metrics.advance - 220e-9).abs() < 20e-9, "{}", r.metrics.advance);
        assert!(r.metrics.energy_gain > 1.0);
        let front = r.edges.iter().filter(|e| e.edge == Edge::Front);
        // Leading output: on the front edge the normalized output is above the reference.
        assert!(front.clone().count() > 100);
        assert!(front.into_iter().all(|e| e.output_normalized > e.reference));
        let rear = r.edges.iter().filter(|e| e.edge == Edge::Rear);
        assert!(rear.into_iter().all(|e| e.output_normalized < e.reference));
    }

    #[test]
    fn unrefined_coarse_grid_fails() {
        let cal = calibrate_fig2().unwrap();
        let opts = GridOptions { n: 1024, window_factor: 8.0, auto_refine: false };
        assert!(matches!(run_fig2(&cal.params, 5e-6, &opts), Err(Error::GridResolution { .. })));
    }
}
