//! Pulse narrowing versus pulse width and two-photon detuning.

use serde::{Deserialize, Serialize};

use super::fig2::{run_pulse, GridOptions};
use crate::error::Result;
use crate::exec::Execution;
use crate::fit::pulse_metrics;
use crate::medium::MediumParams;
use crate::pulse::PulseSpec;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NarrowingRow {
    pub fwhm: f64,
    pub delta_2ph: f64,
    pub delta_eff: f64,
    pub advance: f64,
    pub narrowing_fraction: f64,
    pub energy_gain: f64,
    pub distortion: f64,
    /// Carrier outside the subluminal window `|δ_eff| ≤ Γ` of the Raman line.
    pub superluminal_side: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NarrowingTable {
    /// Row-major over (fwhm, delta_2ph) in input order.
    pub rows: Vec<NarrowingRow>,
    /// At every superluminal-side detuning, narrowing grows as the pulse
    /// gets shorter. Inside the subluminal window short pulses broaden.
    pub increases_as_width_decreases: bool,
    /// For every width, on each superluminal side of the resonance, narrowing
    /// grows as |δ_eff| shrinks.
    pub increases_as_detuning_decreases: bool,
}

impl NarrowingTable {
    pub fn get(&self, fwhm: f64, delta_2ph: f64) -> Option<&NarrowingRow> {
        self.rows.iter().find(|r| r.fwhm == fwhm && r.delta_2ph == delta_2ph)
    }
}

pub fn narrowing_study(
    p: &MediumParams,
    fwhms: &[f64],
    detunings: &[f64],
    opts: &GridOptions,
    exec: Execution,
) -> Result<NarrowingTable> {
    p.validate()?;
    let cells: Vec<(f64, f64)> = fwhms.iter().flat_map(|&w| detunings.iter().map(move |&d| (w, d))).collect();
    let linewidth = p.raman_linewidth();
    let rows = exec.try_map(&cells, |&(fwhm, delta_2ph)| -> Result<NarrowingRow> {
        let q = p.with_delta_2ph(delta_2ph);
        let spec = PulseSpec::new(fwhm, 1.0, 0.0)?;
        let (input, output) = run_pulse(&q, &spec, opts)?;
        let m = pulse_metrics(&input, &output)?;
        let delta_eff = q.effective_detuning();
        Ok(NarrowingRow {
            fwhm,
            delta_2ph,
            delta_eff,
            advance: m.advance,
            narrowing_fraction: m.narrowing_fraction,
            energy_gain: m.energy_gain,
            distortion: m.distortion,
            superluminal_side: delta_eff.abs() > linewidth,
        })
    })?;

    let mut by_width = true;
    for &d in detunings {
        let mut col: Vec<&NarrowingRow> = rows.iter().filter(|r| r.delta_2ph == d && r.superluminal_side).collect();
        col.sort_by(|a, b| b.fwhm.total_cmp(&a.fwhm));
        by_width &= col.windows(2).all(|w| w[1].narrowing_fraction >= w[0].narrowing_fraction);
    }
    let mut by_detuning = true;
    for &w in fwhms {
        for side in [1.0, -1.0] {
            let mut line: Vec<&NarrowingRow> = rows
                .iter()
                .filter(|r| r.fwhm == w && r.superluminal_side && r.delta_eff.signum() == side)
                .collect();
            line.sort_by(|a, b| b.delta_eff.abs().total_cmp(&a.delta_eff.abs()));
            by_detuning &= line.windows(2).all(|x| x[1].narrowing_fraction >= x[0].narrowing_fraction);
        }
    }
    Ok(NarrowingTable { rows, increases_as_width_decreases: by_width, increases_as_detuning_decreases: by_detuning })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::calibrate_fig2;
    use crate::hz;

    #[test]
    fn narrowing_trends() {
        let cal = calibrate_fig2().unwrap();
        let detunings = [hz(400e3), hz(500e3), hz(800e3)];
        let t = narrowing_study(&cal.params, &[15.4e-6, 5e-6], &detunings, &GridOptions::default(), Execution::default())
            .unwrap();
        assert_eq!(t.rows.len(), 6);
        assert!(t.increases_as_width_decreases);
        assert!(t.increases_as_detuning_decreases);
        // Beyond 2π×400 kHz the 15.4 μs pulse is not measurably narrowed.
        assert!(t.get(15.4e-6, hz(500e3)).unwrap().narrowing_fraction.abs() < 2e-3);
        assert!(t.get(15.4e-6, hz(800e3)).unwrap().narrowing_fraction.abs() < 2e-3);
    }

    #[test]
    fn subluminal_rows_do_not_enter_width_trend() {
        let cal = calibrate_fig2().unwrap();
        let detunings = [hz(300e3), hz(400e3)];
        let t = narrowing_study(&cal.params, &[15.4e-6, 5e-6], &detunings, &GridOptions::default(), Execution::default())
            .unwrap();
        let inside = t.get(5e-6, hz(300e3)).unwrap();
        assert!(!inside.superluminal_side);
        assert!(inside.narrowing_fraction < 0.0);
        assert!(t.increases_as_width_decreases);
    }
}
