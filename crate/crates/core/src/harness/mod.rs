//! Experiment harness: Monte-Carlo convergence sweeps, the tolerance study,
//! L2 error measurement and CSV / plot-script emission.

mod config;
mod plot;
mod records;
mod sweep;

pub use config::{SweepConfig, ToleranceSweepConfig, DEFAULT_NEURONS, DEFAULT_TOLERANCES};
pub use plot::{emit_plot_script, plot_script};
pub use records::{
    arithmetic_mean, emit_csv, emit_summary_csv, geometric_mean, load_csv, read_csv, summarize,
    write_csv, CellSummary, SweepRecord, CSV_HEADER,
};
pub use sweep::{run_convergence_sweep, run_tolerance_sweep, set_thread_limit, solver_label, trial_seed};

use crate::error::{Error, Result};
use crate::model::Interval;

/// `sqrt(int (f - q)^2)` by the closed composite trapezoid rule on `grid`
/// equispaced points.
pub fn l2_error(
    f_true: impl Fn(f64) -> f64,
    f_approx: impl Fn(f64) -> f64,
    interval: Interval,
    grid: usize,
) -> Result<f64> {
    if grid < 2 {
        return Err(Error::invalid(format!("grid needs at least 2 points, got {grid}")));
    }
    let xs = interval.linspace(grid);
    let mut ys = Vec::with_capacity(grid);
    for &x in &xs {
        let y = f_true(x);
        if !y.is_finite() {
            return Err(non_finite("target", x, y));
        }
        ys.push(y);
    }
    l2_from_values(&xs, &ys, f_approx)
}

fn non_finite(what: &str, x: f64, v: f64) -> Error {
    Error::Numerical(format!("{what} is {v} at x = {x}"))
}

/// Trapezoid L2 distance between tabulated exact values and `approx`.
pub(crate) fn l2_from_values(xs: &[f64], ys: &[f64], approx: impl Fn(f64) -> f64) -> Result<f64> {
    let h = (xs[xs.len() - 1] - xs[0]) / (xs.len() - 1) as f64;
    let mut sum = 0.0;
    let last = xs.len() - 1;
    for (i, (&x, &y)) in xs.iter().zip(ys).enumerate() {
        let q = approx(x);
        if !q.is_finite() {
            return Err(non_finite("approximant", x, q));
        }
        let d = (y - q) * (y - q);
        sum += if i == 0 || i == last { 0.5 * d } else { d };
    }
    Ok((sum * h).sqrt())
}
