//! WebAssembly bindings for the browser demo in `www/`. Every export returns
//! a JSON document; the plain-Rust functions behind them are usable natively.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use rpnn::benchmarks::{BenchmarkFunction, FunctionSpec};
use rpnn::harness::{
    l2_error, run_convergence_sweep, run_tolerance_sweep, summarize, SweepConfig, ToleranceSweepConfig,
};
use rpnn::train::{SolveOptions, Tolerance, TrainingProblem};
use rpnn::{Error, RankRule, Result, SelectionStrategy, SolverKind, StrategyKind};

const PLOT_POINTS: usize = 400;
const TEST_GRID: usize = 2_000;

#[derive(Serialize)]
pub struct Approximation {
    pub function: String,
    pub x: Vec<f64>,
    pub target: Vec<f64>,
    pub approximation: Vec<f64>,
    pub l2_error: f64,
    pub tolerance: f64,
    pub effective_rank: usize,
    pub seed: u64,
}

#[derive(Serialize)]
pub struct Series {
    pub label: String,
    pub x: Vec<f64>,
    pub geometric_mean: Vec<f64>,
    pub arithmetic_mean: Vec<f64>,
}

fn spec(function: &str, k: f64) -> Result<FunctionSpec> {
    let k = k.is_finite().then_some(k).filter(|&k| k != 0.0);
    FunctionSpec::from_parts(function, k, None, None, None)
}

/// Fits one network and samples target and approximation for plotting.
pub fn approximate_native(
    function: &str,
    k: f64,
    strategy: &str,
    neurons: usize,
    seed: u64,
    solver: &str,
) -> Result<Approximation> {
    let spec = spec(function, k)?;
    let target = BenchmarkFunction::new(spec)?;
    let domain = target.domain();
    let xs = domain.linspace(5 * neurons);
    let ys = xs.iter().map(|&x| target.evaluate(x)).collect::<Result<Vec<_>>>()?;
    let strategy = SelectionStrategy::new(StrategyKind::from_label(strategy)?, seed);
    let problem = TrainingProblem::new(&xs, &ys, domain, neurons, &strategy)?;
    let tolerance = problem.resolve_tolerance(Tolerance::Auto)?;
    let options = SolveOptions {
        solver: SolverKind::from_label(solver)?,
        tolerance: Tolerance::Fixed(tolerance),
        rank_rule: RankRule::Relative,
    };
    let sol = problem.solve(options)?;
    let model = problem.model(&sol.wtilde)?;
    let x = domain.linspace(PLOT_POINTS);
    Ok(Approximation {
        function: spec.to_string(),
        target: x.iter().map(|&v| target.evaluate_unchecked(v)).collect(),
        approximation: x.iter().map(|&v| model.evaluate_unchecked(v)).collect(),
        x,
        l2_error: l2_error(|v| target.evaluate_unchecked(v), |v| model.evaluate_unchecked(v), domain, TEST_GRID)?,
        tolerance,
        effective_rank: sol.effective_rank,
        seed,
    })
}

fn series_from(records: &[rpnn::harness::SweepRecord], tolerance_axis: bool) -> Vec<Series> {
    let mut out: Vec<Series> = Vec::new();
    for c in summarize(records) {
        let (Some(g), Some(a)) = (c.geometric_mean, c.arithmetic_mean) else { continue };
        let (label, x) = if tolerance_axis {
            let (name, tol) = c.solver.split_once(':').unwrap_or((&c.solver, "nan"));
            (name.to_owned(), tol.parse().unwrap_or(f64::NAN))
        } else {
            (c.strategy.clone(), c.n as f64)
        };
        match out.iter_mut().find(|s| s.label == label) {
            Some(s) => {
                s.x.push(x);
                s.geometric_mean.push(g);
                s.arithmetic_mean.push(a);
            }
            None => out.push(Series { label, x: vec![x], geometric_mean: vec![g], arithmetic_mean: vec![a] }),
        }
    }
    out
}

/// Geometric-mean error against N for every strategy and both baselines.
pub fn convergence_native(function: &str, k: f64, neurons: &[usize], trials: usize, seed: u64) -> Result<Vec<Series>> {
    let cfg = SweepConfig {
        neurons: neurons.to_vec(),
        trials,
        seed,
        test_grid: TEST_GRID,
        ..SweepConfig::new(spec(function, k)?)
    };
    Ok(series_from(&run_convergence_sweep(&cfg)?, false))
}

/// Geometric-mean error against the rank tolerance for both solvers.
pub fn tolerance_study_native(function: &str, k: f64, neurons: usize, trials: usize, seed: u64) -> Result<Vec<Series>> {
    let cfg = ToleranceSweepConfig {
        neurons,
        trials,
        seed,
        test_grid: TEST_GRID,
        ..ToleranceSweepConfig::new(spec(function, k)?)
    };
    Ok(series_from(&run_tolerance_sweep(&cfg)?, true))
}

fn to_js<T: Serialize>(r: Result<T>) -> Result<String, JsError> {
    let v = r.map_err(|e| JsError::new(&e.to_string()))?;
    serde_json::to_string(&v).map_err(|e| JsError::new(&Error::from(e).to_string()))
}

#[wasm_bindgen]
pub fn approximate(function: &str, k: f64, strategy: &str, neurons: u32, seed: u32, solver: &str) -> Result<String, JsError> {
    to_js(approximate_native(function, k, strategy, neurons as usize, u64::from(seed), solver))
}

/// `neurons` is a comma-separated list.
#[wasm_bindgen]
pub fn convergence(function: &str, k: f64, neurons: &str, trials: u32, seed: u32) -> Result<String, JsError> {
    let ns = neurons
        .split(',')
        .map(|s| s.trim().parse::<usize>())
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(|e| JsError::new(&format!("bad neuron list: {e}")))?;
    to_js(convergence_native(function, k, &ns, trials as usize, u64::from(seed)))
}

#[wasm_bindgen]
pub fn tolerance_study(function: &str, k: f64, neurons: u32, trials: u32, seed: u32) -> Result<String, JsError> {
    to_js(tolerance_study_native(function, k, neurons as usize, trials as usize, u64::from(seed)))
}
