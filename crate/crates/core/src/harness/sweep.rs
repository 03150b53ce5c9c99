use std::time::Instant;

use super::config::{SweepConfig, ToleranceSweepConfig};
use super::l2_from_values;
use super::records::SweepRecord;
use crate::baselines::fit_baseline;
use crate::benchmarks::BenchmarkFunction;
use crate::error::Result;
use crate::model::Interval;
use crate::rng::{derive_seed, label_hash};
use crate::selection::{CenterPlacement, SelectionStrategy, StrategyKind};
use crate::solvers::{residual_norm, CodFactorization, RankRule, SolverKind, SvdFactorization};
use crate::train::{SolveOptions, Tolerance, TrainingProblem};

/// Seed of one Monte-Carlo trial.
pub fn trial_seed(master: u64, strategy: StrategyKind, neurons: usize, trial: usize) -> u64 {
    derive_seed(&[master, label_hash(strategy.label()), neurons as u64, trial as u64])
}

/// `svd`, `cod` or `cod_abs`; the rank rule only matters for COD.
pub fn solver_label(solver: SolverKind, rule: RankRule) -> &'static str {
    match (solver, rule) {
        (SolverKind::Tsvd, _) => "svd",
        (SolverKind::Cod, RankRule::Relative) => "cod",
        (SolverKind::Cod, RankRule::Absolute) => "cod_abs",
    }
}

#[cfg(feature = "parallel")]
fn ordered_map<T: Sync, R: Send>(items: &[T], f: impl Fn(&T) -> R + Sync + Send) -> Vec<R> {
    use rayon::prelude::*;
    items.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
fn ordered_map<T, R>(items: &[T], f: impl Fn(&T) -> R) -> Vec<R> {
    items.iter().map(f).collect()
}

/// Caps the worker count of the global pool. Only effective before the
/// first parallel sweep.
pub fn set_thread_limit(threads: usize) -> Result<()> {
    #[cfg(feature = "parallel")]
    {
        // A pool that is already running keeps its size.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads.max(1)).build_global();
    }
    #[cfg(not(feature = "parallel"))]
    let _ = threads;
    Ok(())
}

/// Training samples and the exact target on the test grid, shared by all
/// trials of a sweep.
struct Data {
    target: BenchmarkFunction,
    domain: Interval,
    test_x: Vec<f64>,
    test_y: Vec<f64>,
}

impl Data {
    fn new(target: BenchmarkFunction, grid: usize) -> Result<Self> {
        let domain = target.domain();
        let test_x = domain.linspace(grid);
        let test_y = test_x.iter().map(|&x| target.evaluate(x)).collect::<Result<Vec<_>>>()?;
        Ok(Self { target, domain, test_x, test_y })
    }

    fn training(&self, points: usize) -> Result<(Vec<f64>, Vec<f64>)> {
        let xs = self.domain.linspace(points);
        let ys = xs.iter().map(|&x| self.target.evaluate(x)).collect::<Result<Vec<_>>>()?;
        Ok((xs, ys))
    }

    fn error_of(&self, approx: impl Fn(f64) -> f64) -> Option<f64> {
        l2_from_values(&self.test_x, &self.test_y, approx).ok()
    }
}

fn strategy_for(kind: StrategyKind, seed: u64, gamma: f64, centers: CenterPlacement) -> SelectionStrategy {
    SelectionStrategy::new(kind, seed).with_gamma(gamma).with_centers(centers)
}

// Only touches the clock when timing is requested; wasm has no `Instant`.
fn start_clock(enabled: bool) -> Option<Instant> {
    enabled.then(Instant::now)
}

fn elapsed_ms(start: Option<Instant>) -> Option<f64> {
    start.map(|s| s.elapsed().as_secs_f64() * 1e3)
}

/// Monte-Carlo convergence study: every (strategy, N, trial) in order,
/// followed by one row per (baseline, N).
pub fn run_convergence_sweep(config: &SweepConfig) -> Result<Vec<SweepRecord>> {
    config.validate()?;
    let data = Data::new(BenchmarkFunction::new(config.function)?, config.test_grid)?;
    let function = config.function.to_string();
    let options = config.solve_options();
    let label = solver_label(options.solver, options.rank_rule);

    let mut tasks = Vec::new();
    for &kind in &config.strategies {
        for &n in &config.neurons {
            for trial in 0..config.trials {
                tasks.push((kind, n, trial));
            }
        }
    }
    let training: Vec<_> = config
        .neurons
        .iter()
        .map(|&n| data.training(config.points_per_neuron * n))
        .collect::<Result<_>>()?;

    let mut records = ordered_map(&tasks, |&(kind, n, trial)| {
        let seed = trial_seed(config.seed, kind, n, trial);
        let (xs, ys) = &training[config.neurons.iter().position(|&m| m == n).expect("listed N")];
        let start = start_clock(config.record_wall_time);
        let strategy = strategy_for(kind, seed, config.gamma, config.centers);
        let mut rec = SweepRecord {
            function: function.clone(),
            strategy: kind.label().to_owned(),
            solver: format!("{label}:{}", options.tolerance),
            n,
            trial,
            seed,
            l2_error: None,
            residual_norm: None,
            effective_rank: None,
            wall_time_ms: None,
        };
        if let Ok(problem) = TrainingProblem::new(xs, ys, data.domain, n, &strategy) {
            if let Ok(tol) = problem.resolve_tolerance(options.tolerance) {
                if options.tolerance == Tolerance::Auto {
                    rec.solver = format!("{label}:auto={tol:e}");
                }
                let fixed = SolveOptions { tolerance: Tolerance::Fixed(tol), ..options };
                if let Ok(sol) = problem.solve(fixed) {
                    rec.residual_norm = Some(sol.residual_norm);
                    rec.effective_rank = Some(sol.effective_rank);
                    if let Ok(model) = problem.model(&sol.wtilde) {
                        rec.l2_error = data.error_of(|x| model.evaluate_unchecked(x));
                    }
                }
            }
        }
        rec.wall_time_ms = elapsed_ms(start);
        rec
    });

    for &kind in &config.baselines {
        for &n in &config.neurons {
            let start = start_clock(config.record_wall_time);
            let fitted = fit_baseline(kind, |x| data.target.evaluate_unchecked(x), data.domain, n);
            records.push(SweepRecord {
                function: function.clone(),
                strategy: kind.label().to_owned(),
                solver: "none".into(),
                n,
                trial: 0,
                seed: 0,
                l2_error: fitted.ok().and_then(|b| data.error_of(|x| b.evaluate_unchecked(x))),
                residual_norm: None,
                effective_rank: None,
                wall_time_ms: elapsed_ms(start),
            });
        }
    }
    Ok(records)
}

/// Fixed N, varying rank tolerance: rows ordered by (solver, tolerance,
/// trial). Each trial factors its design matrix once per solver and reuses
/// the factorization across the whole tolerance list.
pub fn run_tolerance_sweep(config: &ToleranceSweepConfig) -> Result<Vec<SweepRecord>> {
    config.validate()?;
    let data = Data::new(BenchmarkFunction::new(config.function)?, config.test_grid)?;
    let function = config.function.to_string();
    let n = config.neurons;
    let (xs, ys) = data.training(config.points_per_neuron * n)?;
    let trials: Vec<usize> = (0..config.trials).collect();

    // per_trial[t][s][k] for solver s and tolerance k
    let per_trial = ordered_map(&trials, |&trial| {
        let seed = trial_seed(config.seed, config.strategy, n, trial);
        let strategy = strategy_for(config.strategy, seed, config.gamma, config.centers);
        let problem = TrainingProblem::new(&xs, &ys, data.domain, n, &strategy).ok();
        config
            .solvers
            .iter()
            .map(|&solver| {
                let start = start_clock(config.record_wall_time);
                let rows = tolerance_rows(problem.as_ref(), solver, config, &data);
                let per_row = elapsed_ms(start).map(|t| t / config.tolerances.len() as f64);
                (seed, rows, per_row)
            })
            .collect::<Vec<_>>()
    });

    let mut records = Vec::new();
    for (s, &solver) in config.solvers.iter().enumerate() {
        let label = solver_label(solver, config.rank_rule);
        for (k, &tol) in config.tolerances.iter().enumerate() {
            for (trial, cells) in per_trial.iter().enumerate() {
                let (seed, rows, time) = &cells[s];
                let (l2, res, rank) = rows[k];
                records.push(SweepRecord {
                    function: function.clone(),
                    strategy: config.strategy.label().to_owned(),
                    solver: format!("{label}:{tol:e}"),
                    n,
                    trial,
                    seed: *seed,
                    l2_error: l2,
                    residual_norm: res,
                    effective_rank: rank,
                    wall_time_ms: *time,
                });
            }
        }
    }
    Ok(records)
}

type Row = (Option<f64>, Option<f64>, Option<usize>);

fn tolerance_rows(
    problem: Option<&TrainingProblem>,
    solver: SolverKind,
    config: &ToleranceSweepConfig,
    data: &Data,
) -> Vec<Row> {
    let failed = vec![(None, None, None); config.tolerances.len()];
    let Some(problem) = problem else { return failed };
    let solve: Box<dyn Fn(f64) -> (Vec<f64>, usize)> = match solver {
        SolverKind::Tsvd => match SvdFactorization::new(&problem.design) {
            Ok(svd) => Box::new(move |tol| svd.solve(&problem.rhs, tol)),
            Err(_) => return failed,
        },
        SolverKind::Cod => {
            let cod = CodFactorization::new(&problem.design);
            let rule = config.rank_rule;
            Box::new(move |tol| cod.solve(&problem.rhs, tol, rule))
        }
    };
    config
        .tolerances
        .iter()
        .map(|&tol| {
            let (w, rank) = solve(tol);
            let res = residual_norm(&problem.design, &w, &problem.rhs);
            let l2 = problem
                .model(&w)
                .ok()
                .and_then(|m| data.error_of(|x| m.evaluate_unchecked(x)));
            (l2, res.is_finite().then_some(res), Some(rank))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::baselines::BaselineKind;
    use crate::benchmarks::FunctionSpec;
    use crate::harness::records::write_csv;

    fn small(kind: StrategyKind) -> SweepConfig {
        SweepConfig {
            strategies: vec![kind],
            neurons: vec![5],
            trials: 1,
            ..SweepConfig::new(FunctionSpec::F1 { k: 10.0 })
        }
    }

    #[test]
    fn single_trial_shape() {
        let recs = run_convergence_sweep(&small(StrategyKind::FunctionAgnostic)).unwrap();
        assert_eq!(recs.len(), 1 + BaselineKind::ALL.len());
        let r = &recs[0];
        assert_eq!((r.strategy.as_str(), r.n, r.trial), ("agnostic", 5, 0));
        assert!(r.solver.starts_with("cod:auto="));
        assert!(r.l2_error.unwrap() >= 0.0);
        assert!(r.residual_norm.is_some() && r.effective_rank.is_some());
        assert!(r.wall_time_ms.is_none());
        for b in &recs[1..] {
            assert_eq!(b.solver, "none");
            assert!(b.l2_error.is_some());
        }
    }

    #[test]
    fn same_seed_same_bytes() {
        let cfg = SweepConfig {
            strategies: StrategyKind::ALL.to_vec(),
            neurons: vec![5, 10, 20],
            trials: 4,
            seed: 17,
            ..SweepConfig::new(FunctionSpec::F2 { k: 1.0 })
        };
        let bytes = |c: &SweepConfig| {
            let mut buf = Vec::new();
            write_csv(&run_convergence_sweep(c).unwrap(), &mut buf).unwrap();
            buf
        };
        let a = bytes(&cfg);
        assert_eq!(a, bytes(&cfg));
        assert_ne!(a, bytes(&SweepConfig { seed: 18, ..cfg.clone() }));
    }

    #[test]
    fn rows_follow_strategy_n_trial_order() {
        let cfg = SweepConfig {
            strategies: vec![StrategyKind::FunctionInformed, StrategyKind::Naive],
            neurons: vec![5, 10],
            trials: 3,
            baselines: vec![],
            ..SweepConfig::new(FunctionSpec::F1 { k: 10.0 })
        };
        let recs = run_convergence_sweep(&cfg).unwrap();
        let keys: Vec<_> = recs.iter().map(|r| (r.strategy.clone(), r.n, r.trial)).collect();
        let mut expected = Vec::new();
        for s in ["informed", "naive"] {
            for n in [5, 10] {
                for t in 0..3 {
                    expected.push((s.to_owned(), n, t));
                }
            }
        }
        assert_eq!(keys, expected);
    }

    #[test]
    fn trial_seeds_are_distinct() {
        let mut seen = std::collections::HashSet::new();
        for kind in StrategyKind::ALL {
            for n in [5, 10, 400] {
                for t in 0..50 {
                    assert!(seen.insert(trial_seed(3, kind, n, t)));
                }
            }
        }
    }

    #[test]
    fn failures_are_recorded_in_row() {
        // Slopes overflow for an absurd gamma, so parameter generation fails.
        let cfg = SweepConfig { gamma: 1e308, baselines: vec![], trials: 2, ..small(StrategyKind::FunctionInformed) };
        let recs = run_convergence_sweep(&cfg).unwrap();
        assert_eq!(recs.len(), 2);
        assert!(recs.iter().all(|r| r.failed() && r.residual_norm.is_none()));
    }

    #[test]
    fn wall_time_is_opt_in() {
        let cfg = SweepConfig { record_wall_time: true, baselines: vec![], ..small(StrategyKind::Naive) };
        let recs = run_convergence_sweep(&cfg).unwrap();
        assert!(recs[0].wall_time_ms.unwrap() >= 0.0);
    }

    #[test]
    fn tolerance_sweep_shape() {
        let cfg = ToleranceSweepConfig {
            neurons: 20,
            tolerances: vec![1e-8],
            trials: 1,
            ..ToleranceSweepConfig::new(FunctionSpec::F1 { k: 10.0 })
        };
        let recs = run_tolerance_sweep(&cfg).unwrap();
        assert_eq!(recs.len(), 2);
        assert_eq!(recs[0].solver, "svd:1e-8");
        assert_eq!(recs[1].solver, "cod_abs:1e-8");
        assert!(recs.iter().all(|r| r.l2_error.is_some()));
    }

    #[test]
    fn tolerance_sweep_matches_direct_solves() {
        let cfg = ToleranceSweepConfig {
            neurons: 15,
            tolerances: vec![1e-4, 1e-10],
            trials: 2,
            rank_rule: RankRule::Relative,
            ..ToleranceSweepConfig::new(FunctionSpec::F2 { k: 1.0 })
        };
        let recs = run_tolerance_sweep(&cfg).unwrap();
        assert_eq!(recs.len(), 8);
        let data = Data::new(BenchmarkFunction::new(cfg.function).unwrap(), cfg.test_grid).unwrap();
        let (xs, ys) = data.training(75).unwrap();
        for r in &recs {
            let strategy = SelectionStrategy::new(StrategyKind::FunctionInformed, r.seed);
            let problem = TrainingProblem::new(&xs, &ys, data.domain, 15, &strategy).unwrap();
            let (name, tol) = r.solver.split_once(':').unwrap();
            let solver = if name == "svd" { SolverKind::Tsvd } else { SolverKind::Cod };
            let options = SolveOptions { solver, tolerance: tol.parse().unwrap(), rank_rule: RankRule::Relative };
            let sol = problem.solve(options).unwrap();
            assert_eq!(Some(sol.effective_rank), r.effective_rank);
            assert_eq!(Some(sol.residual_norm), r.residual_norm);
        }
    }
}
