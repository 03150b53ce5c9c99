//! The fitting pipeline: generate internal parameters, assemble the design
//! matrix on the training abscissae and solve for the readout.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{build_design_matrix, Interval, RpnnModel};
use crate::selection::{output_range, Coordinates, GeneratedParams, SelectionStrategy};
use crate::solvers::{self, default_tolerance, LeastSquaresSolution, RankRule, SolverKind};

/// Rank tolerance: the data-size rule `n * eps(||R||_2) / 1000` or a fixed
/// value.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TolSerde", into = "TolSerde")]
pub enum Tolerance {
    #[default]
    Auto,
    Fixed(f64),
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum TolSerde {
    Named(String),
    Value(f64),
}

impl TryFrom<TolSerde> for Tolerance {
    type Error = Error;

    fn try_from(v: TolSerde) -> Result<Self> {
        match v {
            TolSerde::Named(s) => s.parse(),
            TolSerde::Value(x) => Tolerance::fixed(x),
        }
    }
}

impl From<Tolerance> for TolSerde {
    fn from(t: Tolerance) -> Self {
        match t {
            Tolerance::Auto => TolSerde::Named("auto".into()),
            Tolerance::Fixed(x) => TolSerde::Value(x),
        }
    }
}

impl Tolerance {
    pub fn fixed(tol: f64) -> Result<Self> {
        solvers::check_tolerance(tol)?;
        Ok(Tolerance::Fixed(tol))
    }

    /// The concrete tolerance for `r` built on `n` data points.
    pub fn resolve(self, r: &DMatrix<f64>, n: usize) -> Result<f64> {
        match self {
            Tolerance::Fixed(t) => Ok(t),
            Tolerance::Auto => {
                let t = default_tolerance(r, n);
                if t > 0.0 {
                    Ok(t)
                } else {
                    Err(Error::Numerical("default tolerance vanished; supply an explicit one".into()))
                }
            }
        }
    }
}

impl FromStr for Tolerance {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "auto" {
            return Ok(Tolerance::Auto);
        }
        let v: f64 = s
            .parse()
            .map_err(|_| Error::invalid(format!("tolerance must be 'auto' or a number, got '{s}'")))?;
        Tolerance::fixed(v)
    }
}

impl fmt::Display for Tolerance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tolerance::Auto => f.write_str("auto"),
            Tolerance::Fixed(t) => write!(f, "{t:e}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolveOptions {
    pub solver: SolverKind,
    #[serde(default)]
    pub tolerance: Tolerance,
    #[serde(default)]
    pub rank_rule: RankRule,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            solver: SolverKind::Cod,
            tolerance: Tolerance::Auto,
            rank_rule: RankRule::Relative,
        }
    }
}

/// A training problem before the solve: internal parameters, the design
/// matrix in the parameters' coordinates and the matching right-hand side.
#[derive(Clone, Debug)]
pub struct TrainingProblem {
    pub params: GeneratedParams,
    pub design: DMatrix<f64>,
    pub rhs: Vec<f64>,
    pub domain: Interval,
    /// Set when inputs and outputs were normalized.
    pub output_range: Option<Interval>,
}

impl TrainingProblem {
    /// Generates `neurons` internal parameters with `strategy` and assembles
    /// the system for the samples `(xs, ys)`.
    pub fn new(
        xs: &[f64],
        ys: &[f64],
        domain: Interval,
        neurons: usize,
        strategy: &SelectionStrategy,
    ) -> Result<Self> {
        if xs.len() != ys.len() || xs.is_empty() {
            return Err(Error::shape(format!("{} abscissae with {} values", xs.len(), ys.len())));
        }
        if let Some(&y) = ys.iter().find(|y| !y.is_finite()) {
            return Err(Error::NonFinite { what: "training value", value: y });
        }
        let samples: Vec<(f64, f64)> = xs.iter().copied().zip(ys.iter().copied()).collect();
        let params = strategy.generate(neurons, domain, &samples)?;
        let (points, rhs, range) = match params.coordinates {
            Coordinates::Raw => (xs.to_vec(), ys.to_vec(), None),
            Coordinates::Normalized => {
                let range = output_range(ys)?;
                (
                    domain.normalize_all(xs),
                    ys.iter().map(|&y| range.normalize(y)).collect(),
                    Some(range),
                )
            }
        };
        let design = build_design_matrix(&params.alphas, &params.betas, &points)?.into_entries();
        Ok(Self { params, design, rhs, domain, output_range: range })
    }

    pub fn data_points(&self) -> usize {
        self.rhs.len()
    }

    pub fn resolve_tolerance(&self, tolerance: Tolerance) -> Result<f64> {
        tolerance.resolve(&self.design, self.data_points())
    }

    pub fn solve(&self, options: SolveOptions) -> Result<LeastSquaresSolution> {
        let tol = self.resolve_tolerance(options.tolerance)?;
        solvers::solve(options.solver, &self.design, &self.rhs, tol, options.rank_rule)
    }

    /// Wraps a readout `wtilde = (offset, w)` into a model.
    pub fn model(&self, wtilde: &[f64]) -> Result<RpnnModel> {
        RpnnModel::from_solution(
            self.params.alphas.clone(),
            self.params.betas.clone(),
            wtilde,
            self.domain,
            self.output_range,
        )
    }
}

/// A trained network with the solve that produced it.
#[derive(Clone, Debug)]
pub struct Fit {
    pub model: RpnnModel,
    pub solution: LeastSquaresSolution,
}

/// Trains a network on the samples `(xs, ys)`.
pub fn fit_samples(
    xs: &[f64],
    ys: &[f64],
    domain: Interval,
    neurons: usize,
    strategy: &SelectionStrategy,
    options: SolveOptions,
) -> Result<Fit> {
    let problem = TrainingProblem::new(xs, ys, domain, neurons, strategy)?;
    let solution = problem.solve(options)?;
    let model = problem.model(&solution.wtilde)?;
    Ok(Fit { model, solution })
}

/// Trains on `points` equally spaced samples of `f` over `domain`.
pub fn fit_function(
    f: impl Fn(f64) -> f64,
    domain: Interval,
    neurons: usize,
    points: usize,
    strategy: &SelectionStrategy,
    options: SolveOptions,
) -> Result<Fit> {
    let xs = domain.linspace(points);
    let ys: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
    fit_samples(&xs, &ys, domain, neurons, strategy, options)
}
