use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::baselines::BaselineKind;
use crate::benchmarks::FunctionSpec;
use crate::error::{Error, Result};
use crate::selection::{CenterPlacement, SelectionStrategy, StrategyKind};
use crate::solvers::{RankRule, SolverKind};
use crate::train::{SolveOptions, Tolerance};

pub const DEFAULT_NEURONS: [usize; 8] = [5, 10, 20, 40, 80, 160, 320, 400];
pub const DEFAULT_TOLERANCES: [f64; 9] = [1e-4, 1e-6, 1e-8, 1e-10, 1e-12, 1e-13, 1e-14, 1e-15, 1e-16];

fn default_strategies() -> Vec<StrategyKind> {
    StrategyKind::ALL.to_vec()
}

fn default_neurons() -> Vec<usize> {
    DEFAULT_NEURONS.to_vec()
}

fn default_trials() -> usize {
    100
}

fn default_points_per_neuron() -> usize {
    5
}

fn default_test_grid() -> usize {
    10_000
}

fn default_baselines() -> Vec<BaselineKind> {
    BaselineKind::ALL.to_vec()
}

fn default_gamma() -> f64 {
    SelectionStrategy::DEFAULT_GAMMA
}

fn default_solver() -> SolverKind {
    SolverKind::Cod
}

/// A Monte-Carlo convergence sweep over network sizes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub function: FunctionSpec,
    #[serde(default = "default_strategies")]
    pub strategies: Vec<StrategyKind>,
    /// Network sizes, strictly increasing.
    #[serde(default = "default_neurons")]
    pub neurons: Vec<usize>,
    #[serde(default = "default_trials")]
    pub trials: usize,
    /// Training set size is `points_per_neuron * N` equispaced points.
    #[serde(default = "default_points_per_neuron")]
    pub points_per_neuron: usize,
    #[serde(default = "default_test_grid")]
    pub test_grid: usize,
    #[serde(default = "default_solver")]
    pub solver: SolverKind,
    #[serde(default)]
    pub tolerance: Tolerance,
    #[serde(default)]
    pub rank_rule: RankRule,
    #[serde(default = "default_baselines")]
    pub baselines: Vec<BaselineKind>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_gamma")]
    pub gamma: f64,
    #[serde(default)]
    pub centers: CenterPlacement,
    /// Wall-clock times make the output non-reproducible, so they are opt-in.
    #[serde(default)]
    pub record_wall_time: bool,
    #[serde(default)]
    pub output: Option<PathBuf>,
}

impl SweepConfig {
    pub fn new(function: FunctionSpec) -> Self {
        Self {
            function,
            strategies: default_strategies(),
            neurons: default_neurons(),
            trials: default_trials(),
            points_per_neuron: default_points_per_neuron(),
            test_grid: default_test_grid(),
            solver: default_solver(),
            tolerance: Tolerance::Auto,
            rank_rule: RankRule::Relative,
            baselines: default_baselines(),
            seed: 0,
            gamma: default_gamma(),
            centers: CenterPlacement::Uniform,
            record_wall_time: false,
            output: None,
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    pub fn solve_options(&self) -> SolveOptions {
        SolveOptions {
            solver: self.solver,
            tolerance: self.tolerance,
            rank_rule: self.rank_rule,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::invalid("trials must be at least 1"));
        }
        if self.neurons.is_empty() || self.neurons[0] == 0 {
            return Err(Error::invalid("the neuron list must be non-empty and positive"));
        }
        if self.neurons.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid("the neuron list must be strictly increasing"));
        }
        if self.test_grid < 10 {
            return Err(Error::invalid("the test grid needs at least 10 points"));
        }
        if self.points_per_neuron == 0 {
            return Err(Error::invalid("points_per_neuron must be at least 1"));
        }
        if self.strategies.is_empty() && self.baselines.is_empty() {
            return Err(Error::invalid("nothing to run: no strategies and no baselines"));
        }
        if !(self.gamma.is_finite()) {
            return Err(Error::invalid("gamma must be finite"));
        }
        Ok(())
    }
}

fn default_tolerances() -> Vec<f64> {
    DEFAULT_TOLERANCES.to_vec()
}

fn default_tol_solvers() -> Vec<SolverKind> {
    vec![SolverKind::Tsvd, SolverKind::Cod]
}

fn default_tol_neurons() -> usize {
    400
}

fn default_tol_strategy() -> StrategyKind {
    StrategyKind::FunctionInformed
}

fn absolute() -> RankRule {
    RankRule::Absolute
}

/// Fixed network size, varying rank tolerance, for both solvers.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceSweepConfig {
    pub function: FunctionSpec,
    #[serde(default = "default_tol_strategy")]
    pub strategy: StrategyKind,
    #[serde(default = "default_tol_neurons")]
    pub neurons: usize,
    #[serde(default = "default_tolerances")]
    pub tolerances: Vec<f64>,
    #[serde(default = "default_tol_solvers")]
    pub solvers: Vec<SolverKind>,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default = "default_points_per_neuron")]
    pub points_per_neuron: usize,
    #[serde(default = "default_test_grid")]
    pub test_grid: usize,
    /// Rank rule of the COD route; the absolute rule compares the same `eps`
    /// the truncated SVD applies to singular values.
    #[serde(default = "absolute")]
    pub rank_rule: RankRule,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_gamma")]
    pub gamma: f64,
    #[serde(default)]
    pub centers: CenterPlacement,
    #[serde(default)]
    pub record_wall_time: bool,
    #[serde(default)]
    pub output: Option<PathBuf>,
}

impl ToleranceSweepConfig {
    pub fn new(function: FunctionSpec) -> Self {
        Self {
            function,
            strategy: default_tol_strategy(),
            neurons: default_tol_neurons(),
            tolerances: default_tolerances(),
            solvers: default_tol_solvers(),
            trials: default_trials(),
            points_per_neuron: default_points_per_neuron(),
            test_grid: default_test_grid(),
            rank_rule: RankRule::Absolute,
            seed: 0,
            gamma: default_gamma(),
            centers: CenterPlacement::Uniform,
            record_wall_time: false,
            output: None,
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 || self.neurons == 0 || self.points_per_neuron == 0 {
            return Err(Error::invalid("trials, neurons and points_per_neuron must be at least 1"));
        }
        if self.tolerances.is_empty() || self.solvers.is_empty() {
            return Err(Error::invalid("need at least one tolerance and one solver"));
        }
        for &t in &self.tolerances {
            Tolerance::fixed(t)?;
        }
        if self.test_grid < 10 {
            return Err(Error::invalid("the test grid needs at least 10 points"));
        }
        Ok(())
    }
}
