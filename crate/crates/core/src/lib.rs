//! Random projection neural networks (RPNNs) for one-dimensional function
//! approximation.
//!
//! An RPNN is a single hidden layer network whose internal weights and biases
//! are fixed once generated; only the linear readout (weights plus an output
//! offset) is trained, by a minimum-norm least-squares solve. The crate
//! provides:
//!
//! * [`model`]: the network, its collocation (design) matrix and a stacked
//!   fixed-layer variant;
//! * [`selection`]: naive, function-agnostic and function-informed generation
//!   of the internal parameters;
//! * [`solvers`]: truncated SVD and complete orthogonal decomposition solves
//!   with explicit rank tolerances;
//! * [`baselines`]: Legendre-grid barycentric interpolation and not-a-knot
//!   cubic splines;
//! * [`benchmarks`]: the five target functions, including the Cole series
//!   solution of viscous Burgers;
//! * [`theorem`]: executable checks of exact interpolation and polynomial
//!   mimicry;
//! * [`harness`]: Monte-Carlo convergence and tolerance sweeps with CSV
//!   output.

pub mod baselines;
pub mod benchmarks;
mod error;
pub mod harness;
pub mod model;
mod rng;
pub mod selection;
pub mod solvers;
pub mod theorem;
pub mod train;

pub use error::{Error, Result};
pub use model::{Activation, DeepRpnnModel, DesignMatrix, Interval, RpnnModel};
pub use selection::{CenterPlacement, GeneratedParams, SelectionStrategy, StrategyKind};
pub use solvers::{LeastSquaresSolution, RankRule, SolverKind};
