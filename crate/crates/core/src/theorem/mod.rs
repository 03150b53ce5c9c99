//! Executable checks of the two constructive results behind RPNNs: exact
//! interpolation of `N + 1` distinct points by `N` neurons plus an offset,
//! and the polynomial mimicry system relating readout weights to the
//! coefficients of a target polynomial.

mod interpolation;
mod mimicry;
mod poly;

pub use interpolation::{exact_interpolation_check, interpolation_check_at, InterpolationCheck, INTERPOLATION_TOL};
pub use mimicry::{
    build_m, condition_number, mimic_weights, mimicry_experiment, mimicry_study, network_polynomial,
    MimicryProblem, MimicryReport, MimicrySolution, MimicrySummary, MAX_CONDITION,
};
pub use poly::{chebyshev_proxy, poly_add, poly_compose_affine, poly_eval, poly_mul, MAX_WELL_CONDITIONED_DEGREE};
