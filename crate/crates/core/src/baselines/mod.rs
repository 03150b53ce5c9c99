//! Classical comparators: polynomial interpolation on a Legendre grid and
//! not-a-knot cubic splines on equispaced knots.

mod barycentric;
mod legendre;
mod spline;

pub use barycentric::{barycentric_weights, BarycentricInterpolant};
pub use legendre::{legendre_nodes, legendre_with_derivative};
pub use spline::CubicSpline;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::Interval;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BaselineKind {
    Legendre,
    Spline,
}

impl BaselineKind {
    pub const ALL: [BaselineKind; 2] = [BaselineKind::Legendre, BaselineKind::Spline];

    pub fn label(self) -> &'static str {
        match self {
            BaselineKind::Legendre => "legendre",
            BaselineKind::Spline => "spline",
        }
    }

    pub fn from_label(s: &str) -> Result<Self> {
        match s {
            "legendre" => Ok(Self::Legendre),
            "spline" => Ok(Self::Spline),
            other => Err(Error::invalid(format!("unknown baseline '{other}'"))),
        }
    }
}

/// A fitted baseline approximant.
#[derive(Clone, Debug, PartialEq)]
pub enum Baseline {
    Legendre(BarycentricInterpolant),
    Spline(CubicSpline),
}

impl Baseline {
    pub fn kind(&self) -> BaselineKind {
        match self {
            Baseline::Legendre(_) => BaselineKind::Legendre,
            Baseline::Spline(_) => BaselineKind::Spline,
        }
    }

    pub fn evaluate(&self, x: f64) -> Result<f64> {
        match self {
            Baseline::Legendre(p) => p.evaluate(x),
            Baseline::Spline(s) => s.evaluate(x),
        }
    }

    pub fn evaluate_unchecked(&self, x: f64) -> f64 {
        match self {
            Baseline::Legendre(p) => p.evaluate_unchecked(x),
            Baseline::Spline(s) => s.evaluate_unchecked(x),
        }
    }
}

/// Degree-`n` interpolant of `f` on the Legendre grid mapped affinely onto
/// `domain`.
pub fn legendre_interpolant(f: impl Fn(f64) -> f64, domain: Interval, n: usize) -> Result<BarycentricInterpolant> {
    let nodes: Vec<f64> = legendre_nodes(n).into_iter().map(|t| domain.denormalize(t)).collect();
    let values: Vec<f64> = nodes.iter().map(|&x| f(x)).collect();
    BarycentricInterpolant::fit(&nodes, &values)
}

/// Not-a-knot spline of `f` on `knots` equispaced knots spanning `domain`.
pub fn equispaced_spline(f: impl Fn(f64) -> f64, domain: Interval, knots: usize) -> Result<CubicSpline> {
    let x = domain.linspace(knots);
    let y: Vec<f64> = x.iter().map(|&v| f(v)).collect();
    CubicSpline::fit(&x, &y)
}

/// Fits the baseline with `n + 1` degrees of freedom: `n + 1` Legendre nodes
/// or `n + 1` spline knots.
pub fn fit_baseline(kind: BaselineKind, f: impl Fn(f64) -> f64, domain: Interval, n: usize) -> Result<Baseline> {
    Ok(match kind {
        BaselineKind::Legendre => Baseline::Legendre(legendre_interpolant(f, domain, n)?),
        BaselineKind::Spline => Baseline::Spline(equispaced_spline(f, domain, n + 1)?),
    })
}
