//! Minimum-norm least-squares solves of `R w = y`.
//!
//! Two routes are provided: a truncated SVD pseudo-inverse, which keeps the
//! singular values above an absolute tolerance, and a complete orthogonal
//! decomposition (pivoted QR followed by a QR of the transposed leading rows),
//! which truncates on the diagonal of the pivoted triangular factor.

mod cod;
mod householder;
mod rrqr;
mod tsvd;

pub use cod::CodFactorization;
pub use rrqr::{rrqr_decompose, rrqr_decompose_with, PivotedQr, RrqrDecomposition};
pub use tsvd::SvdFactorization;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverKind {
    #[serde(alias = "svd")]
    Tsvd,
    Cod,
}

impl SolverKind {
    pub fn label(self) -> &'static str {
        match self {
            SolverKind::Tsvd => "svd",
            SolverKind::Cod => "cod",
        }
    }

    pub fn from_label(s: &str) -> Result<Self> {
        match s {
            "svd" | "tsvd" => Ok(Self::Tsvd),
            "cod" => Ok(Self::Cod),
            other => Err(Error::invalid(format!("unknown solver '{other}'"))),
        }
    }
}

/// How a tolerance is compared with the diagonal of the pivoted triangular
/// factor.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RankRule {
    /// `|T_kk| > tol * |T_00|`.
    #[default]
    Relative,
    /// `|T_kk| > tol`, the same rule the truncated SVD applies to singular
    /// values.
    Absolute,
}

impl RankRule {
    pub fn label(self) -> &'static str {
        match self {
            RankRule::Relative => "relative",
            RankRule::Absolute => "absolute",
        }
    }

    pub fn from_label(s: &str) -> Result<Self> {
        match s {
            "relative" | "rel" => Ok(Self::Relative),
            "absolute" | "abs" => Ok(Self::Absolute),
            other => Err(Error::invalid(format!("unknown rank rule '{other}'"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LeastSquaresSolution {
    /// `(offset, w_1, ..., w_N)` for a design matrix with the offset column
    /// first.
    pub wtilde: Vec<f64>,
    pub residual_norm: f64,
    pub effective_rank: usize,
    pub method: SolverKind,
    pub tolerance: f64,
}

impl LeastSquaresSolution {
    /// Nothing survived the truncation; `wtilde` is zero.
    pub fn is_rank_zero(&self) -> bool {
        self.effective_rank == 0
    }
}

pub(crate) fn check_tolerance(tol: f64) -> Result<()> {
    if tol > 0.0 && tol.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(format!("tolerance must be positive and finite, got {tol}")))
    }
}

fn check_rhs(r: &DMatrix<f64>, y: &[f64]) -> Result<()> {
    if r.is_empty() {
        return Err(Error::shape("empty matrix"));
    }
    if y.len() != r.nrows() {
        return Err(Error::shape(format!(
            "right-hand side of length {} for {} rows",
            y.len(),
            r.nrows()
        )));
    }
    if let Some(&v) = y.iter().find(|v| !v.is_finite()) {
        return Err(Error::NonFinite { what: "right-hand side", value: v });
    }
    Ok(())
}

/// `||R w - y||_2`.
pub fn residual_norm(r: &DMatrix<f64>, w: &[f64], y: &[f64]) -> f64 {
    let mut res: Vec<f64> = y.iter().map(|v| -v).collect();
    for (j, &wj) in w.iter().enumerate() {
        if wj == 0.0 {
            continue;
        }
        for (o, &rij) in res.iter_mut().zip(r.column(j).iter()) {
            *o += rij * wj;
        }
    }
    householder::norm2(&res)
}

/// Truncated-SVD solve keeping singular values `> tol`.
pub fn tsvd_solve(r: &DMatrix<f64>, y: &[f64], tol: f64) -> Result<LeastSquaresSolution> {
    check_tolerance(tol)?;
    check_rhs(r, y)?;
    let svd = SvdFactorization::new(r)?;
    Ok(finish(r, y, svd.solve(y, tol), SolverKind::Tsvd, tol))
}

/// Complete-orthogonal-decomposition solve with the relative rank rule.
pub fn cod_solve(r: &DMatrix<f64>, y: &[f64], tol: f64) -> Result<LeastSquaresSolution> {
    cod_solve_with(r, y, tol, RankRule::Relative)
}

pub fn cod_solve_with(
    r: &DMatrix<f64>,
    y: &[f64],
    tol: f64,
    rule: RankRule,
) -> Result<LeastSquaresSolution> {
    check_tolerance(tol)?;
    check_rhs(r, y)?;
    let cod = CodFactorization::new(r);
    Ok(finish(r, y, cod.solve(y, tol, rule), SolverKind::Cod, tol))
}

/// Dispatches on `kind`; `rule` only affects the COD route.
pub fn solve(
    kind: SolverKind,
    r: &DMatrix<f64>,
    y: &[f64],
    tol: f64,
    rule: RankRule,
) -> Result<LeastSquaresSolution> {
    match kind {
        SolverKind::Tsvd => tsvd_solve(r, y, tol),
        SolverKind::Cod => cod_solve_with(r, y, tol, rule),
    }
}

pub(crate) fn finish(
    r: &DMatrix<f64>,
    y: &[f64],
    (wtilde, rank): (Vec<f64>, usize),
    method: SolverKind,
    tolerance: f64,
) -> LeastSquaresSolution {
    LeastSquaresSolution {
        residual_norm: residual_norm(r, &wtilde, y),
        wtilde,
        effective_rank: rank,
        method,
        tolerance,
    }
}

/// Spacing between `|x|` and the next larger double (MATLAB's `eps(x)`).
pub fn ulp(x: f64) -> f64 {
    let a = x.abs();
    if !a.is_finite() {
        return f64::NAN;
    }
    if a < f64::MIN_POSITIVE {
        // subnormal spacing
        return f64::from_bits(1);
    }
    let exponent_only = f64::from_bits(a.to_bits() & 0x7ff0_0000_0000_0000);
    exponent_only * f64::EPSILON
}

/// `n * ulp(norm) / 1000`, the default rank tolerance for `n` data points.
pub fn default_tolerance_from_norm(norm: f64, n: usize) -> f64 {
    n as f64 * ulp(norm) / 1000.0
}

/// Default rank tolerance `n * eps(||R||_2) / 1000`.
pub fn default_tolerance(r: &DMatrix<f64>, n: usize) -> f64 {
    default_tolerance_from_norm(spectral_norm(r), n)
}

/// `||R||_2` by power iteration on `R^T R`.
pub fn spectral_norm(r: &DMatrix<f64>) -> f64 {
    let (m, n) = r.shape();
    if m == 0 || n == 0 {
        return 0.0;
    }
    // Fixed irregular start vector so symmetric matrices like [1, -1] are
    // not started orthogonal to their dominant singular vector.
    let mut v: Vec<f64> = (0..n)
        .map(|j| 1.0 + 0.5 * ((j as f64) * 1.618_033_988_749_895).fract())
        .collect();
    let mut rv = vec![0.0; m];
    let mut sigma = 0.0;
    for _ in 0..500 {
        rv.iter_mut().for_each(|x| *x = 0.0);
        for (j, &vj) in v.iter().enumerate() {
            for (o, &rij) in rv.iter_mut().zip(r.column(j).iter()) {
                *o += rij * vj;
            }
        }
        for (j, vj) in v.iter_mut().enumerate() {
            *vj = householder::dot(r.column(j).as_slice(), &rv);
        }
        let norm_w = householder::norm2(&v);
        if norm_w == 0.0 {
            return 0.0;
        }
        v.iter_mut().for_each(|x| *x /= norm_w);
        let next = norm_w.sqrt();
        if (next - sigma).abs() <= 1e-13 * next {
            return next;
        }
        sigma = next;
    }
    sigma
}

#[cfg(test)]
mod tests;
