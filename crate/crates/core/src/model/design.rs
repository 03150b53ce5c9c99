use nalgebra::DMatrix;

use super::Activation;
use crate::error::{ensure_finite, Error, Result};

/// Collocation matrix of a shallow network: column 0 is all ones (the output
/// offset), column `j >= 1` holds `psi(alpha_j x_i + beta_j)`.
#[derive(Clone, Debug, PartialEq)]
pub struct DesignMatrix {
    entries: DMatrix<f64>,
    sample_points: Vec<f64>,
}

impl DesignMatrix {
    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn into_entries(self) -> DMatrix<f64> {
        self.entries
    }

    pub fn sample_points(&self) -> &[f64] {
        &self.sample_points
    }

    pub fn rows(&self) -> usize {
        self.entries.nrows()
    }

    pub fn cols(&self) -> usize {
        self.entries.ncols()
    }

    /// `R * wtilde`, i.e. the network at every sample point.
    pub fn apply(&self, wtilde: &[f64]) -> Vec<f64> {
        assert_eq!(wtilde.len(), self.cols());
        let mut out = vec![0.0; self.rows()];
        for (j, &w) in wtilde.iter().enumerate() {
            for (o, &r) in out.iter_mut().zip(self.entries.column(j).iter()) {
                *o += r * w;
            }
        }
        out
    }
}

/// Assembles the design matrix for the given internal parameters. Points must
/// be finite and pairwise distinct; row order follows `sample_points`.
pub fn build_design_matrix(
    alphas: &[f64],
    betas: &[f64],
    sample_points: &[f64],
) -> Result<DesignMatrix> {
    build_with(Activation::LogisticSigmoid, alphas, betas, sample_points)
}

pub(crate) fn build_with(
    act: Activation,
    alphas: &[f64],
    betas: &[f64],
    sample_points: &[f64],
) -> Result<DesignMatrix> {
    if alphas.len() != betas.len() {
        return Err(Error::shape(format!(
            "{} internal weights but {} biases",
            alphas.len(),
            betas.len()
        )));
    }
    check_distinct(sample_points)?;
    Ok(DesignMatrix {
        entries: assemble(act, alphas, betas, sample_points),
        sample_points: sample_points.to_vec(),
    })
}

/// Matrix assembly without the distinctness check; used for dense test grids
/// where only the product with a solution is needed.
pub(crate) fn assemble(act: Activation, alphas: &[f64], betas: &[f64], points: &[f64]) -> DMatrix<f64> {
    let rows = points.len();
    let mut m = DMatrix::<f64>::zeros(rows, alphas.len() + 1);
    m.column_mut(0).fill(1.0);
    for (j, (&a, &b)) in alphas.iter().zip(betas).enumerate() {
        for (dst, &x) in m.column_mut(j + 1).iter_mut().zip(points) {
            *dst = act.value(a * x + b);
        }
    }
    m
}

pub(crate) fn check_distinct(points: &[f64]) -> Result<()> {
    for &x in points {
        ensure_finite("sample point", x)?;
    }
    let mut sorted = points.to_vec();
    sorted.sort_by(f64::total_cmp);
    if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
        return Err(Error::DuplicatePoint(w[0]));
    }
    Ok(())
}
