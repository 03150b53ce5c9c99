use nalgebra::{DMatrix, SVD};

use super::householder::{apply_qt, qr_in_place};
use crate::error::{Error, Result};

/// Thin SVD `R = U diag(s) V^T` prepared for truncated solves.
///
/// Tall matrices are first reduced by an unpivoted Householder QR and the SVD
/// is taken of the square triangular factor, so `U` is never formed.
#[derive(Clone, Debug)]
pub struct SvdFactorization {
    rows: usize,
    cols: usize,
    // Present for tall inputs: packed QR of R.
    qr: Option<(Vec<f64>, Vec<f64>)>,
    u: DMatrix<f64>,
    singular_values: Vec<f64>,
    v_t: DMatrix<f64>,
}

impl SvdFactorization {
    pub fn new(r: &DMatrix<f64>) -> Result<Self> {
        let (m, n) = r.shape();
        if m == 0 || n == 0 {
            return Err(Error::shape("empty matrix"));
        }
        let (qr, core) = if m > n {
            let mut data = r.as_slice().to_vec();
            let taus = qr_in_place(&mut data, m, n);
            let upper = DMatrix::from_fn(n, n, |i, j| if i <= j { data[j * m + i] } else { 0.0 });
            (Some((data, taus)), upper)
        } else {
            (None, r.clone())
        };
        let svd = SVD::try_new(core, true, true, f64::EPSILON, 0)
            .ok_or_else(|| Error::Numerical("SVD did not converge".into()))?;
        Ok(Self {
            rows: m,
            cols: n,
            qr,
            u: svd.u.expect("requested U"),
            singular_values: svd.singular_values.as_slice().to_vec(),
            v_t: svd.v_t.expect("requested V^T"),
        })
    }

    pub fn singular_values(&self) -> &[f64] {
        &self.singular_values
    }

    /// Number of singular values strictly above `tol`.
    pub fn rank(&self, tol: f64) -> usize {
        self.singular_values.iter().filter(|&&s| s > tol).count()
    }

    /// `V_q diag(1/s_q) U_q^T y` over singular values above `tol`.
    pub fn solve(&self, y: &[f64], tol: f64) -> (Vec<f64>, usize) {
        assert_eq!(y.len(), self.rows);
        let reduced: Vec<f64> = match &self.qr {
            Some((data, taus)) => {
                let mut c = y.to_vec();
                apply_qt(data, self.rows, taus, &mut c);
                c.truncate(self.cols);
                c
            }
            None => y.to_vec(),
        };
        let mut w = vec![0.0; self.cols];
        let mut rank = 0;
        for (i, &s) in self.singular_values.iter().enumerate() {
            if s <= tol {
                continue;
            }
            rank += 1;
            let coeff = self
                .u
                .column(i)
                .iter()
                .zip(&reduced)
                .map(|(a, b)| a * b)
                .sum::<f64>()
                / s;
            for (wj, vj) in w.iter_mut().zip(self.v_t.row(i).iter()) {
                *wj += coeff * vj;
            }
        }
        (w, rank)
    }
}
