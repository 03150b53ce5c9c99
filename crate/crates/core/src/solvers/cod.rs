use nalgebra::DMatrix;

use super::householder::{apply_q, dot, qr_in_place};
use super::rrqr::PivotedQr;
use super::RankRule;

/// Complete orthogonal decomposition `R = Q [L 0; 0 0] S^T` built on a
/// pivoted QR. The pivoted factorization is tolerance independent, so one
/// factorization serves any number of truncation levels.
#[derive(Clone, Debug)]
pub struct CodFactorization {
    qr: PivotedQr,
}

impl CodFactorization {
    pub fn new(r: &DMatrix<f64>) -> Self {
        Self {
            qr: PivotedQr::new(r),
        }
    }

    pub fn pivoted_qr(&self) -> &PivotedQr {
        &self.qr
    }

    pub fn rank(&self, tol: f64, rule: RankRule) -> usize {
        self.qr.rank(tol, rule)
    }

    /// Minimum-norm solution at numerical rank `rank(tol, rule)`; returns the
    /// solution and the rank used.
    pub fn solve(&self, y: &[f64], tol: f64, rule: RankRule) -> (Vec<f64>, usize) {
        let rank = self.rank(tol, rule);
        (self.solve_at_rank(y, rank), rank)
    }

    pub fn solve_at_rank(&self, y: &[f64], rank: usize) -> Vec<f64> {
        let n = self.qr.cols();
        if rank == 0 {
            return vec![0.0; n];
        }

        // c = Q^T y, only the leading `rank` entries are used.
        let mut c = y.to_vec();
        self.qr.apply_qt(&mut c);

        // Second QR: [T11 T12]^T = V [U; 0], so [T11 T12] = U^T V^T with U^T
        // lower triangular.
        let mut tt = vec![0.0; n * rank];
        for i in 0..rank {
            for j in i..n {
                tt[i * n + j] = self.qr.t_entry(i, j);
            }
        }
        let taus = qr_in_place(&mut tt, n, rank);

        // Forward substitution on U^T u = c[..rank].
        let mut u = vec![0.0; n];
        for i in 0..rank {
            let col = &tt[i * n..i * n + i];
            let s = c[i] - dot(col, &u[..i]);
            u[i] = s / tt[i * n + i];
        }

        // z = V [u; 0], then undo the column pivoting.
        apply_q(&tt, n, &taus, &mut u);
        let mut w = vec![0.0; n];
        for (k, &j) in self.qr.permutation().iter().enumerate() {
            w[j] = u[k];
        }
        w
    }
}
