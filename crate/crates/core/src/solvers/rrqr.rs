use nalgebra::DMatrix;

use super::householder::{apply_q, apply_qt, apply_reflector, make_reflector, norm2};
use super::RankRule;
use crate::error::{Error, Result};

/// Householder QR with column pivoting, `R P = Q T`, kept in packed form.
///
/// Columns are pivoted by largest remaining norm. Norms are downdated after
/// each step and recomputed from scratch when the downdate loses too much
/// accuracy.
#[derive(Clone, Debug)]
pub struct PivotedQr {
    factors: Vec<f64>,
    rows: usize,
    cols: usize,
    taus: Vec<f64>,
    perm: Vec<usize>,
}

impl PivotedQr {
    pub fn new(r: &DMatrix<f64>) -> Self {
        let (m, n) = r.shape();
        let mut a = r.as_slice().to_vec();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut norms: Vec<f64> = (0..n).map(|j| norm2(&a[j * m..(j + 1) * m])).collect();
        let mut ref_norms = norms.clone();
        let k_max = m.min(n);
        let mut taus = Vec::with_capacity(k_max);
        let tol3z = f64::EPSILON.sqrt();

        for k in 0..k_max {
            let p = k + argmax(&norms[k..]);
            if p != k {
                for i in 0..m {
                    a.swap(k * m + i, p * m + i);
                }
                perm.swap(k, p);
                norms.swap(k, p);
                ref_norms.swap(k, p);
            }

            let (left, right) = a.split_at_mut((k + 1) * m);
            let col = &mut left[k * m + k..(k + 1) * m];
            let tau = make_reflector(col);
            let v_tail = &col[1..];
            for c in 0..n - k - 1 {
                let target = &mut right[c * m + k..(c + 1) * m];
                apply_reflector(v_tail, tau, target);
            }
            taus.push(tau);

            for j in k + 1..n {
                if norms[j] == 0.0 {
                    continue;
                }
                let head = a[j * m + k].abs() / norms[j];
                let shrink = (1.0 - head * head).max(0.0);
                let ratio = norms[j] / ref_norms[j];
                if shrink * ratio * ratio <= tol3z {
                    let fresh = if k + 1 < m {
                        norm2(&a[j * m + k + 1..(j + 1) * m])
                    } else {
                        0.0
                    };
                    norms[j] = fresh;
                    ref_norms[j] = fresh;
                } else {
                    norms[j] *= shrink.sqrt();
                }
            }
        }

        Self {
            factors: a,
            rows: m,
            cols: n,
            taus,
            perm,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// `perm[k]` is the original column placed at position `k`.
    pub fn permutation(&self) -> &[usize] {
        &self.perm
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.taus.len())
            .map(|k| self.factors[k * self.rows + k])
            .collect()
    }

    /// Numerical rank: number of leading diagonal entries passing `rule`.
    pub fn rank(&self, tol: f64, rule: RankRule) -> usize {
        let diag = self.diagonal();
        let Some(&lead) = diag.first() else { return 0 };
        let threshold = match rule {
            RankRule::Relative => tol * lead.abs(),
            RankRule::Absolute => tol,
        };
        diag.iter().take_while(|d| d.abs() > threshold).count()
    }

    /// Upper-trapezoidal `T` (`min(m, n) x n`).
    pub fn t(&self) -> DMatrix<f64> {
        let k = self.taus.len();
        DMatrix::from_fn(k, self.cols, |i, j| {
            if i <= j {
                self.factors[j * self.rows + i]
            } else {
                0.0
            }
        })
    }

    /// Thin `Q` (`m x min(m, n)`), formed explicitly.
    pub fn q(&self) -> DMatrix<f64> {
        let k = self.taus.len();
        let mut q = DMatrix::zeros(self.rows, k);
        for j in 0..k {
            let mut e = vec![0.0; self.rows];
            e[j] = 1.0;
            apply_q(&self.factors, self.rows, &self.taus, &mut e);
            q.column_mut(j).copy_from_slice(&e);
        }
        q
    }

    pub fn apply_qt(&self, y: &mut [f64]) {
        apply_qt(&self.factors, self.rows, &self.taus, y);
    }

    /// Entry `T[i, j]` for `i <= j`.
    #[inline]
    pub(crate) fn t_entry(&self, i: usize, j: usize) -> f64 {
        self.factors[j * self.rows + i]
    }
}

/// Result of [`rrqr_decompose`]: `R P = Q T` with the rows of `T` below the
/// numerical rank zeroed.
#[derive(Clone, Debug)]
pub struct RrqrDecomposition {
    pub q: DMatrix<f64>,
    pub t: DMatrix<f64>,
    /// `perm[k]` is the original column at pivoted position `k`.
    pub perm: Vec<usize>,
    pub rank: usize,
}

impl RrqrDecomposition {
    /// Permutation matrix `P` with `(R P)[:, k] = R[:, perm[k]]`.
    pub fn permutation_matrix(&self) -> DMatrix<f64> {
        let n = self.perm.len();
        let mut p = DMatrix::zeros(n, n);
        for (k, &j) in self.perm.iter().enumerate() {
            p[(j, k)] = 1.0;
        }
        p
    }
}

/// Rank-revealing QR with the relative rank rule `|T_kk| > tol |T_00|`.
pub fn rrqr_decompose(r: &DMatrix<f64>, tol: f64) -> Result<RrqrDecomposition> {
    rrqr_decompose_with(r, tol, RankRule::Relative)
}

pub fn rrqr_decompose_with(r: &DMatrix<f64>, tol: f64, rule: RankRule) -> Result<RrqrDecomposition> {
    super::check_tolerance(tol)?;
    if r.is_empty() {
        return Err(Error::shape("empty matrix"));
    }
    let qr = PivotedQr::new(r);
    let rank = qr.rank(tol, rule);
    let mut t = qr.t();
    for i in rank..t.nrows() {
        t.row_mut(i).fill(0.0);
    }
    Ok(RrqrDecomposition {
        q: qr.q(),
        t,
        perm: qr.permutation().to_vec(),
        rank,
    })
}

fn argmax(v: &[f64]) -> usize {
    v.iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |(bi, bv), (i, &x)| if x > bv { (i, x) } else { (bi, bv) })
        .0
}
