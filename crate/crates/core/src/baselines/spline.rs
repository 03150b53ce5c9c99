use crate::error::{ensure_finite, Error, Result};

/// Piecewise cubic with not-a-knot end conditions.
///
/// On `[x_i, x_{i+1}]` the value is `c0 + c1 t + c2 t^2 + c3 t^3` with
/// `t = x - x_i`. Outside the knot range the boundary cubic is extended.
#[derive(Clone, Debug, PartialEq)]
pub struct CubicSpline {
    knots: Vec<f64>,
    coeffs: Vec<[f64; 4]>,
}

impl CubicSpline {
    pub fn fit(knots: &[f64], values: &[f64]) -> Result<Self> {
        let n = knots.len();
        if n != values.len() {
            return Err(Error::shape(format!("{n} knots with {} values", values.len())));
        }
        if n < 4 {
            return Err(Error::invalid(format!("not-a-knot spline needs at least 4 knots, got {n}")));
        }
        for &x in knots {
            ensure_finite("spline knot", x)?;
        }
        for &v in values {
            ensure_finite("spline value", v)?;
        }
        if let Some(w) = knots.windows(2).find(|w| w[0] >= w[1]) {
            return Err(if w[0] == w[1] {
                Error::DuplicatePoint(w[0])
            } else {
                Error::invalid("knots must be strictly increasing")
            });
        }

        let h: Vec<f64> = knots.windows(2).map(|w| w[1] - w[0]).collect();
        let slope: Vec<f64> = values.windows(2).zip(&h).map(|(v, h)| (v[1] - v[0]) / h).collect();

        // Tridiagonal system for the knot derivatives s_i.
        let mut lower = vec![0.0; n];
        let mut diag = vec![0.0; n];
        let mut upper = vec![0.0; n];
        let mut rhs = vec![0.0; n];
        for i in 1..n - 1 {
            lower[i] = h[i];
            diag[i] = 2.0 * (h[i - 1] + h[i]);
            upper[i] = h[i - 1];
            rhs[i] = 3.0 * (h[i] * slope[i - 1] + h[i - 1] * slope[i]);
        }
        // Third-derivative continuity at the second and penultimate knots,
        // eliminated into a first and last row of the same bandwidth.
        let d = h[0] + h[1];
        diag[0] = h[1];
        upper[0] = d;
        rhs[0] = ((h[0] + 2.0 * d) * h[1] * slope[0] + h[0] * h[0] * slope[1]) / d;
        let (ha, hb) = (h[n - 3], h[n - 2]);
        let d = ha + hb;
        lower[n - 1] = d;
        diag[n - 1] = ha;
        rhs[n - 1] = (hb * hb * slope[n - 3] + (2.0 * d + hb) * ha * slope[n - 2]) / d;

        let s = solve_tridiagonal(&lower, &diag, &upper, &rhs)?;
        let coeffs = (0..n - 1)
            .map(|i| {
                let hi = h[i];
                [
                    values[i],
                    s[i],
                    (3.0 * slope[i] - 2.0 * s[i] - s[i + 1]) / hi,
                    (s[i] + s[i + 1] - 2.0 * slope[i]) / (hi * hi),
                ]
            })
            .collect();
        Ok(Self { knots: knots.to_vec(), coeffs })
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    /// Per-interval `[c0, c1, c2, c3]` in the local variable `x - x_i`.
    pub fn coefficients(&self) -> &[[f64; 4]] {
        &self.coeffs
    }

    /// True when `x` lies outside the knot range and is extrapolated.
    pub fn is_extrapolating(&self, x: f64) -> bool {
        x < self.knots[0] || x > self.knots[self.knots.len() - 1]
    }

    pub fn evaluate(&self, x: f64) -> Result<f64> {
        ensure_finite("x", x)?;
        Ok(self.evaluate_unchecked(x))
    }

    pub fn evaluate_unchecked(&self, x: f64) -> f64 {
        self.derivative(x, 0)
    }

    /// Derivative of order `0..=3` of the local cubic at `x`.
    pub fn derivative(&self, x: f64, order: usize) -> f64 {
        let i = self.interval_index(x);
        let [c0, c1, c2, c3] = self.coeffs[i];
        let t = x - self.knots[i];
        match order {
            0 => c0 + t * (c1 + t * (c2 + t * c3)),
            1 => c1 + t * (2.0 * c2 + t * 3.0 * c3),
            2 => 2.0 * c2 + 6.0 * c3 * t,
            3 => 6.0 * c3,
            _ => 0.0,
        }
    }

    fn interval_index(&self, x: f64) -> usize {
        let upper = self.knots.partition_point(|&k| k <= x);
        upper.saturating_sub(1).min(self.coeffs.len() - 1)
    }
}

/// Gaussian elimination with partial pivoting on a tridiagonal matrix; a
/// row swap introduces at most one extra superdiagonal.
fn solve_tridiagonal(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &[f64]) -> Result<Vec<f64>> {
    let n = diag.len();
    // Row i holds columns i, i+1, i+2 after elimination.
    let mut a = vec![[0.0f64; 3]; n];
    let mut sub = lower.to_vec();
    let mut b = rhs.to_vec();
    for i in 0..n {
        a[i] = [diag[i], if i + 1 < n { upper[i] } else { 0.0 }, 0.0];
    }
    for i in 0..n - 1 {
        // Candidate pivot rows: i (entry a[i][0]) and i+1 (entry sub[i+1]).
        if sub[i + 1].abs() > a[i][0].abs() {
            let next = [sub[i + 1], a[i + 1][0], a[i + 1][1]];
            sub[i + 1] = a[i][0];
            a[i + 1] = [a[i][1], a[i][2], 0.0];
            a[i] = next;
            b.swap(i, i + 1);
        }
        if a[i][0] == 0.0 {
            return Err(Error::Numerical("singular spline system".into()));
        }
        let m = sub[i + 1] / a[i][0];
        if m != 0.0 {
            a[i + 1][0] -= m * a[i][1];
            a[i + 1][1] -= m * a[i][2];
            b[i + 1] -= m * b[i];
        }
    }
    if a[n - 1][0] == 0.0 {
        return Err(Error::Numerical("singular spline system".into()));
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut s = b[i];
        if i + 1 < n {
            s -= a[i][1] * x[i + 1];
        }
        if i + 2 < n {
            s -= a[i][2] * x[i + 2];
        }
        x[i] = s / a[i][0];
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::linspace;
    use nalgebra::{DMatrix, DVector};

    // Independent formulation: unknown second derivatives M_i, with the
    // not-a-knot rows written as jumps of M' and a dense LU solve.
    fn moment_spline(x: &[f64], y: &[f64], at: f64) -> f64 {
        let n = x.len();
        let h: Vec<f64> = (0..n - 1).map(|i| x[i + 1] - x[i]).collect();
        let mut a = DMatrix::zeros(n, n);
        let mut b = DVector::zeros(n);
        for i in 1..n - 1 {
            a[(i, i - 1)] = h[i - 1] / 6.0;
            a[(i, i)] = (h[i - 1] + h[i]) / 3.0;
            a[(i, i + 1)] = h[i] / 6.0;
            b[i] = (y[i + 1] - y[i]) / h[i] - (y[i] - y[i - 1]) / h[i - 1];
        }
        a[(0, 0)] = -1.0 / h[0];
        a[(0, 1)] = 1.0 / h[0] + 1.0 / h[1];
        a[(0, 2)] = -1.0 / h[1];
        a[(n - 1, n - 3)] = -1.0 / h[n - 3];
        a[(n - 1, n - 2)] = 1.0 / h[n - 3] + 1.0 / h[n - 2];
        a[(n - 1, n - 1)] = -1.0 / h[n - 2];
        let m = a.lu().solve(&b).unwrap();
        let i = (0..n - 1).find(|&i| at <= x[i + 1]).unwrap_or(n - 2);
        let (t0, t1) = (x[i + 1] - at, at - x[i]);
        m[i] * t0.powi(3) / (6.0 * h[i])
            + m[i + 1] * t1.powi(3) / (6.0 * h[i])
            + (y[i] / h[i] - m[i] * h[i] / 6.0) * t0
            + (y[i + 1] / h[i] - m[i + 1] * h[i] / 6.0) * t1
    }

    #[test]
    fn cubic_is_reproduced() {
        let f = |x: f64| x * x * x - 2.0 * x;
        let knots = linspace(-1.5, 2.0, 10);
        let values: Vec<f64> = knots.iter().map(|&x| f(x)).collect();
        let s = CubicSpline::fit(&knots, &values).unwrap();
        for x in linspace(-1.5, 2.0, 777) {
            assert!((s.evaluate(x).unwrap() - f(x)).abs() <= 1e-12);
        }
    }

    #[test]
    fn linear_data_has_no_curvature() {
        let knots = [0.0, 0.3, 0.35, 1.0, 1.7, 2.0];
        let values: Vec<f64> = knots.iter().map(|x| 4.0 - 2.5 * x).collect();
        let s = CubicSpline::fit(&knots, &values).unwrap();
        for c in s.coefficients() {
            assert!(c[2].abs() <= 1e-12 && c[3].abs() <= 1e-12, "{c:?}");
        }
    }

    #[test]
    fn matches_moment_formulation() {
        let knots = linspace(0.0, 1.0, 20);
        let values: Vec<f64> = knots.iter().map(|x| x.sin()).collect();
        let s = CubicSpline::fit(&knots, &values).unwrap();
        for x in [0.237, 0.01, 0.5, 0.999] {
            let oracle = moment_spline(&knots, &values, x);
            assert!((s.evaluate(x).unwrap() - oracle).abs() <= 1e-12, "x={x}");
        }
    }

    #[test]
    fn interior_knots_are_c2() {
        let knots = linspace(-1.0, 1.0, 31);
        let values: Vec<f64> = knots.iter().map(|x| (5.0 * x).cos() + x * x).collect();
        let s = CubicSpline::fit(&knots, &values).unwrap();
        for i in 1..knots.len() - 1 {
            let x = knots[i];
            let [c0, c1, c2, c3] = s.coefficients()[i - 1];
            let h = x - knots[i - 1];
            let left = [
                c0 + h * (c1 + h * (c2 + h * c3)),
                c1 + h * (2.0 * c2 + 3.0 * h * c3),
                2.0 * c2 + 6.0 * h * c3,
            ];
            let right = s.coefficients()[i];
            assert!((left[0] - right[0]).abs() <= 1e-10);
            assert!((left[1] - right[1]).abs() <= 1e-10);
            assert!((left[2] - 2.0 * right[2]).abs() <= 1e-10);
        }
        // Not-a-knot: the third derivative does not jump at the second and
        // penultimate knots.
        let c = s.coefficients();
        assert!((c[0][3] - c[1][3]).abs() <= 1e-8 * c[0][3].abs().max(1.0));
        let m = c.len();
        assert!((c[m - 1][3] - c[m - 2][3]).abs() <= 1e-8 * c[m - 1][3].abs().max(1.0));
    }

    #[test]
    fn extrapolation_is_flagged() {
        let knots = [0.0, 1.0, 2.0, 3.0];
        let s = CubicSpline::fit(&knots, &[0.0, 1.0, 8.0, 27.0]).unwrap();
        assert!(s.is_extrapolating(-0.5) && s.is_extrapolating(3.5));
        assert!(!s.is_extrapolating(1.5));
        assert!((s.evaluate(4.0).unwrap() - 64.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(CubicSpline::fit(&[0.0, 1.0, 2.0], &[0.0; 3]).is_err());
        assert!(CubicSpline::fit(&[0.0, 1.0, 1.0, 2.0], &[0.0; 4]).is_err());
        assert!(CubicSpline::fit(&[0.0, 1.0, 2.0, 3.0], &[0.0; 3]).is_err());
    }
}
