//! Dense polynomial helpers in the monomial basis, coefficients in
//! increasing degree.

use crate::error::{Error, Result};
use crate::model::Interval;

/// Degree above which the Chebyshev-to-monomial conversion loses too many
/// digits to be trusted.
pub const MAX_WELL_CONDITIONED_DEGREE: usize = 30;

pub fn poly_eval(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

pub fn poly_add(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len().max(b.len())];
    for (o, v) in out.iter_mut().zip(a) {
        *o += v;
    }
    for (o, v) in out.iter_mut().zip(b) {
        *o += v;
    }
    out
}

pub fn poly_mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Coefficients of `p(slope * x + shift)`, by Horner on polynomials.
pub fn poly_compose_affine(p: &[f64], slope: f64, shift: f64) -> Vec<f64> {
    let inner = [shift, slope];
    let mut acc: Vec<f64> = Vec::new();
    for &c in p.iter().rev() {
        acc = poly_add(&poly_mul(&acc, &inner), &[c]);
    }
    acc
}

/// Degree-`n` Chebyshev interpolant of `f` on `interval` (at the `n + 1`
/// Chebyshev-Lobatto points), returned in monomial coefficients of `x`.
///
/// The monomial conversion loses accuracy quickly with degree; degrees above
/// [`MAX_WELL_CONDITIONED_DEGREE`] are refused.
pub fn chebyshev_proxy(f: impl Fn(f64) -> f64, interval: Interval, n: usize) -> Result<Vec<f64>> {
    if n > MAX_WELL_CONDITIONED_DEGREE {
        return Err(Error::invalid(format!(
            "degree {n} exceeds {MAX_WELL_CONDITIONED_DEGREE}; the monomial conversion is too ill-conditioned"
        )));
    }
    let values: Vec<f64> = if n == 0 {
        vec![f(interval.midpoint())]
    } else {
        (0..=n)
            .map(|k| interval.denormalize((std::f64::consts::PI * k as f64 / n as f64).cos()))
            .map(&f)
            .collect()
    };
    if let Some(&v) = values.iter().find(|v| !v.is_finite()) {
        return Err(Error::NonFinite { what: "proxy sample", value: v });
    }
    if n == 0 {
        return Ok(values);
    }

    // Chebyshev coefficients from Lobatto samples (discrete cosine sums with
    // halved end terms).
    let nf = n as f64;
    let mut cheb: Vec<f64> = (0..=n)
        .map(|j| {
            let s: f64 = values
                .iter()
                .enumerate()
                .map(|(k, &v)| {
                    let w = if k == 0 || k == n { 0.5 } else { 1.0 };
                    w * v * (std::f64::consts::PI * (j * k) as f64 / nf).cos()
                })
                .sum();
            2.0 * s / nf
        })
        .collect();
    cheb[0] *= 0.5;
    cheb[n] *= 0.5;

    // Monomials in t = (2x - a - b) / (b - a), via T_{k+1} = 2 t T_k - T_{k-1}.
    let mut in_t = vec![0.0; n + 1];
    let (mut prev, mut cur) = (vec![1.0], vec![0.0, 1.0]);
    in_t[0] += cheb[0];
    for (j, &c) in cheb.iter().enumerate().skip(1) {
        if j > 1 {
            let next = poly_add(&poly_mul(&cur, &[0.0, 2.0]), &prev.iter().map(|v| -v).collect::<Vec<_>>());
            prev = std::mem::replace(&mut cur, next);
        }
        for (o, &t) in in_t.iter_mut().zip(&cur) {
            *o += c * t;
        }
    }
    let slope = 2.0 / interval.width();
    let shift = -(interval.lo() + interval.hi()) / interval.width();
    let mut out = poly_compose_affine(&in_t, slope, shift);
    out.resize(n + 1, 0.0);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic() {
        assert_eq!(poly_eval(&[1.0, 2.0, 3.0], 2.0), 17.0);
        assert_eq!(poly_mul(&[1.0, 1.0], &[-1.0, 1.0]), vec![-1.0, 0.0, 1.0]);
        // (2x + 1)^2 = 4x^2 + 4x + 1
        assert_eq!(poly_compose_affine(&[0.0, 0.0, 1.0], 2.0, 1.0), vec![1.0, 4.0, 4.0]);
    }

    #[test]
    fn reproduces_polynomials() {
        let unit = Interval::unit();
        let c = chebyshev_proxy(|x| x * x, unit, 2).unwrap();
        for (a, b) in c.iter().zip([0.0, 0.0, 1.0]) {
            assert!((a - b).abs() <= 1e-12);
        }
        for n in [0, 1, 4, 9] {
            let c = chebyshev_proxy(|_| 5.0, Interval::new(-1.0, 2.0).unwrap(), n).unwrap();
            assert!((c[0] - 5.0).abs() <= 1e-12);
            assert!(c[1..].iter().all(|v| v.abs() <= 1e-12));
        }
        let d = Interval::new(-0.5, 3.0).unwrap();
        let cubic = |x: f64| 1.0 - 2.0 * x + 0.5 * x * x * x;
        let c = chebyshev_proxy(cubic, d, 5).unwrap();
        for (a, b) in c.iter().zip([1.0, -2.0, 0.0, 0.5, 0.0, 0.0]) {
            assert!((a - b).abs() <= 1e-11, "{c:?}");
        }
    }

    #[test]
    fn high_degree_is_refused() {
        let d = Interval::unit();
        assert!(chebyshev_proxy(f64::exp, d, MAX_WELL_CONDITIONED_DEGREE).is_ok());
        assert!(chebyshev_proxy(f64::exp, d, MAX_WELL_CONDITIONED_DEGREE + 1).is_err());
    }

    #[test]
    fn exponential_is_approximated() {
        let c = chebyshev_proxy(f64::exp, Interval::unit(), 10).unwrap();
        let max = (0..=2000)
            .map(|i| -1.0 + i as f64 / 1000.0)
            .map(|x| (poly_eval(&c, x) - x.exp()).abs())
            .fold(0.0, f64::max);
        assert!(max < 1e-9, "{max}");
    }
}
