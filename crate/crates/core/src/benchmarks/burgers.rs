use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::bessel::scaled_bessel_i_all;
use crate::error::{Error, Result};

/// Parameters of the Cole series for `u_t + u u_x = nu u_xx` on `[-1, 1]`
/// with `u(x, 0) = -sin(pi x)` and homogeneous boundary values.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BurgersSeriesConfig {
    #[serde(default = "default_viscosity")]
    pub viscosity: f64,
    pub time: f64,
    #[serde(default = "default_truncation_tol")]
    pub truncation_tol: f64,
    #[serde(default = "default_max_terms")]
    pub max_terms: usize,
}

fn default_viscosity() -> f64 {
    0.01 / PI
}

fn default_truncation_tol() -> f64 {
    1e-16
}

fn default_max_terms() -> usize {
    500
}

impl BurgersSeriesConfig {
    pub fn at_time(time: f64) -> Self {
        Self {
            viscosity: default_viscosity(),
            time,
            truncation_tol: default_truncation_tol(),
            max_terms: default_max_terms(),
        }
    }
}

impl Default for BurgersSeriesConfig {
    fn default() -> Self {
        Self::at_time(1.0 / PI)
    }
}

/// Largest tolerated ratio of the summed term magnitudes to the series
/// denominator before switching to quadrature. Beyond it the ratio itself
/// estimates how many digits the series has lost.
const MAX_CANCELLATION: f64 = 1e3;

/// How a value was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BurgersMethod {
    Series,
    Quadrature,
}

/// Evaluator with the scaled Bessel coefficients precomputed.
#[derive(Clone, Debug)]
pub struct BurgersSolution {
    config: BurgersSeriesConfig,
    // a_n e^{-n^2 pi^2 nu t} with the common e^{-z} factor removed, n >= 0.
    coeffs: Vec<f64>,
}

impl BurgersSolution {
    pub fn new(config: BurgersSeriesConfig) -> Result<Self> {
        let BurgersSeriesConfig { viscosity: nu, time: t, truncation_tol, max_terms } = config;
        if !(nu > 0.0 && nu.is_finite()) {
            return Err(Error::invalid(format!("viscosity must be positive, got {nu}")));
        }
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::invalid(format!("time must be positive, got {t}")));
        }
        if !(truncation_tol > 0.0) || max_terms == 0 {
            return Err(Error::invalid("truncation needs a positive tolerance and at least one term"));
        }
        let z = 1.0 / (2.0 * PI * nu);
        let bessel = scaled_bessel_i_all(max_terms, z)?;
        let coeffs = bessel
            .iter()
            .enumerate()
            .map(|(n, &b)| {
                let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
                let nf = n as f64;
                sign * b * (-nf * nf * PI * PI * nu * t).exp()
            })
            .collect();
        Ok(Self { config, coeffs })
    }

    pub fn config(&self) -> &BurgersSeriesConfig {
        &self.config
    }

    /// `u(x, t)`, odd in `x` by construction.
    pub fn evaluate(&self, x: f64) -> Result<f64> {
        Ok(self.evaluate_with_method(x)?.0)
    }

    pub fn evaluate_with_method(&self, x: f64) -> Result<(f64, BurgersMethod)> {
        if !x.is_finite() {
            return Err(Error::NonFinite { what: "x", value: x });
        }
        let ax = x.abs();
        let (series, cancellation) = self.series(ax)?;
        let (v, method) = if cancellation <= MAX_CANCELLATION {
            (series, BurgersMethod::Series)
        } else {
            (self.quadrature(ax), BurgersMethod::Quadrature)
        };
        Ok((if x < 0.0 { -v } else { v }, method))
    }

    /// Truncated series value and the cancellation ratio of its denominator.
    pub fn series(&self, x: f64) -> Result<(f64, f64)> {
        let tol = self.config.truncation_tol;
        let mut num = 0.0;
        let mut den = self.coeffs[0];
        let mut den_abs = den.abs();
        for (n, &a) in self.coeffs.iter().enumerate().skip(1) {
            let nx = n as f64 * x;
            let tn = n as f64 * a * sinpi(nx);
            let td = 2.0 * a * cospi(nx);
            num += tn;
            den += td;
            den_abs += td.abs();
            // Bounds on the remaining terms, independent of x.
            if n as f64 * a.abs() < tol * den.abs() && 2.0 * a.abs() < tol * den.abs() {
                break;
            }
        }
        if den.abs() < 1e-300 {
            return Err(Error::Numerical(format!("Burgers series denominator vanished at x = {x}")));
        }
        let nu = self.config.viscosity;
        Ok((4.0 * PI * nu * num / den, den_abs / den.abs()))
    }

    /// Heat-kernel form of the Cole-Hopf solution,
    /// `u = -int sin(pi (x - s)) e^{E(s)} ds / int e^{E(s)} ds` with
    /// `E(s) = -cos(pi (x - s)) / (2 pi nu) - s^2 / (4 nu t)`, by the
    /// trapezoid rule, which converges geometrically for this integrand.
    pub fn quadrature(&self, x: f64) -> f64 {
        let BurgersSeriesConfig { viscosity: nu, time: t, .. } = self.config;
        let z = 1.0 / (2.0 * PI * nu);
        let four_nu_t = 4.0 * nu * t;
        // Beyond |s| = w the Gaussian factor is below e^{-2z-40} of the peak.
        let w = (four_nu_t * (2.0 * z + 40.0)).sqrt();
        let sigma = 1.0 / (z * PI * PI + 2.0 / four_nu_t).sqrt();
        let h = sigma / 8.0;
        let m = (w / h).ceil() as i64;
        let exponent = |s: f64| -cospi(x - s) * z - s * s / four_nu_t;
        let e_max = (-m..=m).map(|i| exponent(i as f64 * h)).fold(f64::NEG_INFINITY, f64::max);
        let weight = |s: f64| (exponent(s) - e_max).exp();
        let mut num = -sinpi(x) * weight(0.0);
        let mut den = weight(0.0);
        // Nodes are taken in +-s pairs so x = 0 gives an exact zero.
        for i in 1..=m {
            let s = i as f64 * h;
            let (ep, em) = (weight(s), weight(-s));
            num -= sinpi(x - s) * ep + sinpi(x + s) * em;
            den += ep + em;
        }
        num / den
    }
}

/// `sin(pi x)`, exactly zero at integers.
pub fn sinpi(x: f64) -> f64 {
    let r = x - 2.0 * (x / 2.0).round();
    let s = if r > 0.5 {
        1.0 - r
    } else if r < -0.5 {
        -1.0 - r
    } else {
        r
    };
    (PI * s).sin()
}

/// `cos(pi x)`, exactly zero at half-integers.
pub fn cospi(x: f64) -> f64 {
    let r = (x - 2.0 * (x / 2.0).round()).abs();
    if r <= 0.25 {
        (PI * r).cos()
    } else if r <= 0.75 {
        (PI * (0.5 - r)).sin()
    } else {
        -(PI * (1.0 - r)).cos()
    }
}
