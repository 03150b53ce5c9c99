use nalgebra::{DMatrix, DVector};
use rand::Rng as _;

use super::poly::{chebyshev_proxy, poly_add, poly_compose_affine, poly_eval};
use crate::error::{Error, Result};
use crate::model::{logistic, Interval};
use crate::rng::{derive_seed, seeded};

/// Condition estimate above which [`mimic_weights`] refuses to solve.
pub const MAX_CONDITION: f64 = 1e15;

/// Matching a degree-`n` target polynomial with `n` neurons whose activation
/// is replaced by a degree-`n` polynomial proxy.
#[derive(Clone, Debug, PartialEq)]
pub struct MimicryProblem {
    /// `a_0..a_n`, monomial basis.
    pub target_coeffs: Vec<f64>,
    /// `b_0..b_n` of the activation proxy; `b_n != 0`.
    pub activation_coeffs: Vec<f64>,
    pub alphas: Vec<f64>,
    pub centers: Vec<f64>,
}

impl MimicryProblem {
    pub fn degree(&self) -> usize {
        self.activation_coeffs.len().saturating_sub(1)
    }

    fn validate(&self) -> Result<usize> {
        let n = self.degree();
        if n == 0 {
            return Err(Error::invalid("the activation proxy must have degree >= 1"));
        }
        if self.target_coeffs.len() != n + 1 {
            return Err(Error::shape(format!(
                "target of degree {} with activation proxy of degree {n}",
                self.target_coeffs.len() as isize - 1
            )));
        }
        if self.activation_coeffs[n] == 0.0 {
            return Err(Error::invalid("leading activation coefficient must be non-zero"));
        }
        check_parameters(&self.alphas, &self.centers, n)?;
        Ok(n)
    }

    fn betas(&self) -> Vec<f64> {
        self.alphas.iter().zip(&self.centers).map(|(a, c)| -a * c).collect()
    }
}

fn check_parameters(alphas: &[f64], centers: &[f64], n: usize) -> Result<()> {
    if alphas.len() != n || centers.len() != n {
        return Err(Error::shape(format!(
            "{} slopes and {} centers for degree {n}",
            alphas.len(),
            centers.len()
        )));
    }
    if let Some(j) = alphas.iter().position(|&a| a == 0.0 || !a.is_finite()) {
        return Err(Error::invalid(format!("slope {j} must be finite and non-zero")));
    }
    if let Some(&c) = centers.iter().find(|c| !c.is_finite()) {
        return Err(Error::NonFinite { what: "center", value: c });
    }
    // (alpha, c) pairs are distinct exactly when (alpha, beta) pairs are.
    let mut pairs: Vec<(f64, f64)> = alphas.iter().copied().zip(centers.iter().copied()).collect();
    pairs.sort_by(|p, q| p.0.total_cmp(&q.0).then(p.1.total_cmp(&q.1)));
    if pairs.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::invalid("duplicate (alpha, center) pair"));
    }
    Ok(())
}

/// `M[k-1][j] = sum_{s=k}^{n} C(s, k) b_s alpha_j^s (-c_j)^{s-k}` for
/// `k = 1..n`: the coefficient of `x^k` in `Q(alpha_j (x - c_j))`.
pub fn build_m(alphas: &[f64], centers: &[f64], b: &[f64], n: usize) -> Result<DMatrix<f64>> {
    if b.len() != n + 1 {
        return Err(Error::shape(format!("{} activation coefficients for degree {n}", b.len())));
    }
    check_parameters(alphas, centers, n)?;
    let binom = binomials(n);
    Ok(DMatrix::from_fn(n, n, |row, j| {
        let k = row + 1;
        let (a, mc) = (alphas[j], -centers[j]);
        (k..=n)
            .map(|s| binom[s][k] * b[s] * a.powi(s as i32) * mc.powi((s - k) as i32))
            .sum()
    }))
}

/// Constant terms `Q(beta_j)` of each neuron's expansion.
fn constant_terms(alphas: &[f64], centers: &[f64], b: &[f64]) -> Vec<f64> {
    alphas.iter().zip(centers).map(|(a, c)| poly_eval(b, -a * c)).collect()
}

fn binomials(n: usize) -> Vec<Vec<f64>> {
    let mut c = vec![vec![0.0; n + 1]; n + 1];
    for s in 0..=n {
        c[s][0] = 1.0;
        for k in 1..=s {
            c[s][k] = c[s - 1][k - 1] + if k < s { c[s - 1][k] } else { 0.0 };
        }
    }
    c
}

#[derive(Clone, Debug, PartialEq)]
pub struct MimicrySolution {
    pub weights: Vec<f64>,
    pub offset: f64,
    /// 2-norm condition number of `M`.
    pub condition: f64,
}

/// Solves for the readout with `a_k = sum_j w_j M[k-1][j]` (the row vector
/// `w` times the transpose of the neuron-by-power layout) and sets the offset
/// so the constant terms match.
pub fn mimic_weights(problem: &MimicryProblem) -> Result<MimicrySolution> {
    let n = problem.validate()?;
    let b = &problem.activation_coeffs;
    let m = build_m(&problem.alphas, &problem.centers, b, n)?;
    let condition = condition_number(&m);
    if !(condition <= MAX_CONDITION) {
        return Err(Error::Numerical(format!(
            "mimicry matrix of degree {n} has condition number {condition:e} (limit {MAX_CONDITION:e})"
        )));
    }
    let rhs = DVector::from_column_slice(&problem.target_coeffs[1..]);
    let w = m
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::Numerical("mimicry matrix is singular".into()))?;
    let weights = w.as_slice().to_vec();
    let m0 = constant_terms(&problem.alphas, &problem.centers, b);
    let offset = problem.target_coeffs[0] - weights.iter().zip(&m0).map(|(w, q)| w * q).sum::<f64>();
    Ok(MimicrySolution { weights, offset, condition })
}

pub fn condition_number(m: &DMatrix<f64>) -> f64 {
    let s = m.clone().singular_values();
    let max = s.iter().cloned().fold(0.0, f64::max);
    let min = s.iter().cloned().fold(f64::INFINITY, f64::min);
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Monomial coefficients of `offset + sum_j w_j Q(alpha_j x + beta_j)`,
/// expanded by direct polynomial composition (no use of `M`).
pub fn network_polynomial(problem: &MimicryProblem, solution: &MimicrySolution) -> Vec<f64> {
    let betas = problem.betas();
    let mut acc = vec![solution.offset];
    for ((&a, &beta), &w) in problem.alphas.iter().zip(&betas).zip(&solution.weights) {
        let q: Vec<f64> = poly_compose_affine(&problem.activation_coeffs, a, beta)
            .into_iter()
            .map(|c| w * c)
            .collect();
        acc = poly_add(&acc, &q);
    }
    acc.resize(problem.activation_coeffs.len(), 0.0);
    acc
}

/// Outcome of one mimicry experiment.
#[derive(Clone, Debug, PartialEq)]
pub struct MimicryReport {
    pub degree: usize,
    pub condition: f64,
    /// `max_k |G_k - a_k| / max_k |a_k|`; `None` when the solve was refused.
    pub relative_coeff_error: Option<f64>,
    pub proxy_interval: Interval,
}

/// Draws `n` neurons with slopes of magnitude in `[0.5, 1.5]` (random sign)
/// and centers in `domain`, replaces the target and the sigmoid by their
/// degree-`n` Chebyshev proxies and solves for the mimicking readout.
///
/// The sigmoid proxy is built on `I = [min, max]` of `alpha_j x + beta_j`
/// over the sample grid.
pub fn mimicry_experiment(
    target: impl Fn(f64) -> f64,
    domain: Interval,
    n: usize,
    seed: u64,
) -> Result<MimicryReport> {
    if n == 0 {
        return Err(Error::invalid("mimicry needs degree >= 1"));
    }
    let mut rng = seeded(derive_seed(&[seed, n as u64]));
    let alphas: Vec<f64> = (0..n)
        .map(|_| {
            let m: f64 = rng.gen_range(0.5..=1.5);
            if rng.gen_bool(0.5) { m } else { -m }
        })
        .collect();
    let centers: Vec<f64> = (0..n).map(|_| rng.gen_range(domain.lo()..=domain.hi())).collect();
    let grid = domain.linspace(5 * n + 1);
    let (lo, hi) = alphas.iter().zip(&centers).fold((f64::INFINITY, f64::NEG_INFINITY), |acc, (a, c)| {
        grid.iter().fold(acc, |(lo, hi), x| {
            let z = a * (x - c);
            (lo.min(z), hi.max(z))
        })
    });
    let proxy_interval = Interval::new(lo, hi)?;
    let problem = MimicryProblem {
        target_coeffs: chebyshev_proxy(&target, domain, n)?,
        activation_coeffs: chebyshev_proxy(logistic, proxy_interval, n)?,
        alphas,
        centers,
    };
    if problem.activation_coeffs[n] == 0.0 {
        return Err(Error::Numerical("activation proxy lost its leading coefficient".into()));
    }
    let m = build_m(&problem.alphas, &problem.centers, &problem.activation_coeffs, n)?;
    let condition = condition_number(&m);
    let relative_coeff_error = match mimic_weights(&problem) {
        Ok(sol) => {
            let g = network_polynomial(&problem, &sol);
            let scale = problem.target_coeffs.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            let err = g
                .iter()
                .zip(&problem.target_coeffs)
                .fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
            Some(err / scale)
        }
        Err(e) if e.is_numerical() => None,
        Err(e) => return Err(e),
    };
    Ok(MimicryReport { degree: n, condition, relative_coeff_error, proxy_interval })
}

/// Aggregate of [`mimicry_experiment`] over several draws at one degree.
#[derive(Clone, Debug, PartialEq)]
pub struct MimicrySummary {
    pub degree: usize,
    pub draws: usize,
    /// Geometric mean of `cond(M)` over the draws.
    pub condition_geomean: f64,
    pub condition_max: f64,
    /// Draws with `cond(M)` below the gate.
    pub gated: usize,
    /// Worst relative coefficient error among the gated draws.
    pub worst_gated_error: Option<f64>,
}

/// Runs `draws` experiments per degree; draw `d` uses seed
/// `derive_seed(seed, d)`. Errors are only judged for draws whose condition
/// number is below `condition_gate`.
pub fn mimicry_study(
    target: impl Fn(f64) -> f64,
    domain: Interval,
    degrees: &[usize],
    seed: u64,
    draws: usize,
    condition_gate: f64,
) -> Result<Vec<MimicrySummary>> {
    if draws == 0 {
        return Err(Error::invalid("mimicry study needs at least one draw"));
    }
    degrees
        .iter()
        .map(|&n| {
            let mut log_sum = 0.0;
            let mut condition_max = 0.0f64;
            let mut gated = 0;
            let mut worst: Option<f64> = None;
            for d in 0..draws {
                let r = mimicry_experiment(&target, domain, n, derive_seed(&[seed, d as u64]))?;
                log_sum += r.condition.ln();
                condition_max = condition_max.max(r.condition);
                if r.condition < condition_gate {
                    gated += 1;
                    let e = r.relative_coeff_error.unwrap_or(f64::INFINITY);
                    worst = Some(worst.map_or(e, |w| w.max(e)));
                }
            }
            Ok(MimicrySummary {
                degree: n,
                draws,
                condition_geomean: (log_sum / draws as f64).exp(),
                condition_max,
                gated,
                worst_gated_error: worst,
            })
        })
        .collect()
}
