use crate::error::{Error, Result};
use crate::model::{build_design_matrix, Interval};
use crate::selection::{output_range, Coordinates, SelectionStrategy};
use crate::solvers::{cod_solve_with, RankRule};

/// Relative rank tolerance for the square interpolation solves: only
/// directions that are singular to working precision are dropped.
pub const INTERPOLATION_TOL: f64 = f64::EPSILON;

#[derive(Clone, Debug, PartialEq)]
pub struct InterpolationCheck {
    pub neurons: usize,
    pub points: Vec<f64>,
    /// `max_i |f_N(x_i) - y_i|`.
    pub residual_max: f64,
    /// `max_i |y_i|`, the natural scale of the residual.
    pub scale: f64,
    pub effective_rank: usize,
}

impl InterpolationCheck {
    pub fn relative_residual(&self) -> f64 {
        if self.scale > 0.0 {
            self.residual_max / self.scale
        } else {
            self.residual_max
        }
    }
}

/// Interpolates `f` at `N + 1` equispaced points of `domain` with `N`
/// neurons plus the offset, a square system.
pub fn exact_interpolation_check(
    f: impl Fn(f64) -> f64,
    domain: Interval,
    neurons: usize,
    strategy: &SelectionStrategy,
) -> Result<InterpolationCheck> {
    let points = domain.linspace(neurons + 1);
    let values: Vec<f64> = points.iter().map(|&x| f(x)).collect();
    interpolation_check_at(&points, &values, domain, strategy)
}

/// Square interpolation with `points.len() - 1` neurons. A numerically
/// singular system shows up as a large residual, not as an error.
pub fn interpolation_check_at(
    points: &[f64],
    values: &[f64],
    domain: Interval,
    strategy: &SelectionStrategy,
) -> Result<InterpolationCheck> {
    if points.len() < 2 || points.len() != values.len() {
        return Err(Error::shape(format!(
            "{} points with {} values (need at least two)",
            points.len(),
            values.len()
        )));
    }
    if let Some(&v) = values.iter().find(|v| !v.is_finite()) {
        return Err(Error::NonFinite { what: "interpolation value", value: v });
    }
    let neurons = points.len() - 1;
    let samples: Vec<(f64, f64)> = points.iter().copied().zip(values.iter().copied()).collect();
    let params = strategy.generate(neurons, domain, &samples)?;
    let (xs, ys, range) = match params.coordinates {
        Coordinates::Raw => (points.to_vec(), values.to_vec(), None),
        Coordinates::Normalized => {
            let range = output_range(values)?;
            (domain.normalize_all(points), values.iter().map(|&y| range.normalize(y)).collect(), Some(range))
        }
    };
    let design = build_design_matrix(&params.alphas, &params.betas, &xs)?;
    let sol = cod_solve_with(design.entries(), &ys, INTERPOLATION_TOL, RankRule::Relative)?;
    let fitted = design.apply(&sol.wtilde);
    let residual_max = fitted
        .iter()
        .zip(&ys)
        .zip(values)
        .map(|((&g, &t), &y)| match range {
            Some(r) => (r.denormalize(g) - y).abs(),
            None => (g - t).abs(),
        })
        .fold(0.0, f64::max);
    let scale = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    Ok(InterpolationCheck {
        neurons,
        points: points.to_vec(),
        residual_max,
        scale,
        effective_rank: sol.effective_rank,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::benchmarks::f1;
    use crate::selection::StrategyKind;

    #[test]
    fn five_agnostic_neurons_interpolate_f1() {
        let s = SelectionStrategy::new(StrategyKind::FunctionAgnostic, 1);
        let c = exact_interpolation_check(|x| f1(x, 10.0), Interval::new(0.0, 1.0).unwrap(), 5, &s).unwrap();
        assert_eq!(c.points.len(), 6);
        assert!(c.relative_residual() <= 1e-9, "{}", c.relative_residual());
    }

    #[test]
    fn two_points_one_neuron() {
        let s = SelectionStrategy::new(StrategyKind::FunctionAgnostic, 3);
        let c = interpolation_check_at(&[0.2, 0.9], &[1.0, -2.0], Interval::new(0.0, 1.0).unwrap(), &s).unwrap();
        assert_eq!(c.neurons, 1);
        assert!(c.residual_max <= 1e-13);
    }

    #[test]
    fn duplicate_points_are_rejected() {
        let s = SelectionStrategy::new(StrategyKind::FunctionAgnostic, 3);
        let r = interpolation_check_at(&[0.2, 0.2, 0.5], &[1.0, 1.0, 0.0], Interval::unit(), &s);
        assert!(matches!(r, Err(Error::DuplicatePoint(_))));
    }

    #[test]
    fn most_trials_interpolate_at_ten_neurons() {
        let mut ok = 0;
        for seed in 0..100 {
            let s = SelectionStrategy::new(StrategyKind::FunctionAgnostic, seed);
            let c = exact_interpolation_check(|x| f1(x, 10.0), Interval::new(0.0, 1.0).unwrap(), 10, &s).unwrap();
            if c.relative_residual() <= 1e-8 {
                ok += 1;
            }
        }
        assert!(ok >= 95, "{ok}/100");
    }
}
