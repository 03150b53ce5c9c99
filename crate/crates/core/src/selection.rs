//! A-priori generation of the fixed internal parameters.
//!
//! Three strategies are provided:
//!
//! * **naive**: `alpha, beta ~ U[-1, 1]` on normalized data;
//! * **function-agnostic**: slopes `~ U[-B, B]` with
//!   `B = (400 + 9N) / (10 (b - a))` and centers inside `[a, b]`;
//! * **function-informed**: equally spaced centers on `[-1, 1]`, slopes from a
//!   finite-difference estimate of the normalized target's derivative plus
//!   uniform noise.
//!
//! Every strategy is a pure function of its inputs and seed.

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, Error, Result};
use crate::model::{find_collision, linspace, Interval};
use crate::rng::{seeded, Rng};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StrategyKind {
    Naive,
    #[serde(alias = "agnostic")]
    FunctionAgnostic,
    #[serde(alias = "informed")]
    FunctionInformed,
}

impl StrategyKind {
    /// Short label used on the command line and in CSV output.
    pub fn label(self) -> &'static str {
        match self {
            StrategyKind::Naive => "naive",
            StrategyKind::FunctionAgnostic => "agnostic",
            StrategyKind::FunctionInformed => "informed",
        }
    }

    pub fn from_label(s: &str) -> Result<Self> {
        match s {
            "naive" => Ok(Self::Naive),
            "agnostic" | "function_agnostic" => Ok(Self::FunctionAgnostic),
            "informed" | "function_informed" => Ok(Self::FunctionInformed),
            other => Err(Error::invalid(format!("unknown strategy '{other}'"))),
        }
    }

    pub const ALL: [StrategyKind; 3] = [
        StrategyKind::Naive,
        StrategyKind::FunctionAgnostic,
        StrategyKind::FunctionInformed,
    ];
}

/// Placement of function-agnostic centers.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CenterPlacement {
    #[default]
    Uniform,
    EquallySpaced,
}

/// Which coordinates the generated parameters act on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Coordinates {
    /// Raw abscissae in the target's domain.
    Raw,
    /// Normalized abscissae in `[-1, 1]` with normalized outputs.
    Normalized,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SelectionStrategy {
    pub kind: StrategyKind,
    pub seed: u64,
    /// Proportionality constant of the function-informed slopes.
    pub gamma: f64,
    pub centers: CenterPlacement,
}

impl SelectionStrategy {
    pub const DEFAULT_GAMMA: f64 = 1.5;

    pub fn new(kind: StrategyKind, seed: u64) -> Self {
        Self {
            kind,
            seed,
            gamma: Self::DEFAULT_GAMMA,
            centers: CenterPlacement::Uniform,
        }
    }

    pub fn with_gamma(mut self, gamma: f64) -> Self {
        self.gamma = gamma;
        self
    }

    pub fn with_centers(mut self, centers: CenterPlacement) -> Self {
        self.centers = centers;
        self
    }

    /// Coordinates the generated parameters live in.
    pub fn coordinates(&self) -> Coordinates {
        match self.kind {
            StrategyKind::FunctionAgnostic => Coordinates::Raw,
            StrategyKind::Naive | StrategyKind::FunctionInformed => Coordinates::Normalized,
        }
    }

    /// Generates `n` neurons. `samples` is only consulted by the
    /// function-informed strategy.
    pub fn generate(&self, n: usize, domain: Interval, samples: &[(f64, f64)]) -> Result<GeneratedParams> {
        match self.kind {
            StrategyKind::Naive => naive_selection(n, self.seed),
            StrategyKind::FunctionAgnostic => {
                function_agnostic_selection_with(n, domain, self.seed, self.centers)
            }
            StrategyKind::FunctionInformed => {
                function_informed_selection(n, domain, samples, self.seed, self.gamma)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GeneratedParams {
    pub alphas: Vec<f64>,
    pub betas: Vec<f64>,
    /// Centers `-beta_j / alpha_j`. For the center-based strategies these are
    /// the sampled centers themselves; for the naive strategy they are derived
    /// (and infinite for a zero slope).
    pub centers: Vec<f64>,
    pub coordinates: Coordinates,
}

impl GeneratedParams {
    pub fn len(&self) -> usize {
        self.alphas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alphas.is_empty()
    }
}

fn require_neurons(n: usize) -> Result<()> {
    if n == 0 {
        Err(Error::invalid("the number of neurons must be at least 1"))
    } else {
        Ok(())
    }
}

/// Slope bound `(400 + 9N) / (10 (b - a))` of the function-agnostic strategy.
pub fn agnostic_alpha_bound(n: usize, domain: Interval) -> f64 {
    (400.0 + 9.0 * n as f64) / (10.0 * domain.width())
}

/// Noise bound of the function-informed strategy on the normalized domain
/// (width 2): `(400 + 9N) / (100 * 2)`.
pub fn informed_noise_bound(n: usize) -> f64 {
    (400.0 + 9.0 * n as f64) / (100.0 * 2.0)
}

/// `alpha_j, beta_j ~ U[-1, 1]` i.i.d.; assumes data normalized to `[-1, 1]`.
pub fn naive_selection(n: usize, seed: u64) -> Result<GeneratedParams> {
    require_neurons(n)?;
    let mut rng = seeded(seed);
    let mut alphas: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..=1.0)).collect();
    let mut betas: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..=1.0)).collect();
    redraw_collisions(&mut alphas, &mut betas, &mut rng, |rng, _| {
        (rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0))
    });
    let centers = alphas.iter().zip(&betas).map(|(&a, &b)| -b / a).collect();
    Ok(GeneratedParams {
        alphas,
        betas,
        centers,
        coordinates: Coordinates::Normalized,
    })
}

/// Function-agnostic selection with uniformly random centers.
pub fn function_agnostic_selection(n: usize, domain: Interval, seed: u64) -> Result<GeneratedParams> {
    function_agnostic_selection_with(n, domain, seed, CenterPlacement::Uniform)
}

pub fn function_agnostic_selection_with(
    n: usize,
    domain: Interval,
    seed: u64,
    placement: CenterPlacement,
) -> Result<GeneratedParams> {
    require_neurons(n)?;
    let bound = agnostic_alpha_bound(n, domain);
    let mut rng = seeded(seed);
    let mut alphas: Vec<f64> = (0..n).map(|_| rng.gen_range(-bound..=bound)).collect();
    let centers: Vec<f64> = match placement {
        CenterPlacement::Uniform => (0..n)
            .map(|_| rng.gen_range(domain.lo()..=domain.hi()))
            .collect(),
        CenterPlacement::EquallySpaced => domain.linspace(n),
    };
    let mut betas: Vec<f64> = alphas.iter().zip(&centers).map(|(&a, &c)| -a * c).collect();
    let cs = centers.clone();
    redraw_collisions(&mut alphas, &mut betas, &mut rng, |rng, j| {
        let a = rng.gen_range(-bound..=bound);
        (a, -a * cs[j])
    });
    Ok(GeneratedParams {
        alphas,
        betas,
        centers,
        coordinates: Coordinates::Raw,
    })
}

/// Function-informed selection.
///
/// Inputs and outputs of `samples` are normalized to `[-1, 1]`; `N` centers
/// are equally spaced in `[-1, 1]`; the normalized target is interpolated
/// linearly at the centers and
/// `alpha_j = gamma (f(c_{j+1}) - f(c_{j-1})) / dx + eps_j`,
/// with one-sided quotients (scaled to the same `2 f'` magnitude) at the two
/// boundary centers and `eps_j ~ U[-E, E]`, `E = (400 + 9N) / 200`.
pub fn function_informed_selection(
    n: usize,
    domain: Interval,
    samples: &[(f64, f64)],
    seed: u64,
    gamma: f64,
) -> Result<GeneratedParams> {
    require_neurons(n)?;
    ensure_finite("gamma", gamma)?;
    let required = 2 * n + 1;
    if samples.len() < required {
        return Err(Error::invalid(format!(
            "function-informed selection with {n} neurons needs at least {required} samples, got {}",
            samples.len()
        )));
    }
    for &(x, y) in samples {
        ensure_finite("sample abscissa", x)?;
        ensure_finite("sample value", y)?;
    }

    let (xs, ys) = normalized_samples(domain, samples);
    let centers = linspace(-1.0, 1.0, n);
    let values: Vec<f64> = centers.iter().map(|&c| interp_linear(&xs, &ys, c)).collect();
    let slopes = difference_quotients(&centers, &values, |t| interp_linear(&xs, &ys, t));

    let noise = informed_noise_bound(n);
    let mut rng = seeded(seed);
    let mut alphas: Vec<f64> = slopes
        .iter()
        .map(|&d| gamma * d + rng.gen_range(-noise..=noise))
        .collect();
    let mut betas: Vec<f64> = alphas.iter().zip(&centers).map(|(&a, &c)| -a * c).collect();
    let cs = centers.clone();
    redraw_collisions(&mut alphas, &mut betas, &mut rng, |rng, j| {
        let a = gamma * slopes[j] + rng.gen_range(-noise..=noise);
        (a, -a * cs[j])
    });
    Ok(GeneratedParams {
        alphas,
        betas,
        centers,
        coordinates: Coordinates::Normalized,
    })
}

/// Output range used to normalize targets; a constant target gets a unit
/// half-width so the map stays invertible.
pub fn output_range(values: &[f64]) -> Result<Interval> {
    let (lo, hi) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    if !(lo.is_finite() && hi.is_finite()) {
        return Err(Error::invalid("cannot normalize an empty or non-finite sample"));
    }
    if hi > lo {
        Interval::new(lo, hi)
    } else {
        Interval::new(lo - 1.0, hi + 1.0)
    }
}

fn normalized_samples(domain: Interval, samples: &[(f64, f64)]) -> (Vec<f64>, Vec<f64>) {
    let ys: Vec<f64> = samples.iter().map(|s| s.1).collect();
    let range = output_range(&ys).expect("samples checked finite and non-empty");
    let constant = ys.iter().all(|&y| y == ys[0]);
    let mut pts: Vec<(f64, f64)> = samples
        .iter()
        .map(|&(x, y)| {
            let ty = if constant { 0.0 } else { range.normalize(y) };
            (domain.normalize(x), ty)
        })
        .collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    pts.into_iter().unzip()
}

/// Piecewise-linear interpolation on sorted abscissae, constant outside.
fn interp_linear(xs: &[f64], ys: &[f64], t: f64) -> f64 {
    let last = xs.len() - 1;
    if t <= xs[0] {
        return ys[0];
    }
    if t >= xs[last] {
        return ys[last];
    }
    let i = xs.partition_point(|&x| x <= t) - 1;
    let (x0, x1) = (xs[i], xs[i + 1]);
    if x1 == x0 {
        return ys[i];
    }
    let s = (t - x0) / (x1 - x0);
    ys[i] + s * (ys[i + 1] - ys[i])
}

/// `(f(c_{j+1}) - f(c_{j-1})) / dx` at interior centers; `2 (f(c_1) - f(c_0)) / dx`
/// and its mirror at the ends. A single center at 0 uses the endpoints `±1`
/// with `dx = 1`.
fn difference_quotients(centers: &[f64], values: &[f64], f: impl Fn(f64) -> f64) -> Vec<f64> {
    let n = centers.len();
    if n == 1 {
        return vec![f(1.0) - f(-1.0)];
    }
    let dx = centers[1] - centers[0];
    (0..n)
        .map(|j| {
            if j == 0 {
                2.0 * (values[1] - values[0]) / dx
            } else if j == n - 1 {
                2.0 * (values[n - 1] - values[n - 2]) / dx
            } else {
                (values[j + 1] - values[j - 1]) / dx
            }
        })
        .collect()
}

/// Redraws neuron `j` while it is dependent (`±` equal) on an earlier one.
fn redraw_collisions(
    alphas: &mut [f64],
    betas: &mut [f64],
    rng: &mut Rng,
    mut draw: impl FnMut(&mut Rng, usize) -> (f64, f64),
) {
    while let Some((_, k)) = find_collision(alphas, betas) {
        let (a, b) = draw(rng, k);
        alphas[k] = a;
        betas[k] = b;
    }
}
