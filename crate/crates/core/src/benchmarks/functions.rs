use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::burgers::{BurgersSeriesConfig, BurgersSolution};
use crate::error::{Error, Result};
use crate::model::Interval;

/// `arctan(k (x - 4/9))` on `[0, 1]`.
pub fn f1(x: f64, k: f64) -> f64 {
    (k * (x - 4.0 / 9.0)).atan()
}

/// `log(sin(10 k x) + 2) + sin(k x)` on `[-1, 1]`.
pub fn f2(x: f64, k: f64) -> f64 {
    ((10.0 * k * x).sin() + 2.0).ln() + (k * x).sin()
}

/// `1 / (1 + eps - x)` on `[-1, 1]`.
pub fn f4(x: f64, eps: f64) -> f64 {
    1.0 / (1.0 + eps - x)
}

/// `sin(1 / (x + eps))` on `[0, 1]`.
pub fn f5(x: f64, eps: f64) -> f64 {
    (1.0 / (x + eps)).sin()
}

pub const DEFAULT_EPS: f64 = 1.0 / (10.0 * PI);

/// Serializable identification of a benchmark target and its parameters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "id", rename_all = "lowercase", deny_unknown_fields)]
pub enum FunctionSpec {
    F1 { k: f64 },
    F2 { k: f64 },
    F3 { t: f64, #[serde(default = "default_nu")] nu: f64 },
    F4 { #[serde(default = "default_eps")] eps: f64 },
    F5 { #[serde(default = "default_eps")] eps: f64 },
}

fn default_nu() -> f64 {
    0.01 / PI
}

fn default_eps() -> f64 {
    DEFAULT_EPS
}

impl FunctionSpec {
    pub fn id(&self) -> &'static str {
        match self {
            FunctionSpec::F1 { .. } => "f1",
            FunctionSpec::F2 { .. } => "f2",
            FunctionSpec::F3 { .. } => "f3",
            FunctionSpec::F4 { .. } => "f4",
            FunctionSpec::F5 { .. } => "f5",
        }
    }

    /// Builds a spec from an id and optional parameters, filling the
    /// customary defaults (`k = 10` for f1, `k = 1` for f2, `t = 1/pi`,
    /// `eps = 1/(10 pi)`).
    pub fn from_parts(id: &str, k: Option<f64>, t: Option<f64>, nu: Option<f64>, eps: Option<f64>) -> Result<Self> {
        Ok(match id {
            "f1" => FunctionSpec::F1 { k: k.unwrap_or(10.0) },
            "f2" => FunctionSpec::F2 { k: k.unwrap_or(1.0) },
            "f3" => FunctionSpec::F3 { t: t.unwrap_or(1.0 / PI), nu: nu.unwrap_or_else(default_nu) },
            "f4" => FunctionSpec::F4 { eps: eps.unwrap_or(DEFAULT_EPS) },
            "f5" => FunctionSpec::F5 { eps: eps.unwrap_or(DEFAULT_EPS) },
            other => return Err(Error::invalid(format!("unknown function '{other}'"))),
        })
    }

    pub fn domain(&self) -> Interval {
        let (lo, hi) = match self {
            FunctionSpec::F1 { .. } | FunctionSpec::F5 { .. } => (0.0, 1.0),
            _ => (-1.0, 1.0),
        };
        Interval::new(lo, hi).expect("static domain")
    }
}

impl fmt::Display for FunctionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FunctionSpec::F1 { k } => write!(f, "f1:k={k}"),
            FunctionSpec::F2 { k } => write!(f, "f2:k={k}"),
            FunctionSpec::F3 { t, nu } => write!(f, "f3:t={t}:nu={nu}"),
            FunctionSpec::F4 { eps } => write!(f, "f4:eps={eps}"),
            FunctionSpec::F5 { eps } => write!(f, "f5:eps={eps}"),
        }
    }
}

/// A benchmark target ready for evaluation. Cloning is cheap.
#[derive(Clone, Debug)]
pub struct BenchmarkFunction {
    spec: FunctionSpec,
    burgers: Option<Arc<BurgersSolution>>,
}

impl BenchmarkFunction {
    pub fn new(spec: FunctionSpec) -> Result<Self> {
        let check = |name: &str, v: f64| {
            if v.is_finite() {
                Ok(())
            } else {
                Err(Error::invalid(format!("{name} must be finite, got {v}")))
            }
        };
        let burgers = match spec {
            FunctionSpec::F1 { k } | FunctionSpec::F2 { k } => {
                check("k", k)?;
                None
            }
            FunctionSpec::F3 { t, nu } => {
                let cfg = BurgersSeriesConfig { viscosity: nu, ..BurgersSeriesConfig::at_time(t) };
                Some(Arc::new(BurgersSolution::new(cfg)?))
            }
            FunctionSpec::F4 { eps } | FunctionSpec::F5 { eps } => {
                if !(eps > 0.0 && eps.is_finite()) {
                    return Err(Error::invalid(format!("eps must be positive, got {eps}")));
                }
                None
            }
        };
        Ok(Self { spec, burgers })
    }

    pub fn spec(&self) -> FunctionSpec {
        self.spec
    }

    pub fn domain(&self) -> Interval {
        self.spec.domain()
    }

    /// Rejects non-finite `x` and non-finite results (e.g. the pole of f4).
    pub fn evaluate(&self, x: f64) -> Result<f64> {
        if !x.is_finite() {
            return Err(Error::NonFinite { what: "x", value: x });
        }
        let v = match (&self.burgers, self.spec) {
            (Some(b), _) => b.evaluate(x)?,
            (None, spec) => self.closed_form(spec, x),
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::Numerical(format!("{} is not finite at x = {x}", self.spec)))
        }
    }

    /// Evaluates without the finiteness checks; Burgers failures give NaN.
    pub fn evaluate_unchecked(&self, x: f64) -> f64 {
        match &self.burgers {
            Some(b) => b.evaluate(x).unwrap_or(f64::NAN),
            None => self.closed_form(self.spec, x),
        }
    }

    fn closed_form(&self, spec: FunctionSpec, x: f64) -> f64 {
        match spec {
            FunctionSpec::F1 { k } => f1(x, k),
            FunctionSpec::F2 { k } => f2(x, k),
            FunctionSpec::F4 { eps } => f4(x, eps),
            FunctionSpec::F5 { eps } => f5(x, eps),
            FunctionSpec::F3 { .. } => unreachable!("f3 has a Burgers evaluator"),
        }
    }
}
