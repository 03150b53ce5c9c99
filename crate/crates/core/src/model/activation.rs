use serde::{Deserialize, Serialize};

/// Hidden-layer transfer function.
///
/// Only the logistic sigmoid ships; the enum exists so a model document can
/// name its activation explicitly.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Activation {
    #[default]
    LogisticSigmoid,
}

impl Activation {
    #[inline]
    pub fn value(self, z: f64) -> f64 {
        match self {
            Activation::LogisticSigmoid => logistic(z),
        }
    }

    #[inline]
    pub fn derivative(self, z: f64) -> f64 {
        match self {
            // psi(z) * (1 - psi(z)) written as psi(z) * psi(-z), which avoids
            // the cancellation in 1 - psi(z) for large positive z.
            Activation::LogisticSigmoid => logistic(z) * logistic(-z),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Activation::LogisticSigmoid => "logistic_sigmoid",
        }
    }
}

/// Overflow-free logistic sigmoid.
#[inline]
pub fn logistic(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}
