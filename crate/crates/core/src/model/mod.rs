//! Network definition, basis evaluation and design-matrix assembly.

mod activation;
mod deep;
mod design;
mod interval;

pub use activation::{logistic, Activation};
pub use deep::{DeepInit, DeepRpnnModel, HiddenLayer};
pub use design::{build_design_matrix, DesignMatrix};
pub use interval::{linspace, Interval};

use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, Error, Result};

/// Shallow RPNN `f(x) = offset + sum_j w_j psi(alpha_j x + beta_j)`.
///
/// When `output_range` is set the model is *normalized*: inputs are first
/// mapped from `domain` onto `[-1, 1]`, and the network output is mapped back
/// from `[-1, 1]` onto `output_range`. Otherwise the internal parameters act on
/// raw abscissae and the output is used as is.
#[derive(Clone, Debug, PartialEq)]
pub struct RpnnModel {
    alphas: Vec<f64>,
    betas: Vec<f64>,
    weights: Vec<f64>,
    offset: f64,
    domain: Interval,
    output_range: Option<Interval>,
    activation: Activation,
}

impl RpnnModel {
    pub fn new(
        alphas: Vec<f64>,
        betas: Vec<f64>,
        weights: Vec<f64>,
        offset: f64,
        domain: Interval,
        output_range: Option<Interval>,
    ) -> Result<Self> {
        validate_internal(&alphas, &betas)?;
        if weights.len() != alphas.len() {
            return Err(Error::shape(format!(
                "{} readout weights for {} neurons",
                weights.len(),
                alphas.len()
            )));
        }
        if weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::NonFinite {
                what: "readout weight",
                value: weights.iter().copied().find(|w| !w.is_finite()).unwrap(),
            });
        }
        ensure_finite("offset", offset)?;
        Ok(Self {
            alphas,
            betas,
            weights,
            offset,
            domain,
            output_range,
            activation: Activation::LogisticSigmoid,
        })
    }

    /// Builds a model from a least-squares solution `wtilde = (offset, w)`.
    pub fn from_solution(
        alphas: Vec<f64>,
        betas: Vec<f64>,
        wtilde: &[f64],
        domain: Interval,
        output_range: Option<Interval>,
    ) -> Result<Self> {
        if wtilde.len() != alphas.len() + 1 {
            return Err(Error::shape(format!(
                "solution of length {} for {} neurons",
                wtilde.len(),
                alphas.len()
            )));
        }
        Self::new(
            alphas,
            betas,
            wtilde[1..].to_vec(),
            wtilde[0],
            domain,
            output_range,
        )
    }

    pub fn neurons(&self) -> usize {
        self.alphas.len()
    }

    pub fn alphas(&self) -> &[f64] {
        &self.alphas
    }

    pub fn betas(&self) -> &[f64] {
        &self.betas
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn domain(&self) -> Interval {
        self.domain
    }

    pub fn output_range(&self) -> Option<Interval> {
        self.output_range
    }

    pub fn activation(&self) -> Activation {
        self.activation
    }

    pub fn is_normalized(&self) -> bool {
        self.output_range.is_some()
    }

    /// Centers `-beta_j / alpha_j`; `None` for a zero slope.
    pub fn centers(&self) -> Vec<Option<f64>> {
        self.alphas
            .iter()
            .zip(&self.betas)
            .map(|(&a, &b)| (a != 0.0).then(|| -b / a))
            .collect()
    }

    pub fn evaluate(&self, x: f64) -> Result<f64> {
        ensure_finite("evaluation point", x)?;
        Ok(self.evaluate_unchecked(x))
    }

    /// Evaluation without the finiteness check on `x`.
    pub fn evaluate_unchecked(&self, x: f64) -> f64 {
        let t = match self.output_range {
            Some(_) => self.domain.normalize(x),
            None => x,
        };
        let raw = self.network(t);
        match self.output_range {
            Some(range) => range.denormalize(raw),
            None => raw,
        }
    }

    pub fn evaluate_many(&self, xs: &[f64]) -> Result<Vec<f64>> {
        xs.iter().map(|&x| self.evaluate(x)).collect()
    }

    /// The network in its internal coordinates, without any normalization.
    pub fn network(&self, t: f64) -> f64 {
        let act = self.activation;
        self.alphas
            .iter()
            .zip(&self.betas)
            .zip(&self.weights)
            .fold(self.offset, |acc, ((&a, &b), &w)| {
                acc + w * act.value(a * t + b)
            })
    }

    /// Serializes to the JSON model document.
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&ModelDocument::from(self))?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: ModelDocument = serde_json::from_str(text)?;
        doc.try_into()
    }
}

/// On-disk form of [`RpnnModel`]. Field names are part of the file format.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelDocument {
    alphas: Vec<f64>,
    betas: Vec<f64>,
    weights: Vec<f64>,
    offset: f64,
    domain: Interval,
    output_range: Option<Interval>,
    activation: Activation,
}

impl From<&RpnnModel> for ModelDocument {
    fn from(m: &RpnnModel) -> Self {
        Self {
            alphas: m.alphas.clone(),
            betas: m.betas.clone(),
            weights: m.weights.clone(),
            offset: m.offset,
            domain: m.domain,
            output_range: m.output_range,
            activation: m.activation,
        }
    }
}

impl TryFrom<ModelDocument> for RpnnModel {
    type Error = Error;

    fn try_from(doc: ModelDocument) -> Result<Self> {
        let mut model = RpnnModel::new(
            doc.alphas,
            doc.betas,
            doc.weights,
            doc.offset,
            doc.domain,
            doc.output_range,
        )?;
        model.activation = doc.activation;
        Ok(model)
    }
}

/// Checks the internal-parameter invariants: equal non-zero lengths, finite
/// entries, and no pair `(alpha_j, beta_j) = ±(alpha_k, beta_k)`.
pub fn validate_internal(alphas: &[f64], betas: &[f64]) -> Result<()> {
    if alphas.is_empty() {
        return Err(Error::invalid("a model needs at least one neuron"));
    }
    if alphas.len() != betas.len() {
        return Err(Error::shape(format!(
            "{} internal weights but {} biases",
            alphas.len(),
            betas.len()
        )));
    }
    for (&a, &b) in alphas.iter().zip(betas) {
        ensure_finite("internal weight", a)?;
        ensure_finite("internal bias", b)?;
    }
    if let Some((j, k)) = find_collision(alphas, betas) {
        return Err(Error::invalid(format!(
            "neurons {j} and {k} have dependent internal parameters"
        )));
    }
    Ok(())
}

/// First pair `j < k` with `(alpha_j, beta_j) = ±(alpha_k, beta_k)`.
pub(crate) fn find_collision(alphas: &[f64], betas: &[f64]) -> Option<(usize, usize)> {
    // Canonical sign: flip so the first non-zero component is positive, then
    // a sort brings equal and opposite pairs next to each other.
    let mut keyed: Vec<(f64, f64, usize)> = alphas
        .iter()
        .zip(betas)
        .enumerate()
        .map(|(i, (&a, &b))| {
            let flip = a < 0.0 || (a == 0.0 && b < 0.0);
            if flip {
                (-a + 0.0, -b + 0.0, i)
            } else {
                (a + 0.0, b + 0.0, i)
            }
        })
        .collect();
    keyed.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.total_cmp(&y.1)));
    keyed.windows(2).find_map(|w| {
        (w[0].0 == w[1].0 && w[0].1 == w[1].1).then(|| (w[0].2.min(w[1].2), w[0].2.max(w[1].2)))
    })
}
