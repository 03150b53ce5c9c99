use nalgebra::{DMatrix, DVector};
use rand::Rng as _;

use super::Activation;
use crate::error::{ensure_finite, Error, Result};
use crate::rng::seeded;

/// A fixed hidden layer `o' = psi(W o + b)`; `W` is `n_out x n_in`.
#[derive(Clone, Debug, PartialEq)]
pub struct HiddenLayer {
    weights: DMatrix<f64>,
    biases: DVector<f64>,
}

impl HiddenLayer {
    pub fn new(weights: DMatrix<f64>, biases: Vec<f64>) -> Result<Self> {
        if weights.nrows() != biases.len() {
            return Err(Error::shape(format!(
                "hidden layer has {} rows but {} biases",
                weights.nrows(),
                biases.len()
            )));
        }
        Ok(Self {
            weights,
            biases: DVector::from_vec(biases),
        })
    }

    pub fn inputs(&self) -> usize {
        self.weights.ncols()
    }

    pub fn outputs(&self) -> usize {
        self.weights.nrows()
    }

    pub fn weights(&self) -> &DMatrix<f64> {
        &self.weights
    }

    pub fn biases(&self) -> &[f64] {
        self.biases.as_slice()
    }
}

/// Sampling bounds for randomly initialized deep models.
#[derive(Clone, Copy, Debug)]
pub struct DeepInit {
    /// `alpha, beta ~ U[-b, b]` for the input layer.
    pub first_layer_bound: f64,
    /// Hidden weights and biases `~ U[-b / sqrt(n_in), b / sqrt(n_in)]`.
    pub hidden_bound: f64,
}

impl Default for DeepInit {
    fn default() -> Self {
        Self {
            first_layer_bound: 1.0,
            hidden_bound: 1.0,
        }
    }
}

/// Stacked RPNN: an input layer `psi(alpha x + beta)`, then fixed hidden
/// layers, then the trainable affine readout. All internal parameters are
/// frozen at construction; only `weights` and `offset` are meant to be fitted.
#[derive(Clone, Debug, PartialEq)]
pub struct DeepRpnnModel {
    alphas: Vec<f64>,
    betas: Vec<f64>,
    hidden: Vec<HiddenLayer>,
    weights: Vec<f64>,
    offset: f64,
    activation: Activation,
}

impl DeepRpnnModel {
    pub fn new(
        alphas: Vec<f64>,
        betas: Vec<f64>,
        hidden: Vec<HiddenLayer>,
        weights: Vec<f64>,
        offset: f64,
    ) -> Result<Self> {
        if alphas.is_empty() || alphas.len() != betas.len() {
            return Err(Error::shape(format!(
                "input layer with {} weights and {} biases",
                alphas.len(),
                betas.len()
            )));
        }
        let mut width = alphas.len();
        for (i, layer) in hidden.iter().enumerate() {
            if layer.inputs() != width {
                return Err(Error::shape(format!(
                    "hidden layer {} expects {} inputs, previous layer has {}",
                    i + 2,
                    layer.inputs(),
                    width
                )));
            }
            width = layer.outputs();
        }
        if weights.len() != width {
            return Err(Error::shape(format!(
                "{} readout weights for a last layer of width {}",
                weights.len(),
                width
            )));
        }
        ensure_finite("offset", offset)?;
        Ok(Self {
            alphas,
            betas,
            hidden,
            weights,
            offset,
            activation: Activation::LogisticSigmoid,
        })
    }

    /// Random fixed layers with sizes `layer_sizes = [N_1, ..., N_L]` and a
    /// zero readout.
    pub fn random(layer_sizes: &[usize], init: DeepInit, seed: u64) -> Result<Self> {
        let (&first, rest) = layer_sizes
            .split_first()
            .ok_or_else(|| Error::invalid("at least one layer is required"))?;
        if layer_sizes.contains(&0) {
            return Err(Error::invalid("layer sizes must be positive"));
        }
        let mut rng = seeded(seed);
        let b = init.first_layer_bound;
        let alphas: Vec<f64> = (0..first).map(|_| rng.gen_range(-b..=b)).collect();
        let betas: Vec<f64> = (0..first).map(|_| rng.gen_range(-b..=b)).collect();
        let mut hidden = Vec::with_capacity(rest.len());
        let mut n_in = first;
        for &n_out in rest {
            let s = init.hidden_bound / (n_in as f64).sqrt();
            let w = DMatrix::from_fn(n_out, n_in, |_, _| rng.gen_range(-s..=s));
            let bias = (0..n_out).map(|_| rng.gen_range(-s..=s)).collect();
            hidden.push(HiddenLayer::new(w, bias)?);
            n_in = n_out;
        }
        Self::new(alphas, betas, hidden, vec![0.0; n_in], 0.0)
    }

    pub fn layer_sizes(&self) -> Vec<usize> {
        std::iter::once(self.alphas.len())
            .chain(self.hidden.iter().map(HiddenLayer::outputs))
            .collect()
    }

    pub fn alphas(&self) -> &[f64] {
        &self.alphas
    }

    pub fn betas(&self) -> &[f64] {
        &self.betas
    }

    pub fn hidden_layers(&self) -> &[HiddenLayer] {
        &self.hidden
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    /// Returns a copy with a new readout; the fixed layers are shared by value.
    pub fn with_readout(&self, weights: Vec<f64>, offset: f64) -> Result<Self> {
        Self::new(
            self.alphas.clone(),
            self.betas.clone(),
            self.hidden.clone(),
            weights,
            offset,
        )
    }

    /// Outputs of the last hidden layer, the basis functions of the readout.
    pub fn features(&self, x: f64) -> DVector<f64> {
        let act = self.activation;
        let mut o = DVector::from_iterator(
            self.alphas.len(),
            self.alphas
                .iter()
                .zip(&self.betas)
                .map(|(&a, &b)| act.value(a * x + b)),
        );
        for layer in &self.hidden {
            let mut z = &layer.weights * &o + &layer.biases;
            z.apply(|v| *v = act.value(*v));
            o = z;
        }
        o
    }

    pub fn evaluate(&self, x: f64) -> Result<f64> {
        ensure_finite("evaluation point", x)?;
        let o = self.features(x);
        Ok(self
            .weights
            .iter()
            .zip(o.iter())
            .fold(self.offset, |acc, (w, v)| acc + w * v))
    }

    /// Design matrix `[1 | features(x_i)]` for fitting the readout.
    pub fn design_matrix(&self, points: &[f64]) -> Result<DMatrix<f64>> {
        super::design::check_distinct(points)?;
        let width = self.weights.len();
        let mut m = DMatrix::zeros(points.len(), width + 1);
        for (i, &x) in points.iter().enumerate() {
            m[(i, 0)] = 1.0;
            let f = self.features(x);
            for j in 0..width {
                m[(i, j + 1)] = f[j];
            }
        }
        Ok(m)
    }
}
