use crate::error::{ensure_finite, Error, Result};

/// Polynomial interpolant in second (true) barycentric form.
#[derive(Clone, Debug, PartialEq)]
pub struct BarycentricInterpolant {
    nodes: Vec<f64>,
    values: Vec<f64>,
    weights: Vec<f64>,
}

impl BarycentricInterpolant {
    /// Nodes must be finite and strictly increasing.
    pub fn fit(nodes: &[f64], values: &[f64]) -> Result<Self> {
        if nodes.is_empty() || nodes.len() != values.len() {
            return Err(Error::shape(format!(
                "{} nodes with {} values",
                nodes.len(),
                values.len()
            )));
        }
        for &x in nodes {
            ensure_finite("interpolation node", x)?;
        }
        for &v in values {
            ensure_finite("interpolation value", v)?;
        }
        if let Some(w) = nodes.windows(2).find(|w| w[0] >= w[1]) {
            return Err(if w[0] == w[1] {
                Error::DuplicatePoint(w[0])
            } else {
                Error::invalid("nodes must be strictly increasing")
            });
        }
        Ok(Self {
            weights: barycentric_weights(nodes),
            nodes: nodes.to_vec(),
            values: values.to_vec(),
        })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn evaluate(&self, x: f64) -> Result<f64> {
        ensure_finite("x", x)?;
        Ok(self.evaluate_unchecked(x))
    }

    pub fn evaluate_unchecked(&self, x: f64) -> f64 {
        let mut num = 0.0;
        let mut den = 0.0;
        for ((&xj, &fj), &wj) in self.nodes.iter().zip(&self.values).zip(&self.weights) {
            let d = x - xj;
            if d == 0.0 {
                return fj;
            }
            let t = wj / d;
            num += t * fj;
            den += t;
        }
        num / den
    }
}

/// `1 / prod_{k != j} (x_j - x_k)`, rescaled by the interval capacity so the
/// products stay in range for large node counts, then normalized to unit max.
pub fn barycentric_weights(nodes: &[f64]) -> Vec<f64> {
    let n = nodes.len();
    if n == 1 {
        return vec![1.0];
    }
    let range = nodes[n - 1] - nodes[0];
    let scale = 4.0 / range;
    let mut w: Vec<f64> = (0..n)
        .map(|j| {
            let prod: f64 = (0..n)
                .filter(|&k| k != j)
                .map(|k| scale * (nodes[j] - nodes[k]))
                .product();
            1.0 / prod
        })
        .collect();
    let max = w.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    w.iter_mut().for_each(|v| *v /= max);
    w
}
