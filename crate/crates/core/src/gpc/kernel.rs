use crate::{Error, Result};

/// Squared-exponential kernel `k(x, x') = σ·exp(−Σᵢ wᵢ·(xᵢ − x'ᵢ)²)`.
///
/// `weights` multiply squared coordinate differences directly, so a weight
/// corresponds to an inverse squared lengthscale (`w = 1/L²`).
#[derive(Debug, Clone, PartialEq)]
pub struct SqExpKernel {
    pub amplitude: f64,
    pub weights: Vec<f64>,
}

impl SqExpKernel {
    pub fn new(amplitude: f64, weights: Vec<f64>) -> Result<Self> {
        let ok = |v: f64| v > 0.0 && v.is_finite();
        if !ok(amplitude) {
            return Err(Error::invalid(
                "amplitude",
                format!("must be positive and finite, got {amplitude}"),
            ));
        }
        if weights.is_empty() || !weights.iter().all(|&w| ok(w)) {
            return Err(Error::invalid(
                "weights",
                format!("must be nonempty, positive and finite, got {weights:?}"),
            ));
        }
        Ok(SqExpKernel { amplitude, weights })
    }

    pub fn from_lengthscales(amplitude: f64, lengthscales: &[f64]) -> Result<Self> {
        SqExpKernel::new(amplitude, lengthscales.iter().map(|l| 1.0 / (l * l)).collect())
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn lengthscales(&self) -> Vec<f64> {
        self.weights.iter().map(|w| 1.0 / w.sqrt()).collect()
    }

    #[inline]
    pub fn eval(&self, x1: &[f64], x2: &[f64]) -> f64 {
        debug_assert_eq!(x1.len(), self.weights.len());
        let r: f64 = self
            .weights
            .iter()
            .zip(x1.iter().zip(x2))
            .map(|(w, (a, b))| w * (b - a) * (b - a))
            .sum();
        self.amplitude * (-r).exp()
    }
}

/// Kernel value; dimensions of both points must match the weight count.
pub fn kernel_eval(k: &SqExpKernel, x1: &[f64], x2: &[f64]) -> Result<f64> {
    for x in [x1, x2] {
        if x.len() != k.dim() {
            return Err(Error::Dimension {
                expected: k.dim(),
                got: x.len(),
            });
        }
    }
    Ok(k.eval(x1, x2))
}
