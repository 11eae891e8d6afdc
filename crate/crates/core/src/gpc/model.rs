use nalgebra::{DMatrix, DVector};

use super::SqExpKernel;
use crate::{Error, Result, StateVector};

/// A state with its binary class label (1 = in the set, 0 = outside).
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledSample {
    pub point: StateVector,
    pub label: f64,
}

impl LabeledSample {
    pub fn new(point: StateVector, label: f64) -> Result<Self> {
        if label != 0.0 && label != 1.0 {
            return Err(Error::NonBinaryLabel(label));
        }
        Ok(LabeledSample { point, label })
    }

    pub fn from_bool(point: StateVector, inside: bool) -> Self {
        LabeledSample {
            point,
            label: if inside { 1.0 } else { 0.0 },
        }
    }

    pub fn inside(&self) -> bool {
        self.label == 1.0
    }
}

/// Least-squares GP classifier conditioned on labeled samples.
///
/// Holds the lower Cholesky factor `L` of `K + λI` and the weights
/// `(K + λI)⁻¹·y`, so that each posterior query costs one kernel row and one
/// triangular solve.
#[derive(Debug, Clone)]
pub struct GpcModel {
    kernel: SqExpKernel,
    regularization: f64,
    training: Vec<LabeledSample>,
    factor: DMatrix<f64>,
    weights: DVector<f64>,
}

fn gram(kernel: &SqExpKernel, points: &[&[f64]], regularization: f64) -> DMatrix<f64> {
    let n = points.len();
    let mut k = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..i {
            let v = kernel.eval(points[i], points[j]);
            k[(i, j)] = v;
            k[(j, i)] = v;
        }
        k[(i, i)] = kernel.amplitude + regularization;
    }
    k
}

fn check_inputs(samples: &[LabeledSample], kernel: &SqExpKernel, regularization: f64) -> Result<()> {
    if samples.is_empty() {
        return Err(Error::invalid("samples", "at least one labeled sample is required"));
    }
    if !(regularization >= 0.0 && regularization.is_finite()) {
        return Err(Error::invalid(
            "regularization",
            format!("must be nonnegative, got {regularization}"),
        ));
    }
    for s in samples {
        if s.point.dim() != kernel.dim() {
            return Err(Error::Dimension {
                expected: kernel.dim(),
                got: s.point.dim(),
            });
        }
    }
    Ok(())
}

/// Cholesky factor of `K + λI` and the label weights.
fn factorize(
    samples: &[LabeledSample],
    kernel: &SqExpKernel,
    regularization: f64,
) -> Result<(DMatrix<f64>, DVector<f64>, DVector<f64>)> {
    let points: Vec<&[f64]> = samples.iter().map(|s| s.point.as_slice()).collect();
    let k = gram(kernel, &points, regularization);
    let chol = k.clone().cholesky().ok_or(Error::Factorization { regularization })?;
    let y = DVector::from_iterator(samples.len(), samples.iter().map(|s| s.label));
    let mut weights = chol.solve(&y);
    // One step of iterative refinement keeps the residual y − (K + λI)·w at
    // roundoff level even when nearby inputs make the Gram matrix ill-conditioned.
    let residual = &y - &k * &weights;
    weights += chol.solve(&residual);
    if weights.iter().any(|w| !w.is_finite()) {
        return Err(Error::Factorization { regularization });
    }
    Ok((chol.unpack(), weights, y))
}

/// Conditions the GP on `samples`.
pub fn fit(samples: &[LabeledSample], kernel: &SqExpKernel, regularization: f64) -> Result<GpcModel> {
    check_inputs(samples, kernel, regularization)?;
    let (factor, weights, _) = factorize(samples, kernel, regularization)?;
    Ok(GpcModel {
        kernel: kernel.clone(),
        regularization,
        training: samples.to_vec(),
        factor,
        weights,
    })
}

/// Gaussian evidence `−½yᵀ(K+λI)⁻¹y − ½log det(K+λI) − (m/2)·log 2π`.
pub fn log_marginal_likelihood(samples: &[LabeledSample], kernel: &SqExpKernel, regularization: f64) -> Result<f64> {
    check_inputs(samples, kernel, regularization)?;
    let (factor, weights, y) = factorize(samples, kernel, regularization)?;
    Ok(evidence(&factor, &weights, &y))
}

pub(crate) fn evidence(factor: &DMatrix<f64>, weights: &DVector<f64>, y: &DVector<f64>) -> f64 {
    let m = y.len() as f64;
    let half_log_det: f64 = factor.diagonal().iter().map(|d| d.ln()).sum();
    -0.5 * y.dot(weights) - half_log_det - 0.5 * m * (2.0 * std::f64::consts::PI).ln()
}

impl GpcModel {
    pub fn kernel(&self) -> &SqExpKernel {
        &self.kernel
    }

    pub fn regularization(&self) -> f64 {
        self.regularization
    }

    pub fn training(&self) -> &[LabeledSample] {
        &self.training
    }

    fn cross_covariance(&self, x: &[f64]) -> DVector<f64> {
        DVector::from_iterator(
            self.training.len(),
            self.training.iter().map(|s| self.kernel.eval(x, &s.point)),
        )
    }

    /// Posterior mean only; cheaper than [`GpcModel::posterior`].
    pub fn mean(&self, x: &[f64]) -> f64 {
        self.training
            .iter()
            .zip(self.weights.iter())
            .map(|(s, w)| w * self.kernel.eval(x, &s.point))
            .sum()
    }

    /// Posterior `(mean, variance)` at `x`; variance is clamped to `[0, σ]`.
    pub fn posterior(&self, x: &[f64]) -> (f64, f64) {
        let kx = self.cross_covariance(x);
        let mean = kx.dot(&self.weights);
        let v = self
            .factor
            .solve_lower_triangular(&kx)
            .expect("factor has a positive diagonal");
        let variance = (self.kernel.amplitude - v.norm_squared()).clamp(0.0, self.kernel.amplitude);
        (mean, variance)
    }

    /// Evidence of the training data under this model's hyperparameters.
    pub fn log_marginal_likelihood(&self) -> f64 {
        let y = DVector::from_iterator(self.training.len(), self.training.iter().map(|s| s.label));
        evidence(&self.factor, &self.weights, &y)
    }
}

/// Free-function form of [`GpcModel::posterior`] with a dimension check.
pub fn posterior(model: &GpcModel, x: &[f64]) -> Result<(f64, f64)> {
    if x.len() != model.kernel.dim() {
        return Err(Error::Dimension {
            expected: model.kernel.dim(),
            got: x.len(),
        });
    }
    Ok(model.posterior(x))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(p: &[f64], label: f64) -> LabeledSample {
        LabeledSample::new(StateVector::new(p.to_vec()).unwrap(), label).unwrap()
    }

    #[test]
    fn labels_must_be_binary() {
        let p = StateVector::new(vec![0.0]).unwrap();
        assert_eq!(LabeledSample::new(p, 0.5), Err(Error::NonBinaryLabel(0.5)));
    }

    #[test]
    fn single_sample_interpolates() {
        let k = SqExpKernel::new(1.3, vec![2.0]).unwrap();
        let m = fit(&[sample(&[0.4], 1.0)], &k, 0.0).unwrap();
        let (mean, var) = m.posterior(&[0.4]);
        assert!((mean - 1.0).abs() < 1e-15);
        assert!(var.abs() < 1e-15);
    }

    #[test]
    fn far_query_reverts_to_prior() {
        let k = SqExpKernel::new(0.7, vec![1.0, 1.0]).unwrap();
        let m = fit(&[sample(&[0.0, 0.0], 1.0), sample(&[0.5, 0.1], 0.0)], &k, 1e-6).unwrap();
        let (mean, var) = m.posterior(&[100.0, -100.0]);
        assert!(mean.abs() < 1e-12);
        assert!((var - 0.7).abs() < 1e-12);
    }

    #[test]
    fn two_samples_match_hand_solution() {
        let k = SqExpKernel::new(1.5, vec![0.8]).unwrap();
        let lambda = 0.01;
        let (x1, x2, y1, y2) = (0.0, 0.7, 1.0, 0.0);
        let m = fit(&[sample(&[x1], y1), sample(&[x2], y2)], &k, lambda).unwrap();

        // Explicit 2x2 inverse.
        let k12 = 1.5 * (-0.8f64 * 0.49).exp();
        let (a, d) = (1.5 + lambda, 1.5 + lambda);
        let det = a * d - k12 * k12;
        let inv = [[d / det, -k12 / det], [-k12 / det, a / det]];
        for q in [-0.3, 0.2, 0.35, 1.1] {
            let kx = [
                1.5 * (-0.8 * (q - x1) * (q - x1)).exp(),
                1.5 * (-0.8 * (q - x2) * (q - x2)).exp(),
            ];
            let alpha = [inv[0][0] * y1 + inv[0][1] * y2, inv[1][0] * y1 + inv[1][1] * y2];
            let mean = kx[0] * alpha[0] + kx[1] * alpha[1];
            let quad =
                kx[0] * (inv[0][0] * kx[0] + inv[0][1] * kx[1]) + kx[1] * (inv[1][0] * kx[0] + inv[1][1] * kx[1]);
            let (m_mean, m_var) = m.posterior(&[q]);
            assert!((m_mean - mean).abs() < 1e-12);
            assert!((m_var - (1.5 - quad)).abs() < 1e-12);
        }
    }

    #[test]
    fn singular_gram_fails_without_regularization() {
        let k = SqExpKernel::new(1.0, vec![1.0]).unwrap();
        let dup = [sample(&[0.5], 1.0), sample(&[0.5], 0.0)];
        assert!(matches!(fit(&dup, &k, 0.0), Err(Error::Factorization { .. })));
        assert!(fit(&dup, &k, 1e-3).is_ok());
    }

    #[test]
    fn evidence_single_zero_label() {
        let k = SqExpKernel::new(2.0, vec![1.0]).unwrap();
        let lml = log_marginal_likelihood(&[sample(&[3.0], 0.0)], &k, 0.5).unwrap();
        let expected = -0.5 * 2.5f64.ln() - 0.5 * (2.0 * std::f64::consts::PI).ln();
        assert!((lml - expected).abs() < 1e-14);
    }

    #[test]
    fn evidence_three_samples_dense() {
        let k = SqExpKernel::new(0.9, vec![1.7, 0.4]).unwrap();
        let lambda = 0.05;
        let s = [
            sample(&[0.0, 0.0], 1.0),
            sample(&[0.3, 1.0], 0.0),
            sample(&[-0.4, 0.6], 1.0),
        ];
        let lml = log_marginal_likelihood(&s, &k, lambda).unwrap();

        let mut m = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                m[i][j] = k.eval(&s[i].point, &s[j].point) + if i == j { lambda } else { 0.0 };
            }
        }
        // Cofactor expansion and adjugate inverse.
        let det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
        let cof = |r: usize, c: usize| {
            let rows: Vec<usize> = (0..3).filter(|&i| i != r).collect();
            let cols: Vec<usize> = (0..3).filter(|&j| j != c).collect();
            let minor = m[rows[0]][cols[0]] * m[rows[1]][cols[1]] - m[rows[0]][cols[1]] * m[rows[1]][cols[0]];
            if (r + c).is_multiple_of(2) {
                minor
            } else {
                -minor
            }
        };
        let y = [1.0, 0.0, 1.0];
        let mut quad = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                quad += y[i] * cof(j, i) / det * y[j];
            }
        }
        let expected = -0.5 * quad - 0.5 * det.ln() - 1.5 * (2.0 * std::f64::consts::PI).ln();
        assert!((lml - expected).abs() < 1e-10, "{lml} vs {expected}");
        let model = fit(&s, &k, lambda).unwrap();
        assert!((model.log_marginal_likelihood() - lml).abs() < 1e-14);
    }

    #[test]
    fn evidence_is_permutation_invariant() {
        use crate::SeededRng;
        let k = SqExpKernel::new(1.0, vec![2.0, 2.0]).unwrap();
        for seed in 0..20 {
            let mut g = SeededRng::new(seed).generator();
            let mut s: Vec<LabeledSample> = (0..5)
                .map(|i| sample(&[g.uniform(0.0, 1.0), g.uniform(0.0, 1.0)], (i % 2) as f64))
                .collect();
            let before = log_marginal_likelihood(&s, &k, 1e-4).unwrap();
            g.shuffle(&mut s);
            let after = log_marginal_likelihood(&s, &k, 1e-4).unwrap();
            assert!((before - after).abs() < 1e-9);
        }
    }

    #[test]
    fn fit_checks_inputs() {
        let k = SqExpKernel::new(1.0, vec![1.0]).unwrap();
        assert!(fit(&[], &k, 0.0).is_err());
        assert!(fit(&[sample(&[0.0, 1.0], 1.0)], &k, 0.0).is_err());
        assert!(fit(&[sample(&[0.0], 1.0)], &k, -1.0).is_err());
        let m = fit(&[sample(&[0.0], 1.0)], &k, 0.0).unwrap();
        assert!(posterior(&m, &[0.0, 0.0]).is_err());
    }
}
