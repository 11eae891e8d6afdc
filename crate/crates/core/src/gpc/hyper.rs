//! Maximum-likelihood hyperparameters by deterministic multi-start
//! coordinate search in log space.

use nalgebra::{DMatrix, DVector};

use super::model::evidence;
use super::{LabeledSample, SqExpKernel};
use crate::{interval_hull, Error, Result, SeededRng};

/// Lengthscale search range, as multiples of the data extent per axis.
const LENGTHSCALE_RANGE: (f64, f64) = (1e-2, 10.0);
/// Amplitude search range.
const AMPLITUDE_RANGE: (f64, f64) = (1e-2, 1e2);
/// Start lattice: amplitudes × isotropic lengthscale multiples (3 × 3).
const START_AMPLITUDES: [f64; 3] = [0.1, 1.0, 10.0];
const START_LENGTHSCALES: [f64; 3] = [
    0.031_622_776_601_683_79,
    0.316_227_766_016_837_94,
    3.162_277_660_168_379_5,
];
const START_JITTER: f64 = 0.1;
/// Half-width of each golden-section bracket around the current coordinate.
const LINE_WINDOW: f64 = 1.5;
const LOG_TOLERANCE: f64 = 1e-3;
const MAX_SWEEPS: usize = 8;

/// Kernel maximizing the evidence of binary-labeled samples. Both labels
/// must be present; a one-class data set has no informative optimum.
pub fn fit_hyperparameters(samples: &[LabeledSample], regularization: f64, rng: &SeededRng) -> Result<SqExpKernel> {
    if samples.len() < 2 {
        return Err(Error::invalid("samples", "need at least two labeled samples"));
    }
    if samples.iter().all(|s| s.inside()) || samples.iter().all(|s| !s.inside()) {
        return Err(Error::invalid("samples", "both class labels must be present"));
    }
    let points: Vec<&[f64]> = samples.iter().map(|s| s.point.as_slice()).collect();
    let targets: Vec<f64> = samples.iter().map(|s| s.label).collect();
    maximize_evidence(&points, &targets, regularization, rng).map(|(k, _)| k)
}

/// Evidence maximization for arbitrary real targets. Returns the kernel and
/// its log marginal likelihood.
pub fn maximize_evidence(
    points: &[&[f64]],
    targets: &[f64],
    regularization: f64,
    rng: &SeededRng,
) -> Result<(SqExpKernel, f64)> {
    if points.is_empty() || points.len() != targets.len() {
        return Err(Error::invalid(
            "points",
            "need one target per point and at least one point",
        ));
    }
    let dim = points[0].len();
    let bounds = Bounds::around(points)?;
    let objective = Evidence::new(points, targets, regularization);
    let starts = bounds.start_lattice(rng);

    let search = |theta: &Vec<f64>| local_search(&objective, theta.clone(), &bounds);
    #[cfg(feature = "parallel")]
    let results: Vec<(Vec<f64>, f64)> = {
        use rayon::prelude::*;
        starts.par_iter().map(search).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let results: Vec<(Vec<f64>, f64)> = starts.iter().map(search).collect();

    // First strictly better wins, so the result does not depend on scheduling.
    let (theta, neg) = results
        .into_iter()
        .fold(None::<(Vec<f64>, f64)>, |best, cand| match best {
            Some(b) if b.1 <= cand.1 => Some(b),
            _ => Some(cand),
        })
        .expect("nine starts");
    if !neg.is_finite() {
        return Err(Error::Factorization { regularization });
    }
    let kernel = SqExpKernel::new(theta[0].exp(), theta[1..=dim].iter().map(|t| t.exp()).collect())?;
    Ok((kernel, -neg))
}

/// Box in θ = (ln σ, ln w₁, …, ln w_n) space, with w = 1/L², scaled to the
/// extent of the data along each axis.
struct Bounds {
    extent: Vec<f64>,
    lower: Vec<f64>,
    upper: Vec<f64>,
}

fn log_weight(lengthscale: f64) -> f64 {
    -2.0 * lengthscale.ln()
}

impl Bounds {
    fn around(points: &[&[f64]]) -> Result<Self> {
        let extent: Vec<f64> = interval_hull(points)?
            .widths()
            .into_iter()
            .map(|w| if w > 0.0 { w } else { 1.0 })
            .collect();
        let mut lower = vec![AMPLITUDE_RANGE.0.ln()];
        let mut upper = vec![AMPLITUDE_RANGE.1.ln()];
        for &e in &extent {
            lower.push(log_weight(LENGTHSCALE_RANGE.1 * e));
            upper.push(log_weight(LENGTHSCALE_RANGE.0 * e));
        }
        Ok(Bounds { extent, lower, upper })
    }

    /// Nine jittered starts: three amplitudes × three isotropic lengthscales.
    fn start_lattice(&self, rng: &SeededRng) -> Vec<Vec<f64>> {
        let mut g = rng.generator();
        let mut starts = Vec::with_capacity(9);
        for &amp in &START_AMPLITUDES {
            for &mult in &START_LENGTHSCALES {
                let mut theta = vec![amp.ln()];
                theta.extend(self.extent.iter().map(|&e| log_weight(mult * e)));
                for (i, t) in theta.iter_mut().enumerate() {
                    *t = (*t + g.uniform(-START_JITTER, START_JITTER)).clamp(self.lower[i], self.upper[i]);
                }
                starts.push(theta);
            }
        }
        starts
    }
}

/// Negative log evidence with the pairwise squared differences cached.
struct Evidence {
    n: usize,
    dim: usize,
    /// `sq_diff[d][i * n + j]` for `j < i`.
    sq_diff: Vec<Vec<f64>>,
    targets: DVector<f64>,
    regularization: f64,
}

impl Evidence {
    fn new(points: &[&[f64]], targets: &[f64], regularization: f64) -> Self {
        let n = points.len();
        let dim = points[0].len();
        let mut sq_diff = vec![vec![0.0; n * n]; dim];
        for (d, table) in sq_diff.iter_mut().enumerate() {
            for i in 0..n {
                for j in 0..i {
                    let diff = points[i][d] - points[j][d];
                    table[i * n + j] = diff * diff;
                }
            }
        }
        Evidence {
            n,
            dim,
            sq_diff,
            targets: DVector::from_column_slice(targets),
            regularization,
        }
    }

    /// −log evidence at θ; `+∞` when the Gram matrix does not factor.
    fn negative(&self, theta: &[f64]) -> f64 {
        let amp = theta[0].exp();
        let w: Vec<f64> = theta[1..=self.dim].iter().map(|t| t.exp()).collect();
        let n = self.n;
        let mut k = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..i {
                let r: f64 = (0..self.dim).map(|d| w[d] * self.sq_diff[d][i * n + j]).sum();
                let v = amp * (-r).exp();
                k[(i, j)] = v;
                k[(j, i)] = v;
            }
            k[(i, i)] = amp + self.regularization;
        }
        let Some(chol) = k.cholesky() else {
            return f64::INFINITY;
        };
        let weights = chol.solve(&self.targets);
        let value = -evidence(&chol.unpack(), &weights, &self.targets);
        if value.is_finite() {
            value
        } else {
            f64::INFINITY
        }
    }
}

/// Coordinate-wise golden-section sweeps, each followed by a pattern
/// (extrapolation) step along the sweep's net displacement to make progress
/// along ridges where amplitude and lengthscales trade off.
fn local_search(objective: &Evidence, mut theta: Vec<f64>, bounds: &Bounds) -> (Vec<f64>, f64) {
    let mut best = objective.negative(&theta);
    for _ in 0..MAX_SWEEPS {
        let before = theta.clone();
        let mut largest_move: f64 = 0.0;
        for i in 0..theta.len() {
            let lo = (theta[i] - LINE_WINDOW).max(bounds.lower[i]);
            let hi = (theta[i] + LINE_WINDOW).min(bounds.upper[i]);
            let mut probe = theta.clone();
            let (t, value) = golden_section(
                |t| {
                    probe[i] = t;
                    objective.negative(&probe)
                },
                lo,
                hi,
                LOG_TOLERANCE,
            );
            if value < best {
                largest_move = largest_move.max((t - theta[i]).abs());
                theta[i] = t;
                best = value;
            }
        }
        if largest_move < LOG_TOLERANCE {
            break;
        }
        let pattern: Vec<f64> = theta
            .iter()
            .zip(&before)
            .enumerate()
            .map(|(i, (t, b))| (2.0 * t - b).clamp(bounds.lower[i], bounds.upper[i]))
            .collect();
        let value = objective.negative(&pattern);
        if value < best {
            theta = pattern;
            best = value;
        }
    }
    (theta, best)
}

/// Minimizes `f` on `[lo, hi]` to bracket width `tol`; returns the best
/// point evaluated.
fn golden_section<F: FnMut(f64) -> f64>(mut f: F, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > tol {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
    }
    if f1 <= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}
