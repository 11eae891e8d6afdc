//! Least-squares Gaussian-process classification of reachable (or safe)
//! sets, with adaptive sample selection.
//!
//! Labels are 1 for points in the set and 0 outside. The GP posterior mean
//! is thresholded at γ (0.5 by default): `μ(x) ≥ γ` predicts "in the set".
//! New samples are chosen from a Latin-hypercube candidate pool by
//! maximizing the probability of misclassification `Φ(−|μ − γ| / σ)`.

mod adaptive;
mod hyper;
mod kernel;
mod model;

pub use adaptive::{
    adaptive_select, grid_accuracy, run_adaptive_gpc, run_static_gpc, GpcConfig, GpcReachEstimate, SamplingStrategy,
};
pub use hyper::{fit_hyperparameters, maximize_evidence};
pub use kernel::{kernel_eval, SqExpKernel};
pub use model::{fit, log_marginal_likelihood, posterior, GpcModel, LabeledSample};

/// Standard normal CDF.
pub fn normal_cdf(z: f64) -> f64 {
    0.5 * libm::erfc(-z / std::f64::consts::SQRT_2)
}

/// Probability that thresholding the posterior at `threshold` misclassifies
/// a point with posterior mean `mean` and standard deviation `std`.
/// Always in `[0, 0.5]`.
pub fn p_misclass(mean: f64, std: f64, threshold: f64) -> f64 {
    let gap = (mean - threshold).abs();
    if gap == 0.0 {
        return 0.5;
    }
    if std <= 0.0 {
        return 0.0;
    }
    normal_cdf(-gap / std).clamp(0.0, 0.5)
}
