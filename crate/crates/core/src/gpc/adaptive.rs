//! Sampling strategies that build a classifier from a label oracle.

use log::warn;

use super::{fit, fit_hyperparameters, p_misclass, GpcModel, LabeledSample, SqExpKernel};
use crate::sampling::{lhs_sample, uniform_sample};
use crate::{Error, IntervalBox, Result, SeededRng, StateVector};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GpcConfig {
    /// λ added to the Gram diagonal.
    pub regularization: f64,
    /// γ; a point is in the set when the posterior mean is at least this.
    pub threshold: f64,
    /// Refit hyperparameters after this many new labels.
    pub refit_every: usize,
    /// Random pool members labeled before adaptive selection starts.
    pub initial_samples: usize,
    /// Extra random draws allowed while waiting for the second class.
    pub bootstrap_cap: usize,
}

impl Default for GpcConfig {
    fn default() -> Self {
        GpcConfig {
            regularization: 1e-6,
            threshold: 0.5,
            refit_every: 10,
            initial_samples: 3,
            bootstrap_cap: 50,
        }
    }
}

impl GpcConfig {
    fn validate(&self) -> Result<()> {
        if !(self.threshold > 0.0 && self.threshold < 1.0) {
            return Err(Error::invalid(
                "threshold",
                format!("must lie strictly between the labels 0 and 1, got {}", self.threshold),
            ));
        }
        if !(self.regularization >= 0.0 && self.regularization.is_finite()) {
            return Err(Error::invalid(
                "regularization",
                format!("must be nonnegative, got {}", self.regularization),
            ));
        }
        if self.refit_every == 0 || self.initial_samples == 0 {
            return Err(Error::invalid(
                "config",
                "refit_every and initial_samples must be positive",
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SamplingStrategy {
    Adaptive,
    Uniform,
    LatinHypercube,
}

/// A fitted classifier and its decision threshold.
#[derive(Debug, Clone)]
pub struct GpcReachEstimate {
    pub model: GpcModel,
    pub threshold: f64,
    /// Set when only one class was ever observed; the estimate then assigns
    /// this class everywhere.
    pub constant_class: Option<bool>,
    /// Number of label oracle calls made.
    pub label_evaluations: usize,
}

impl GpcReachEstimate {
    /// In-set prediction: posterior mean at or above the threshold.
    pub fn classify(&self, x: &[f64]) -> bool {
        match self.constant_class {
            Some(c) => c,
            None => self.model.mean(x) >= self.threshold,
        }
    }

    pub fn is_degenerate(&self) -> bool {
        self.constant_class.is_some()
    }

    pub fn samples(&self) -> &[LabeledSample] {
        self.model.training()
    }
}

/// Index of the candidate with the highest misclassification probability;
/// ties go to the lowest index.
pub fn adaptive_select<P: AsRef<[f64]> + Sync>(model: &GpcModel, candidates: &[P], threshold: f64) -> Result<usize> {
    if candidates.is_empty() {
        return Err(Error::invalid("candidates", "candidate pool is empty"));
    }
    let score = |c: &P| {
        let (mean, var) = model.posterior(c.as_ref());
        p_misclass(mean, var.sqrt(), threshold)
    };
    #[cfg(feature = "parallel")]
    let scores: Vec<f64> = {
        use rayon::prelude::*;
        candidates.par_iter().map(score).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let scores: Vec<f64> = candidates.iter().map(score).collect();

    let mut best = 0;
    for (i, &s) in scores.iter().enumerate().skip(1) {
        if s > scores[best] {
            best = i;
        }
    }
    Ok(best)
}

fn label<F>(label_fn: &mut F, x: &StateVector) -> Result<LabeledSample>
where
    F: FnMut(&StateVector) -> Result<f64>,
{
    LabeledSample::new(x.clone(), label_fn(x)?)
}

fn both_classes(samples: &[LabeledSample]) -> bool {
    samples.iter().any(|s| s.inside()) && samples.iter().any(|s| !s.inside())
}

/// Fallback kernel for one-class data: unit amplitude, lengthscale equal to
/// the region width.
fn default_kernel(region: &IntervalBox) -> Result<SqExpKernel> {
    let ls: Vec<f64> = region
        .widths()
        .into_iter()
        .map(|w| if w > 0.0 { w } else { 1.0 })
        .collect();
    SqExpKernel::from_lengthscales(1.0, &ls)
}

fn constant_estimate(
    samples: Vec<LabeledSample>,
    region: &IntervalBox,
    cfg: &GpcConfig,
    evaluations: usize,
) -> Result<GpcReachEstimate> {
    let class = samples[0].inside();
    warn!(
        "all {} labels are {}; returning a constant classifier",
        samples.len(),
        if class { "in-set" } else { "out-of-set" }
    );
    let model = fit(&samples, &default_kernel(region)?, cfg.regularization.max(1e-6))?;
    Ok(GpcReachEstimate {
        model,
        threshold: cfg.threshold,
        constant_class: Some(class),
        label_evaluations: evaluations,
    })
}

/// Adaptive GPC: an LHS pool of `pool_size` candidates, a few random
/// initial labels, then `budget − initial` labels chosen one at a time by
/// maximizing the probability of misclassification.
pub fn run_adaptive_gpc<F>(
    mut label_fn: F,
    region: &IntervalBox,
    budget: usize,
    pool_size: usize,
    cfg: &GpcConfig,
    rng: &SeededRng,
) -> Result<GpcReachEstimate>
where
    F: FnMut(&StateVector) -> Result<f64>,
{
    cfg.validate()?;
    if budget <= cfg.initial_samples {
        return Err(Error::invalid(
            "budget",
            format!("must exceed the {} initial samples, got {budget}", cfg.initial_samples),
        ));
    }
    if pool_size < budget {
        return Err(Error::invalid(
            "pool_size",
            format!("must be at least the budget {budget}, got {pool_size}"),
        ));
    }

    let pool = lhs_sample(region, pool_size, &rng.fork(1));
    let mut order: Vec<usize> = (0..pool_size).collect();
    rng.fork(2).generator().shuffle(&mut order);

    let mut labeled = vec![false; pool_size];
    let mut samples = Vec::with_capacity(budget + cfg.bootstrap_cap);
    let mut drawn = 0;
    while drawn < order.len()
        && (drawn < cfg.initial_samples || (!both_classes(&samples) && drawn < cfg.initial_samples + cfg.bootstrap_cap))
    {
        let idx = order[drawn];
        samples.push(label(&mut label_fn, &pool[idx])?);
        labeled[idx] = true;
        drawn += 1;
    }
    if !both_classes(&samples) {
        let n = samples.len();
        return constant_estimate(samples, region, cfg, n);
    }

    let hyper_rng = rng.fork(3);
    let mut kernel = fit_hyperparameters(&samples, cfg.regularization, &hyper_rng.fork(0))?;
    let mut since_refit = 0;
    let mut refits = 1u64;
    for _ in 0..budget - cfg.initial_samples {
        if since_refit >= cfg.refit_every {
            kernel = fit_hyperparameters(&samples, cfg.regularization, &hyper_rng.fork(refits))?;
            refits += 1;
            since_refit = 0;
        }
        let model = fit(&samples, &kernel, cfg.regularization)?;
        let remaining: Vec<usize> = (0..pool_size).filter(|&i| !labeled[i]).collect();
        if remaining.is_empty() {
            break;
        }
        let candidates: Vec<&StateVector> = remaining.iter().map(|&i| &pool[i]).collect();
        let pick = remaining[adaptive_select(&model, &candidates, cfg.threshold)?];
        samples.push(label(&mut label_fn, &pool[pick])?);
        labeled[pick] = true;
        since_refit += 1;
    }
    if since_refit >= cfg.refit_every {
        kernel = fit_hyperparameters(&samples, cfg.regularization, &hyper_rng.fork(refits))?;
    }
    let label_evaluations = samples.len();
    Ok(GpcReachEstimate {
        model: fit(&samples, &kernel, cfg.regularization)?,
        threshold: cfg.threshold,
        constant_class: None,
        label_evaluations,
    })
}

/// Non-adaptive baseline: label `budget` points drawn uniformly or by LHS
/// over `region`, fit hyperparameters once, and condition on all of them.
pub fn run_static_gpc<F>(
    mut label_fn: F,
    region: &IntervalBox,
    budget: usize,
    strategy: SamplingStrategy,
    cfg: &GpcConfig,
    rng: &SeededRng,
) -> Result<GpcReachEstimate>
where
    F: FnMut(&StateVector) -> Result<f64>,
{
    cfg.validate()?;
    if budget == 0 {
        return Err(Error::invalid("budget", "must be positive"));
    }
    let points = match strategy {
        SamplingStrategy::Uniform => uniform_sample(region, budget, &rng.fork(1)),
        SamplingStrategy::LatinHypercube => lhs_sample(region, budget, &rng.fork(1)),
        SamplingStrategy::Adaptive => {
            return Err(Error::invalid("strategy", "use run_adaptive_gpc for adaptive sampling"));
        }
    };
    let samples = points
        .iter()
        .map(|p| label(&mut label_fn, p))
        .collect::<Result<Vec<_>>>()?;
    if !both_classes(&samples) {
        return constant_estimate(samples, region, cfg, budget);
    }
    let kernel = fit_hyperparameters(&samples, cfg.regularization, &rng.fork(3))?;
    Ok(GpcReachEstimate {
        model: fit(&samples, &kernel, cfg.regularization)?,
        threshold: cfg.threshold,
        constant_class: None,
        label_evaluations: budget,
    })
}

/// Fraction of a `resolution × … × resolution` grid of cell centres over
/// `region` where the estimate agrees with `truth`.
pub fn grid_accuracy<T>(estimate: &GpcReachEstimate, region: &IntervalBox, resolution: usize, truth: T) -> f64
where
    T: Fn(&[f64]) -> bool + Sync,
{
    let cells = grid_points(region, resolution);
    let agree = |p: &Vec<f64>| (estimate.classify(p) == truth(p)) as usize;
    #[cfg(feature = "parallel")]
    let hits: usize = {
        use rayon::prelude::*;
        cells.par_iter().map(agree).sum()
    };
    #[cfg(not(feature = "parallel"))]
    let hits: usize = cells.iter().map(agree).sum();
    hits as f64 / cells.len() as f64
}

/// Cell centres of a regular grid, first axis varying slowest.
pub(crate) fn grid_points(region: &IntervalBox, resolution: usize) -> Vec<Vec<f64>> {
    let dim = region.dim();
    let total = resolution.pow(dim as u32);
    (0..total)
        .map(|mut flat| {
            let mut p = vec![0.0; dim];
            for axis in (0..dim).rev() {
                let k = flat % resolution;
                flat /= resolution;
                p[axis] = region.lower()[axis] + region.width(axis) * (k as f64 + 0.5) / resolution as f64;
            }
            p
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gpc::p_misclass;

    fn sample(p: &[f64], label: f64) -> LabeledSample {
        LabeledSample::new(StateVector::new(p.to_vec()).unwrap(), label).unwrap()
    }

    fn sv(p: &[f64]) -> StateVector {
        StateVector::new(p.to_vec()).unwrap()
    }

    fn toy_model() -> GpcModel {
        let k = SqExpKernel::new(1.0, vec![4.0]).unwrap();
        fit(&[sample(&[0.0], 1.0), sample(&[1.0], 0.0)], &k, 1e-6).unwrap()
    }

    #[test]
    fn select_prefers_point_on_threshold() {
        let model = toy_model();
        // By symmetry the posterior mean at 0.5 is exactly... close to 0.5; find it.
        let cands = vec![sv(&[0.0]), sv(&[0.5]), sv(&[1.0])];
        assert_eq!(adaptive_select(&model, &cands, 0.5).unwrap(), 1);
    }

    #[test]
    fn select_ties_take_lowest_index() {
        let model = toy_model();
        let cands = vec![sv(&[0.3]); 5];
        assert_eq!(adaptive_select(&model, &cands, 0.5).unwrap(), 0);
        let empty: Vec<StateVector> = vec![];
        assert!(adaptive_select(&model, &empty, 0.5).is_err());
    }

    #[test]
    fn select_matches_brute_force() {
        let k = SqExpKernel::new(0.8, vec![3.0, 1.0]).unwrap();
        let mut g = SeededRng::new(12).generator();
        let train: Vec<LabeledSample> = (0..12)
            .map(|_| {
                let p = [g.uniform(0.0, 1.0), g.uniform(0.0, 1.0)];
                sample(&p, (p[0] + p[1] > 1.0) as u8 as f64)
            })
            .collect();
        let model = fit(&train, &k, 1e-6).unwrap();
        for round in 0..10 {
            let cands: Vec<Vec<f64>> = (0..100)
                .map(|_| vec![g.uniform(0.0, 1.0), g.uniform(0.0, 1.0)])
                .collect();
            let mut best = (0, -1.0);
            for (i, c) in cands.iter().enumerate() {
                let (m, v) = model.posterior(c);
                let p = p_misclass(m, v.sqrt(), 0.5);
                if p > best.1 {
                    best = (i, p);
                }
            }
            assert_eq!(adaptive_select(&model, &cands, 0.5).unwrap(), best.0, "round {round}");
        }
    }

    fn disc_label(x: &StateVector) -> Result<f64> {
        Ok(((x[0] - 0.5).powi(2) + (x[1] - 0.5).powi(2) < 0.09) as u8 as f64)
    }

    #[test]
    fn constant_labels_give_constant_classifier() {
        let region = IntervalBox::cube(2, 0.0, 1.0).unwrap();
        let est = run_adaptive_gpc(|_| Ok(1.0), &region, 20, 100, &GpcConfig::default(), &SeededRng::new(1)).unwrap();
        assert_eq!(est.constant_class, Some(true));
        assert_eq!(est.label_evaluations, 53);
        assert!(est.classify(&[0.1, 0.9]));
        let est = run_static_gpc(
            |_| Ok(0.0),
            &region,
            20,
            SamplingStrategy::Uniform,
            &GpcConfig::default(),
            &SeededRng::new(1),
        )
        .unwrap();
        assert_eq!(est.constant_class, Some(false));
        assert!(!est.classify(&[0.5, 0.5]));
    }

    #[test]
    fn non_binary_label_is_an_error() {
        let region = IntervalBox::cube(2, 0.0, 1.0).unwrap();
        let err =
            run_adaptive_gpc(|_| Ok(0.3), &region, 10, 100, &GpcConfig::default(), &SeededRng::new(1)).unwrap_err();
        assert_eq!(err, Error::NonBinaryLabel(0.3));
    }

    #[test]
    fn rejects_bad_budgets() {
        let region = IntervalBox::cube(2, 0.0, 1.0).unwrap();
        let cfg = GpcConfig::default();
        assert!(run_adaptive_gpc(disc_label, &region, 3, 100, &cfg, &SeededRng::new(1)).is_err());
        assert!(run_adaptive_gpc(disc_label, &region, 50, 40, &cfg, &SeededRng::new(1)).is_err());
        let bad = GpcConfig { threshold: 1.0, ..cfg };
        assert!(run_adaptive_gpc(disc_label, &region, 10, 100, &bad, &SeededRng::new(1)).is_err());
    }

    #[test]
    fn minimal_budget_runs() {
        let region = IntervalBox::cube(2, 0.0, 1.0).unwrap();
        let half = |x: &StateVector| Ok((x[0] > 0.5) as u8 as f64);
        let est = run_adaptive_gpc(half, &region, 4, 50, &GpcConfig::default(), &SeededRng::new(4)).unwrap();
        assert!(est.label_evaluations >= 4);
        assert!(est.constant_class.is_none());
    }

    #[test]
    fn adaptive_learns_a_disc() {
        let region = IntervalBox::cube(2, 0.0, 1.0).unwrap();
        let rng = SeededRng::new(2);
        let est = run_adaptive_gpc(disc_label, &region, 60, 500, &GpcConfig::default(), &rng).unwrap();
        assert_eq!(est.label_evaluations, 60);
        let acc = grid_accuracy(&est, &region, 60, |p| disc_label(&sv(p)).unwrap() == 1.0);
        assert!(acc > 0.95, "accuracy {acc}");
        // Deterministic given the seed.
        let again = run_adaptive_gpc(disc_label, &region, 60, 500, &GpcConfig::default(), &rng).unwrap();
        assert_eq!(est.samples(), again.samples());
    }

    #[test]
    fn classify_matches_posterior_sign() {
        let region = IntervalBox::cube(2, 0.0, 1.0).unwrap();
        let est = run_static_gpc(
            disc_label,
            &region,
            40,
            SamplingStrategy::LatinHypercube,
            &GpcConfig::default(),
            &SeededRng::new(9),
        )
        .unwrap();
        for p in grid_points(&region, 30) {
            let (mean, _) = est.model.posterior(&p);
            assert_eq!(est.classify(&p), mean - 0.5 >= 0.0);
        }
        for s in est.samples() {
            assert_eq!(est.classify(&s.point), s.inside());
        }
    }

    #[test]
    fn label_swap_flips_training_predictions() {
        let mut g = SeededRng::new(30).generator();
        let k = SqExpKernel::new(1.0, vec![10.0, 10.0]).unwrap();
        let train: Vec<LabeledSample> = (0..15)
            .map(|_| {
                let p = [g.uniform(0.0, 1.0), g.uniform(0.0, 1.0)];
                sample(&p, (p[0] > p[1]) as u8 as f64)
            })
            .collect();
        let swapped: Vec<LabeledSample> = train.iter().map(|s| sample(&s.point, 1.0 - s.label)).collect();
        let m = fit(&train, &k, 1e-8).unwrap();
        let ms = fit(&swapped, &k, 1e-8).unwrap();
        for gamma in [0.3, 0.5, 0.7] {
            for s in &train {
                assert_ne!(m.mean(&s.point) >= gamma, ms.mean(&s.point) >= 1.0 - gamma);
            }
        }
    }

    #[test]
    fn grid_points_are_cell_centres() {
        let region = IntervalBox::new(vec![0.0, 0.0], vec![2.0, 4.0]).unwrap();
        let pts = grid_points(&region, 2);
        assert_eq!(
            pts,
            vec![vec![0.5, 1.0], vec![0.5, 3.0], vec![1.5, 1.0], vec![1.5, 3.0]]
        );
    }
}
