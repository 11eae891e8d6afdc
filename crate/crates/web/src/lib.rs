//! WebAssembly bindings for the static demo page in `www/`.
//!
//! The exported functions are thin wrappers over plain Rust functions
//! (`*_impl`) so the logic is testable natively.

use probreach::dynamics::{augment_parameters, DampedOscillator, DynamicalSystem, LinearSystem, DEFAULT_STEP};
use probreach::gpc::{GpcConfig, SamplingStrategy};
use probreach::mcs::{mcs_reach, ReachSpec};
use probreach::scenario::AccScenario;
use probreach::{IntervalBox, SeededRng};
use wasm_bindgen::prelude::*;

/// Classifier output on a `grid × grid` raster over h ∈ [0,2], vL ∈ [0,5].
/// Rasters are row-major with vL varying fastest.
#[wasm_bindgen]
pub struct SafeSet {
    grid: usize,
    accuracy: f64,
    predicted: Vec<u8>,
    truth: Vec<u8>,
    samples: Vec<f64>,
    boundary: Vec<f64>,
}

#[wasm_bindgen]
impl SafeSet {
    #[wasm_bindgen(getter)]
    pub fn grid(&self) -> usize {
        self.grid
    }

    #[wasm_bindgen(getter)]
    pub fn accuracy(&self) -> f64 {
        self.accuracy
    }

    /// 1 where the classifier predicts safe.
    pub fn predicted(&self) -> Vec<u8> {
        self.predicted.clone()
    }

    /// 1 where the closed form says safe.
    pub fn truth(&self) -> Vec<u8> {
        self.truth.clone()
    }

    /// Labeled samples as flat `(h, vL, label)` triples.
    pub fn samples(&self) -> Vec<f64> {
        self.samples.clone()
    }

    /// Analytic boundary as flat `(h, vL)` pairs.
    pub fn boundary(&self) -> Vec<f64> {
        self.boundary.clone()
    }
}

pub fn gpc_safe_set_impl(
    strategy: &str,
    m: usize,
    pool: usize,
    vf: f64,
    seed: u64,
    grid: usize,
) -> Result<SafeSet, String> {
    let strategy = match strategy {
        "adaptive" => SamplingStrategy::Adaptive,
        "uniform" => SamplingStrategy::Uniform,
        "lhs" => SamplingStrategy::LatinHypercube,
        other => return Err(format!("unknown strategy {other:?}")),
    };
    if grid == 0 || !(vf >= 0.0 && vf.is_finite()) {
        return Err("grid must be positive and vF nonnegative".into());
    }
    let scenario = AccScenario {
        v_follower: vf,
        ..AccScenario::default()
    };
    let est = scenario
        .estimate(strategy, m, pool, &GpcConfig::default(), &SeededRng::new(seed))
        .map_err(|e| e.to_string())?;
    let r = &scenario.region;
    let centre = |axis: usize, k: usize| r.lower()[axis] + r.width(axis) * (k as f64 + 0.5) / grid as f64;
    let mut predicted = Vec::with_capacity(grid * grid);
    let mut truth = Vec::with_capacity(grid * grid);
    for i in 0..grid {
        for j in 0..grid {
            let p = [centre(0, i), centre(1, j)];
            predicted.push(est.classify(&p) as u8);
            truth.push(scenario.truth(&p) as u8);
        }
    }
    let agree = predicted.iter().zip(&truth).filter(|(a, b)| a == b).count();
    let samples = est
        .samples()
        .iter()
        .flat_map(|s| [s.point[0], s.point[1], s.label])
        .collect();
    let boundary = (0..=100)
        .map(|k| r.lower()[1] + r.width(1) * k as f64 / 100.0)
        .flat_map(|v| [scenario.boundary(v), v])
        .collect();
    Ok(SafeSet {
        grid,
        accuracy: agree as f64 / (grid * grid) as f64,
        predicted,
        truth,
        samples,
        boundary,
    })
}

/// Estimates the ACC safe set with the given sampling strategy
/// (`"adaptive"`, `"uniform"` or `"lhs"`).
#[wasm_bindgen]
pub fn gpc_safe_set(
    strategy: &str,
    m: usize,
    pool: usize,
    vf: f64,
    seed: u64,
    grid: usize,
) -> Result<SafeSet, JsError> {
    gpc_safe_set_impl(strategy, m, pool, vf, seed, grid).map_err(|e| JsError::new(&e))
}

/// Monte Carlo hull of a 2-D demo system; `finals` holds the successor
/// samples as flat `(x1, x2)` pairs.
#[wasm_bindgen]
pub struct Hull {
    lower: Vec<f64>,
    upper: Vec<f64>,
    finals: Vec<f64>,
    initial_lower: Vec<f64>,
    initial_upper: Vec<f64>,
}

#[wasm_bindgen]
impl Hull {
    pub fn lower(&self) -> Vec<f64> {
        self.lower.clone()
    }

    pub fn upper(&self) -> Vec<f64> {
        self.upper.clone()
    }

    pub fn finals(&self) -> Vec<f64> {
        self.finals.clone()
    }

    pub fn initial_lower(&self) -> Vec<f64> {
        self.initial_lower.clone()
    }

    pub fn initial_upper(&self) -> Vec<f64> {
        self.initial_upper.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn sample_count(&self) -> usize {
        self.finals.len() / 2
    }
}

fn demo_system(name: &str) -> Result<(Box<dyn DynamicalSystem>, IntervalBox, f64), String> {
    let b = |lo: Vec<f64>, hi: Vec<f64>| IntervalBox::new(lo, hi).map_err(|e| e.to_string());
    Ok(match name {
        "rotation" => (
            Box::new(LinearSystem::rotation()),
            b(vec![1.0, 1.0], vec![1.1, 1.1])?,
            std::f64::consts::FRAC_PI_2,
        ),
        "spiral" => (
            Box::new(LinearSystem::damped_spiral()),
            b(vec![0.9, -0.1], vec![1.1, 0.1])?,
            3.0,
        ),
        "oscillator" => (
            Box::new(augment_parameters(DampedOscillator)),
            b(vec![0.9, -0.1, 0.2], vec![1.1, 0.1, 0.6])?,
            3.0,
        ),
        other => return Err(format!("unknown system {other:?}")),
    })
}

pub fn mcs_hull_impl(system: &str, epsilon: f64, delta: f64, seed: u64) -> Result<Hull, String> {
    let (sys, initial, t1) = demo_system(system)?;
    let spec = ReachSpec::new(epsilon, delta, 0.0, t1, initial.clone()).map_err(|e| e.to_string())?;
    let r = mcs_reach(sys.as_ref(), &spec, &SeededRng::new(seed), DEFAULT_STEP).map_err(|e| e.to_string())?;
    Ok(Hull {
        lower: r.hull.lower().as_slice()[..2].to_vec(),
        upper: r.hull.upper().as_slice()[..2].to_vec(),
        finals: r.final_states.iter().flat_map(|x| [x[0], x[1]]).collect(),
        initial_lower: initial.lower().as_slice()[..2].to_vec(),
        initial_upper: initial.upper().as_slice()[..2].to_vec(),
    })
}

/// Certified interval hull for `"rotation"`, `"spiral"` or `"oscillator"`
/// (projected onto the first two coordinates).
#[wasm_bindgen]
pub fn mcs_hull(system: &str, epsilon: f64, delta: f64, seed: u64) -> Result<Hull, JsError> {
    mcs_hull_impl(system, epsilon, delta, seed).map_err(|e| JsError::new(&e))
}

/// Samples needed for an ε-accurate hull with confidence 1 − δ.
#[wasm_bindgen]
pub fn sample_bound(n: usize, epsilon: f64, delta: f64) -> Result<usize, JsError> {
    probreach::mcs::sample_bound(n, epsilon, delta).map_err(|e| JsError::new(&e.to_string()))
}
