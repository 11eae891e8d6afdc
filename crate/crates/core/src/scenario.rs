//! The ACC safe-set estimation benchmark: label initial gaps and leader
//! speeds by simulation, score against the closed-form safe set.

use crate::acc_oracle::{boundary_gap, is_safe};
use crate::dynamics::{AccSystem, DEFAULT_STEP};
use crate::gpc::{grid_accuracy, run_adaptive_gpc, run_static_gpc, GpcConfig, GpcReachEstimate, SamplingStrategy};
use crate::{IntervalBox, Result, SeededRng, StateVector};

/// Safe-set estimation over `(h(0), v_L(0))` with the follower's initial
/// speed held fixed.
#[derive(Debug, Clone, PartialEq)]
pub struct AccScenario {
    pub system: AccSystem,
    pub v_follower: f64,
    /// Region over `(h, v_L)`.
    pub region: IntervalBox,
    pub step: f64,
}

impl Default for AccScenario {
    fn default() -> Self {
        AccScenario {
            system: AccSystem { a: 4.9, b: 1.0 },
            v_follower: 5.0,
            region: IntervalBox::new(vec![0.0, 0.0], vec![2.0, 5.0]).expect("static region"),
            step: DEFAULT_STEP,
        }
    }
}

impl AccScenario {
    /// 1 if simulating from `(h, v_L, v_F)` never closes the gap, else 0.
    pub fn simulate_label(&self, x: &StateVector) -> Result<f64> {
        let safe = self.system.simulate_safe(x[0], x[1], self.v_follower, self.step)?;
        Ok(if safe { 1.0 } else { 0.0 })
    }

    pub fn truth(&self, x: &[f64]) -> bool {
        is_safe(x[0], x[1], self.v_follower, self.system.a, self.system.b)
    }

    /// Analytic boundary gap h*(v_L).
    pub fn boundary(&self, v_leader: f64) -> f64 {
        boundary_gap(v_leader, self.v_follower, self.system.a, self.system.b)
    }

    pub fn estimate(
        &self,
        strategy: SamplingStrategy,
        budget: usize,
        pool_size: usize,
        cfg: &GpcConfig,
        rng: &SeededRng,
    ) -> Result<GpcReachEstimate> {
        let label = |x: &StateVector| self.simulate_label(x);
        match strategy {
            SamplingStrategy::Adaptive => run_adaptive_gpc(label, &self.region, budget, pool_size, cfg, rng),
            _ => run_static_gpc(label, &self.region, budget, strategy, cfg, rng),
        }
    }

    /// Agreement with the analytic safe set on a `resolution²` grid.
    pub fn accuracy(&self, estimate: &GpcReachEstimate, resolution: usize) -> f64 {
        grid_accuracy(estimate, &self.region, resolution, |p| self.truth(p))
    }
}
