//! Closed-form ground truth for the ACC braking model.
//!
//! Under ẋ = v, v̇ = −a − b·v², a car starting at speed v₀ travels
//! `ln(1 + (b/a)·v₀²) / (2b)` before stopping. The gap between leader and
//! follower is monotone in time, so the initial state is safe exactly when
//! the leader's stopping distance plus the initial gap covers the
//! follower's stopping distance.

use crate::{Error, Result};

/// Shorthands of the analytic solution for one car: `alpha = atan(√(b/a)·v₀)`
/// and `beta = √(ab)`. The car stops at `t = alpha / beta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AccAnalyticState {
    pub alpha: f64,
    pub beta: f64,
}

impl AccAnalyticState {
    pub fn new(v0: f64, a: f64, b: f64) -> Self {
        AccAnalyticState {
            alpha: ((b / a).sqrt() * v0).atan(),
            beta: (a * b).sqrt(),
        }
    }

    pub fn stopping_time(&self) -> f64 {
        self.alpha / self.beta
    }

    fn check_time(&self, t: f64) -> Result<()> {
        let t_stop = self.stopping_time();
        // A few ulps of slack so t = alpha/beta computed elsewhere is accepted.
        if t < 0.0 || t > t_stop * (1.0 + 4.0 * f64::EPSILON) {
            return Err(Error::OutOfRegime { t, t_stop });
        }
        Ok(())
    }
}

/// Distance travelled from speed `v0` to rest.
pub fn stopping_distance(v0: f64, a: f64, b: f64) -> f64 {
    (b / a * v0 * v0).ln_1p() / (2.0 * b)
}

pub fn stopping_time(v0: f64, a: f64, b: f64) -> f64 {
    AccAnalyticState::new(v0, a, b).stopping_time()
}

/// Speed at time `t ∈ [0, t_stop]`.
pub fn analytic_velocity(v0: f64, a: f64, b: f64, t: f64) -> Result<f64> {
    let s = AccAnalyticState::new(v0, a, b);
    s.check_time(t)?;
    if t == 0.0 {
        return Ok(v0);
    }
    Ok((a / b).sqrt() * (s.alpha - s.beta * t).tan().max(0.0))
}

/// Displacement at time `t ∈ [0, t_stop]`.
pub fn analytic_position(v0: f64, a: f64, b: f64, t: f64) -> Result<f64> {
    let s = AccAnalyticState::new(v0, a, b);
    s.check_time(t)?;
    let arg = (s.alpha - s.beta * t).max(0.0);
    Ok(((arg).cos() / s.alpha.cos()).ln() / b)
}

/// Signed safety margin: initial gap plus leader stopping distance minus
/// follower stopping distance. Zero on the safe-set boundary.
pub fn safety_margin(h0: f64, v_leader: f64, v_follower: f64, a: f64, b: f64) -> f64 {
    h0 + stopping_distance(v_leader, a, b) - stopping_distance(v_follower, a, b)
}

/// True iff no collision occurs. Grazing contact (margin exactly zero) is safe.
pub fn is_safe(h0: f64, v_leader: f64, v_follower: f64, a: f64, b: f64) -> bool {
    safety_margin(h0, v_leader, v_follower, a, b) >= 0.0
}

/// Smallest safe initial gap for the given speeds.
pub fn boundary_gap(v_leader: f64, v_follower: f64, a: f64, b: f64) -> f64 {
    stopping_distance(v_follower, a, b) - stopping_distance(v_leader, a, b)
}
