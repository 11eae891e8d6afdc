//! Concrete vector fields: the ACC braking model, linear benchmarks, and
//! parameter augmentation.

use super::DynamicalSystem;
use crate::{Error, Result};

/// Velocities at or below this are treated as stopped when deciding that a
/// braking simulation is over.
pub const STOPPED_VELOCITY: f64 = 1e-9;

/// Leader/follower braking model with state `(h, v_L, v_F)`: gap, leader
/// speed, follower speed. Both cars brake with constant deceleration `a`
/// plus quadratic drag `b·v²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AccSystem {
    pub a: f64,
    pub b: f64,
}

impl AccSystem {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a > 0.0 && a.is_finite()) {
            return Err(Error::invalid(
                "a",
                format!("braking deceleration must be positive, got {a}"),
            ));
        }
        if !(b > 0.0 && b.is_finite()) {
            return Err(Error::invalid(
                "b",
                format!("drag coefficient must be positive, got {b}"),
            ));
        }
        Ok(AccSystem { a, b })
    }

    /// Halt predicate: both vehicles have come to rest.
    pub fn both_stopped(_t: f64, x: &[f64]) -> bool {
        x[1] <= STOPPED_VELOCITY && x[2] <= STOPPED_VELOCITY
    }

    /// Simulates until both cars stop (or `t = 100`) and reports whether the
    /// gap stayed nonnegative throughout.
    pub fn simulate_safe(&self, h0: f64, v_leader: f64, v_follower: f64, step: f64) -> Result<bool> {
        let traj = super::integrate_until(self, &[h0, v_leader, v_follower], 0.0, 100.0, step, Self::both_stopped)?;
        Ok(traj.event_time.is_none() && traj.final_state()[0] >= 0.0)
    }
}

/// Right-hand side of the ACC model. A velocity component that has reached
/// zero stays there: its derivative is zero and it contributes nothing to ḣ.
pub fn acc_rhs(state: &[f64], params: &AccSystem) -> [f64; 3] {
    let (vl, vf) = (state[1], state[2]);
    let decel = |v: f64| if v <= 0.0 { 0.0 } else { -params.a - params.b * v * v };
    [vl.max(0.0) - vf.max(0.0), decel(vl), decel(vf)]
}

impl DynamicalSystem for AccSystem {
    fn dimension(&self) -> usize {
        3
    }

    fn rhs(&self, _t: f64, x: &[f64], dx: &mut [f64]) {
        dx.copy_from_slice(&acc_rhs(x, self));
    }

    /// Collision when the gap crosses zero.
    fn event(&self, _t: f64, x: &[f64]) -> Option<f64> {
        Some(x[0])
    }
}

/// Single braking vehicle `(x, v)` with ẋ = v, v̇ = −a − b·v², no stop clamp.
/// Valid up to the stopping time, where the closed-form solution applies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BrakingVehicle {
    pub a: f64,
    pub b: f64,
}

impl DynamicalSystem for BrakingVehicle {
    fn dimension(&self) -> usize {
        2
    }

    fn rhs(&self, _t: f64, x: &[f64], dx: &mut [f64]) {
        dx[0] = x[1];
        dx[1] = -self.a - self.b * x[1] * x[1];
    }
}

/// ẋ = A·x.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearSystem {
    matrix: Vec<Vec<f64>>,
}

impl LinearSystem {
    pub fn new(matrix: Vec<Vec<f64>>) -> Result<Self> {
        let n = matrix.len();
        if n == 0 {
            return Err(Error::invalid("matrix", "empty"));
        }
        if let Some(row) = matrix.iter().find(|r| r.len() != n) {
            return Err(Error::Dimension {
                expected: n,
                got: row.len(),
            });
        }
        if matrix.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::invalid("matrix", "non-finite entry"));
        }
        Ok(LinearSystem { matrix })
    }

    /// Counter-clockwise rotation at unit angular speed: ẋ₁ = −x₂, ẋ₂ = x₁.
    pub fn rotation() -> Self {
        LinearSystem {
            matrix: vec![vec![0.0, -1.0], vec![1.0, 0.0]],
        }
    }

    /// Lightly damped 2-D oscillator.
    pub fn damped_spiral() -> Self {
        LinearSystem {
            matrix: vec![vec![-0.2, 1.0], vec![-1.0, -0.2]],
        }
    }

    pub fn matrix(&self) -> &[Vec<f64>] {
        &self.matrix
    }
}

impl DynamicalSystem for LinearSystem {
    fn dimension(&self) -> usize {
        self.matrix.len()
    }

    fn rhs(&self, _t: f64, x: &[f64], dx: &mut [f64]) {
        for (d, row) in dx.iter_mut().zip(&self.matrix) {
            *d = row.iter().zip(x).map(|(a, b)| a * b).sum();
        }
    }
}

/// Closure-backed system, mostly for tests and one-off models.
pub struct FnSystem<F, E = fn(f64, &[f64]) -> f64> {
    dim: usize,
    f: F,
    event: Option<E>,
}

impl<F> FnSystem<F>
where
    F: Fn(f64, &[f64], &mut [f64]) + Sync,
{
    pub fn new(dim: usize, f: F) -> Self {
        FnSystem { dim, f, event: None }
    }

    pub fn with_event<E>(self, event: E) -> FnSystem<F, E>
    where
        E: Fn(f64, &[f64]) -> f64 + Sync,
    {
        FnSystem {
            dim: self.dim,
            f: self.f,
            event: Some(event),
        }
    }
}

impl<F, E> DynamicalSystem for FnSystem<F, E>
where
    F: Fn(f64, &[f64], &mut [f64]) + Sync,
    E: Fn(f64, &[f64]) -> f64 + Sync,
{
    fn dimension(&self) -> usize {
        self.dim
    }

    fn rhs(&self, t: f64, x: &[f64], dx: &mut [f64]) {
        (self.f)(t, x, dx)
    }

    fn event(&self, t: f64, x: &[f64]) -> Option<f64> {
        self.event.as_ref().map(|e| e(t, x))
    }
}

/// A vector field over `state_dimension` states that also reads
/// `parameter_count` fixed parameters.
pub trait ParametricSystem: Sync {
    fn state_dimension(&self) -> usize;
    fn parameter_count(&self) -> usize;
    fn rhs(&self, t: f64, x: &[f64], params: &[f64], dx: &mut [f64]);
}

/// A parametric system lifted to an ordinary one whose trailing coordinates
/// are the parameters, held constant (zero derivative). Uncertain parameters
/// then become part of the initial set.
#[derive(Debug, Clone)]
pub struct Augmented<P> {
    inner: P,
}

pub fn augment_parameters<P: ParametricSystem>(system: P) -> Augmented<P> {
    Augmented { inner: system }
}

impl<P> Augmented<P> {
    pub fn inner(&self) -> &P {
        &self.inner
    }
}

impl<P: ParametricSystem> DynamicalSystem for Augmented<P> {
    fn dimension(&self) -> usize {
        self.inner.state_dimension() + self.inner.parameter_count()
    }

    fn rhs(&self, t: f64, x: &[f64], dx: &mut [f64]) {
        let n = self.inner.state_dimension();
        let (state, params) = x.split_at(n);
        let (d_state, d_params) = dx.split_at_mut(n);
        self.inner.rhs(t, state, params, d_state);
        d_params.fill(0.0);
    }
}

/// Closure-backed parametric system.
pub struct FnParametric<F> {
    states: usize,
    params: usize,
    f: F,
}

impl<F> FnParametric<F>
where
    F: Fn(f64, &[f64], &[f64], &mut [f64]) + Sync,
{
    pub fn new(states: usize, params: usize, f: F) -> Self {
        FnParametric { states, params, f }
    }
}

impl<F> ParametricSystem for FnParametric<F>
where
    F: Fn(f64, &[f64], &[f64], &mut [f64]) + Sync,
{
    fn state_dimension(&self) -> usize {
        self.states
    }

    fn parameter_count(&self) -> usize {
        self.params
    }

    fn rhs(&self, t: f64, x: &[f64], params: &[f64], dx: &mut [f64]) {
        (self.f)(t, x, params, dx)
    }
}

/// Unit-frequency oscillator with uncertain damping `c`:
/// ẋ₁ = x₂, ẋ₂ = −x₁ − c·x₂.
#[derive(Debug, Clone, Copy, Default)]
pub struct DampedOscillator;

impl ParametricSystem for DampedOscillator {
    fn state_dimension(&self) -> usize {
        2
    }

    fn parameter_count(&self) -> usize {
        1
    }

    fn rhs(&self, _t: f64, x: &[f64], params: &[f64], dx: &mut [f64]) {
        dx[0] = x[1];
        dx[1] = -x[0] - params[0] * x[1];
    }
}
