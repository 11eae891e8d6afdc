//! State transition by fixed-step RK4 with zero-crossing event detection.
//!
//! The integrator evaluates Φ(t; t₀, x₀) numerically. Events are zero
//! crossings of the system's scalar event function; a crossing is bracketed
//! on one RK4 step and then bisected in time by re-integrating the partial
//! step from the start of that step.

mod systems;

pub use systems::{
    acc_rhs, augment_parameters, AccSystem, Augmented, BrakingVehicle, DampedOscillator, FnParametric, FnSystem,
    LinearSystem, ParametricSystem,
};

use crate::{Error, Result, StateVector};

/// Default integration step, in the system's time units.
pub const DEFAULT_STEP: f64 = 1e-3;

/// Events are localized to this width in time.
pub const EVENT_TIME_TOLERANCE: f64 = 1e-10;

/// An autonomous or time-varying vector field ẋ = f(x, t), with an optional
/// event function whose zero crossings terminate integration.
pub trait DynamicalSystem: Sync {
    fn dimension(&self) -> usize;

    /// Writes f(x, t) into `dx`. Both slices have length `dimension()`.
    fn rhs(&self, t: f64, x: &[f64], dx: &mut [f64]);

    /// Event function value, or `None` if the system has no event.
    fn event(&self, _t: f64, _x: &[f64]) -> Option<f64> {
        None
    }
}

impl<S: DynamicalSystem + ?Sized> DynamicalSystem for &S {
    fn dimension(&self) -> usize {
        (**self).dimension()
    }

    fn rhs(&self, t: f64, x: &[f64], dx: &mut [f64]) {
        (**self).rhs(t, x, dx)
    }

    fn event(&self, t: f64, x: &[f64]) -> Option<f64> {
        (**self).event(t, x)
    }
}

/// A discretized trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<StateVector>,
    pub event_time: Option<f64>,
    pub event_state: Option<StateVector>,
}

impl Trajectory {
    pub fn final_state(&self) -> &StateVector {
        self.states.last().expect("trajectory holds at least the initial state")
    }

    pub fn final_time(&self) -> f64 {
        *self.times.last().expect("trajectory holds at least the initial time")
    }
}

struct Rk4 {
    k1: Vec<f64>,
    k2: Vec<f64>,
    k3: Vec<f64>,
    k4: Vec<f64>,
    tmp: Vec<f64>,
}

impl Rk4 {
    fn new(n: usize) -> Self {
        Rk4 {
            k1: vec![0.0; n],
            k2: vec![0.0; n],
            k3: vec![0.0; n],
            k4: vec![0.0; n],
            tmp: vec![0.0; n],
        }
    }

    /// One classical RK4 step of size `h` from `(t, x)` into `out`.
    fn step<S: DynamicalSystem + ?Sized>(&mut self, sys: &S, t: f64, x: &[f64], h: f64, out: &mut [f64]) {
        sys.rhs(t, x, &mut self.k1);
        offset(&mut self.tmp, x, 0.5 * h, &self.k1);
        sys.rhs(t + 0.5 * h, &self.tmp, &mut self.k2);
        offset(&mut self.tmp, x, 0.5 * h, &self.k2);
        sys.rhs(t + 0.5 * h, &self.tmp, &mut self.k3);
        offset(&mut self.tmp, x, h, &self.k3);
        sys.rhs(t + h, &self.tmp, &mut self.k4);
        for (i, o) in out.iter_mut().enumerate() {
            *o = x[i] + h / 6.0 * (self.k1[i] + 2.0 * (self.k2[i] + self.k3[i]) + self.k4[i]);
        }
    }
}

fn check_inputs<S: DynamicalSystem + ?Sized>(sys: &S, x0: &[f64], t0: f64, t1: f64, step: f64) -> Result<()> {
    if x0.len() != sys.dimension() {
        return Err(Error::Dimension {
            expected: sys.dimension(),
            got: x0.len(),
        });
    }
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::invalid(
            "step",
            format!("must be positive and finite, got {step}"),
        ));
    }
    if !(t0.is_finite() && t1.is_finite()) || t1 < t0 {
        return Err(Error::invalid(
            "horizon",
            format!("need finite t0 <= t1, got [{t0}, {t1}]"),
        ));
    }
    if x0.iter().any(|c| !c.is_finite()) {
        return Err(Error::invalid("x0", "non-finite initial state"));
    }
    Ok(())
}

/// Step grid: `t0 + k·step`, with the last step shortened to land on `t1`.
fn step_count(t0: f64, t1: f64, step: f64) -> usize {
    let span = (t1 - t0) / step;
    // Absorb rounding so [0, 1] with step 1e-3 is 1000 steps, not 1001.
    (span - 1e-9).ceil().max(0.0) as usize
}

fn time_at(k: usize, steps: usize, t0: f64, t1: f64, step: f64) -> f64 {
    if k >= steps {
        t1
    } else {
        t0 + k as f64 * step
    }
}

fn crossed(before: f64, after: f64) -> bool {
    (before < 0.0) != (after < 0.0)
}

/// `dst = x + h·k`.
fn offset(dst: &mut [f64], x: &[f64], h: f64, k: &[f64]) {
    for ((d, xi), ki) in dst.iter_mut().zip(x).zip(k) {
        *d = xi + h * ki;
    }
}

/// Integrates from `t0` to `t1`, stopping early at the first event.
pub fn integrate<S: DynamicalSystem + ?Sized>(sys: &S, x0: &[f64], t0: f64, t1: f64, step: f64) -> Result<Trajectory> {
    integrate_until(sys, x0, t0, t1, step, |_, _| false)
}

/// As [`integrate`], additionally stopping after the first step whose end
/// state satisfies `halt`.
pub fn integrate_until<S, H>(sys: &S, x0: &[f64], t0: f64, t1: f64, step: f64, halt: H) -> Result<Trajectory>
where
    S: DynamicalSystem + ?Sized,
    H: Fn(f64, &[f64]) -> bool,
{
    check_inputs(sys, x0, t0, t1, step)?;
    let n = x0.len();
    let steps = step_count(t0, t1, step);
    let mut rk = Rk4::new(n);
    let mut x = x0.to_vec();
    let mut next = vec![0.0; n];
    let mut traj = Trajectory {
        times: vec![t0],
        states: vec![StateVector::from_finite(x.clone())],
        event_time: None,
        event_state: None,
    };
    let mut g_prev = sys.event(t0, &x);

    for k in 0..steps {
        let t = time_at(k, steps, t0, t1, step);
        let t_next = time_at(k + 1, steps, t0, t1, step);
        let h = t_next - t;
        rk.step(sys, t, &x, h, &mut next);
        if next.iter().any(|c| !c.is_finite()) {
            return Err(Error::Integration { time: t_next });
        }

        if let Some(before) = g_prev {
            let after = sys.event(t_next, &next).unwrap_or(before);
            if crossed(before, after) {
                let (te, xe) = locate_event(sys, &mut rk, t, &x, h, before);
                traj.times.push(te);
                traj.states.push(StateVector::from_finite(xe.clone()));
                traj.event_time = Some(te);
                traj.event_state = Some(StateVector::from_finite(xe));
                return Ok(traj);
            }
            g_prev = Some(after);
        }

        std::mem::swap(&mut x, &mut next);
        traj.times.push(t_next);
        traj.states.push(StateVector::from_finite(x.clone()));
        if halt(t_next, &x) {
            break;
        }
    }
    Ok(traj)
}

/// Bisects the crossing inside the step `[t, t + h]` by re-integrating the
/// partial step. Returns the first bracket end past the crossing.
fn locate_event<S: DynamicalSystem + ?Sized>(
    sys: &S,
    rk: &mut Rk4,
    t: f64,
    x: &[f64],
    h: f64,
    g_start: f64,
) -> (f64, Vec<f64>) {
    let mut lo = 0.0;
    let mut hi = h;
    let mut state_hi = vec![0.0; x.len()];
    rk.step(sys, t, x, hi, &mut state_hi);
    let mut probe = vec![0.0; x.len()];
    while hi - lo > EVENT_TIME_TOLERANCE {
        let mid = 0.5 * (lo + hi);
        rk.step(sys, t, x, mid, &mut probe);
        let g = sys.event(t + mid, &probe).expect("event function present");
        if crossed(g_start, g) {
            hi = mid;
            state_hi.copy_from_slice(&probe);
        } else {
            lo = mid;
        }
    }
    (t + hi, state_hi)
}

/// Final state at `t1`, ignoring events and without recording the path.
pub fn propagate<S: DynamicalSystem + ?Sized>(sys: &S, x0: &[f64], t0: f64, t1: f64, step: f64) -> Result<Vec<f64>> {
    check_inputs(sys, x0, t0, t1, step)?;
    let n = x0.len();
    let steps = step_count(t0, t1, step);
    let mut rk = Rk4::new(n);
    let mut x = x0.to_vec();
    let mut next = vec![0.0; n];
    for k in 0..steps {
        let t = time_at(k, steps, t0, t1, step);
        let t_next = time_at(k + 1, steps, t0, t1, step);
        rk.step(sys, t, &x, t_next - t, &mut next);
        if next.iter().any(|c| !c.is_finite()) {
            return Err(Error::Integration { time: t_next });
        }
        std::mem::swap(&mut x, &mut next);
    }
    Ok(x)
}
