//! Data-driven reachable set estimation with probabilistic accuracy semantics.
//!
//! Two estimators live here:
//!
//! * [`gpc`]: a least-squares Gaussian-process classifier whose training
//!   points are chosen adaptively by maximizing the probability of
//!   misclassification over a Latin-hypercube candidate pool.
//! * [`mcs`]: a Monte Carlo interval hull over sampled successor states,
//!   sized by a sample-complexity bound so the hull covers an ε-accurate
//!   reachable set with confidence 1 − δ.
//!
//! [`acc_oracle`] provides the closed-form ground truth for the adaptive
//! cruise control braking benchmark that both estimators are scored against.

pub mod acc_oracle;
pub mod dynamics;
mod error;
pub mod geometry;
pub mod gpc;
pub mod mcs;
pub mod rng;
pub mod sampling;
pub mod scenario;

pub use error::{Error, Result};
pub use geometry::{interval_hull, IntervalBox, StateVector};
pub use rng::SeededRng;
