use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("interval hull of an empty point set is undefined")]
    EmptyHull,

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("integration produced a non-finite state at t = {time}")]
    Integration { time: f64 },

    #[error("trajectory from initial point {point:?} blew up at t = {time}")]
    Trajectory { point: Vec<f64>, time: f64 },

    #[error("time {t} is past the stopping time {t_stop}; the closed form no longer describes the motion")]
    OutOfRegime { t: f64, t_stop: f64 },

    #[error("Gram matrix plus regularization {regularization:e} is not numerically positive definite; try a larger regularization")]
    Factorization { regularization: f64 },

    #[error("label function returned {0}, expected exactly 0 or 1")]
    NonBinaryLabel(f64),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    /// True for failures caused by the numerics rather than by the caller's input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Integration { .. } | Error::Trajectory { .. } | Error::Factorization { .. }
        )
    }
}
