use std::f64::consts::FRAC_PI_2;

use clap::ValueEnum;
use probreach::dynamics::{augment_parameters, AccSystem, DampedOscillator, DynamicalSystem, LinearSystem};

/// Benchmark systems available to `mcs` and `trials`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DemoSystem {
    /// ACC braking model, state (h, vL, vF).
    Acc,
    /// Damped 2-D spiral ẋ = A·x.
    LinearDemo,
    /// Unit-speed rotation; a quarter turn maps boxes to boxes.
    RotationDemo,
    /// Oscillator with uncertain damping, augmented to (x1, x2, c).
    ParamLinearDemo,
    /// ẋ = 0 in 2-D.
    ZeroDemo,
}

impl DemoSystem {
    pub fn build(self) -> Box<dyn DynamicalSystem> {
        match self {
            DemoSystem::Acc => Box::new(AccSystem { a: 4.9, b: 1.0 }),
            DemoSystem::LinearDemo => Box::new(LinearSystem::damped_spiral()),
            DemoSystem::RotationDemo => Box::new(LinearSystem::rotation()),
            DemoSystem::ParamLinearDemo => Box::new(augment_parameters(DampedOscillator)),
            DemoSystem::ZeroDemo => Box::new(LinearSystem::new(vec![vec![0.0; 2]; 2]).expect("square")),
        }
    }

    pub fn state_names(self) -> &'static [&'static str] {
        match self {
            DemoSystem::Acc => &["h", "vL", "vF"],
            DemoSystem::ParamLinearDemo => &["x1", "x2", "c"],
            _ => &["x1", "x2"],
        }
    }

    /// Default initial box `(lower, upper)`.
    pub fn initial_box(self) -> (Vec<f64>, Vec<f64>) {
        match self {
            DemoSystem::Acc => (vec![5.0, 1.0, 1.0], vec![6.0, 2.0, 2.0]),
            DemoSystem::LinearDemo => (vec![0.9, -0.1], vec![1.1, 0.1]),
            DemoSystem::RotationDemo => (vec![1.0, 1.0], vec![1.1, 1.1]),
            DemoSystem::ParamLinearDemo => (vec![0.9, -0.1, 0.2], vec![1.1, 0.1, 0.6]),
            DemoSystem::ZeroDemo => (vec![0.0, 0.0], vec![1.0, 1.0]),
        }
    }

    /// Default horizon `(t0, t1)`.
    pub fn horizon(self) -> (f64, f64) {
        match self {
            DemoSystem::Acc => (0.0, 0.15),
            DemoSystem::RotationDemo => (0.0, FRAC_PI_2),
            DemoSystem::LinearDemo | DemoSystem::ParamLinearDemo => (0.0, 3.0),
            DemoSystem::ZeroDemo => (0.0, 1.0),
        }
    }
}
