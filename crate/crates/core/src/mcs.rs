//! Monte Carlo interval overapproximation of ε-accurate forward reachable
//! sets.
//!
//! Draw `m` initial states, push each through the flow to the end of the
//! horizon, and take the interval hull of the successors. With
//! `m ≥ (2n/ε)·ln(2n/δ)` the hull contains an ε-accurate reachable set
//! (a set of successor probability at least 1 − ε) with probability at
//! least 1 − δ.

use crate::dynamics::{propagate, DynamicalSystem};
use crate::sampling::uniform_sample;
use crate::{interval_hull, Error, IntervalBox, Result, SeededRng, StateVector};

/// Accuracy/confidence targets plus the initial set and time horizon.
#[derive(Debug, Clone, PartialEq)]
pub struct ReachSpec {
    pub epsilon: f64,
    pub delta: f64,
    pub t0: f64,
    pub t1: f64,
    /// Initial states are drawn uniformly from this box.
    pub initial_box: IntervalBox,
}

fn check_unit_open(name: &'static str, v: f64) -> Result<()> {
    if v > 0.0 && v < 1.0 {
        Ok(())
    } else {
        Err(Error::invalid(name, format!("must lie in (0, 1), got {v}")))
    }
}

impl ReachSpec {
    pub fn new(epsilon: f64, delta: f64, t0: f64, t1: f64, initial_box: IntervalBox) -> Result<Self> {
        check_unit_open("epsilon", epsilon)?;
        check_unit_open("delta", delta)?;
        if !(t0.is_finite() && t1.is_finite()) || t1 < t0 {
            return Err(Error::invalid(
                "horizon",
                format!("need finite t0 <= t1, got [{t0}, {t1}]"),
            ));
        }
        Ok(ReachSpec {
            epsilon,
            delta,
            t0,
            t1,
            initial_box,
        })
    }

    pub fn dimension(&self) -> usize {
        self.initial_box.dim()
    }

    pub fn sample_bound(&self) -> usize {
        sample_bound(self.dimension(), self.epsilon, self.delta).expect("validated at construction")
    }
}

/// Smallest integer `m ≥ (2n/ε)·ln(2n/δ)`, at least 1.
pub fn sample_bound(n: usize, epsilon: f64, delta: f64) -> Result<usize> {
    if n == 0 {
        return Err(Error::invalid("n", "dimension must be positive"));
    }
    check_unit_open("epsilon", epsilon)?;
    check_unit_open("delta", delta)?;
    let two_n = 2.0 * n as f64;
    let m = (two_n / epsilon * (two_n / delta).ln()).ceil();
    Ok((m as usize).max(1))
}

/// Output of one Monte Carlo hull computation.
#[derive(Debug, Clone, PartialEq)]
pub struct McsResult {
    pub hull: IntervalBox,
    pub sample_count: usize,
    pub rng: SeededRng,
    pub spec: ReachSpec,
    /// True when `sample_count` meets the sample bound for `spec`.
    pub certified: bool,
    pub initial_states: Vec<StateVector>,
    pub final_states: Vec<StateVector>,
}

/// Propagates every initial state to `t1`. Order of the output matches the input.
fn successors<S: DynamicalSystem + ?Sized>(
    system: &S,
    spec: &ReachSpec,
    initial: &[StateVector],
    step: f64,
) -> Result<Vec<StateVector>> {
    let push = |x0: &StateVector| {
        propagate(system, x0, spec.t0, spec.t1, step)
            .and_then(StateVector::new)
            .map_err(|e| match e {
                Error::Integration { time } => Error::Trajectory {
                    point: x0.to_vec(),
                    time,
                },
                other => other,
            })
    };
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        initial.par_iter().map(push).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        initial.iter().map(push).collect()
    }
}

fn check_dimension<S: DynamicalSystem + ?Sized>(system: &S, spec: &ReachSpec) -> Result<()> {
    if system.dimension() != spec.dimension() {
        return Err(Error::Dimension {
            expected: system.dimension(),
            got: spec.dimension(),
        });
    }
    Ok(())
}

/// Certified hull: uses exactly `sample_bound(spec)` samples.
pub fn mcs_reach<S: DynamicalSystem + ?Sized>(
    system: &S,
    spec: &ReachSpec,
    rng: &SeededRng,
    step: f64,
) -> Result<McsResult> {
    mcs_reach_with_count(system, spec, spec.sample_bound(), rng, step)
}

/// Hull from an explicit sample count; certified only if the count meets
/// the bound. Counts drawn from the same stream are nested prefixes.
pub fn mcs_reach_with_count<S: DynamicalSystem + ?Sized>(
    system: &S,
    spec: &ReachSpec,
    count: usize,
    rng: &SeededRng,
    step: f64,
) -> Result<McsResult> {
    check_dimension(system, spec)?;
    if count == 0 {
        return Err(Error::invalid("count", "at least one sample is required"));
    }
    let initial_states = uniform_sample(&spec.initial_box, count, rng);
    let final_states = successors(system, spec, &initial_states, step)?;
    Ok(McsResult {
        hull: interval_hull(&final_states)?,
        sample_count: count,
        rng: *rng,
        spec: spec.clone(),
        certified: count >= spec.sample_bound(),
        initial_states,
        final_states,
    })
}

/// Fraction of `validation_count` fresh successor samples inside `hull`.
/// `rng` must be a different stream from the one that built the hull.
pub fn validate_coverage<S: DynamicalSystem + ?Sized>(
    hull: &IntervalBox,
    system: &S,
    spec: &ReachSpec,
    validation_count: usize,
    rng: &SeededRng,
    step: f64,
) -> Result<f64> {
    check_dimension(system, spec)?;
    if validation_count == 0 {
        return Err(Error::invalid("validation_count", "must be positive"));
    }
    let initial = uniform_sample(&spec.initial_box, validation_count, rng);
    let finals = successors(system, spec, &initial, step)?;
    let inside = finals.iter().filter(|x| hull.contains(x)).count();
    Ok(inside as f64 / validation_count as f64)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialOutcome {
    pub trial: usize,
    /// Stream that built the hull; validation used a sibling stream.
    pub stream: SeededRng,
    pub sample_count: usize,
    pub coverage: f64,
    pub success: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialSuite {
    pub success_fraction: f64,
    pub trials: Vec<TrialOutcome>,
}

/// Repeats certified hull construction plus validation on independent
/// streams. A trial succeeds when its coverage is at least `1 − ε`.
pub fn coverage_trial_suite<S: DynamicalSystem + ?Sized>(
    system: &S,
    spec: &ReachSpec,
    trials: usize,
    validation_count: usize,
    rng: &SeededRng,
    step: f64,
) -> Result<TrialSuite> {
    if trials == 0 {
        return Err(Error::invalid("trials", "must be positive"));
    }
    let run = |trial: usize| -> Result<TrialOutcome> {
        let build = rng.fork(2 * trial as u64);
        let check = rng.fork(2 * trial as u64 + 1);
        let result = mcs_reach(system, spec, &build, step)?;
        let coverage = validate_coverage(&result.hull, system, spec, validation_count, &check, step)?;
        Ok(TrialOutcome {
            trial,
            stream: build,
            sample_count: result.sample_count,
            coverage,
            success: coverage >= 1.0 - spec.epsilon,
        })
    };
    #[cfg(feature = "parallel")]
    let outcomes: Vec<TrialOutcome> = {
        use rayon::prelude::*;
        (0..trials).into_par_iter().map(run).collect::<Result<_>>()?
    };
    #[cfg(not(feature = "parallel"))]
    let outcomes: Vec<TrialOutcome> = (0..trials).map(run).collect::<Result<_>>()?;
    let successes = outcomes.iter().filter(|t| t.success).count();
    Ok(TrialSuite {
        success_fraction: successes as f64 / trials as f64,
        trials: outcomes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{augment_parameters, DampedOscillator, FnSystem, LinearSystem};
    use proptest::prelude::*;

    #[test]
    fn bound_reproduces_published_value() {
        assert_eq!(sample_bound(18, 0.05, 0.001).unwrap(), 7554);
    }

    #[test]
    fn bound_small_cases() {
        // 4·ln 4 = 5.545…, 40·ln 80 = 175.28…
        assert_eq!(sample_bound(1, 0.5, 0.5).unwrap(), 6);
        assert_eq!(sample_bound(2, 0.1, 0.05).unwrap(), 176);
    }

    #[test]
    fn bound_rejects_out_of_range() {
        assert!(sample_bound(2, 1.5, 0.1).is_err());
        assert!(sample_bound(2, 0.1, 0.0).is_err());
        assert!(sample_bound(0, 0.1, 0.1).is_err());
        assert!(sample_bound(2, f64::NAN, 0.1).is_err());
    }

    proptest! {
        #[test]
        fn bound_monotone(n in 1usize..30, e in 0.01..0.9f64, d in 0.001..0.9f64, scale in 1.01..1.1f64) {
            let m = sample_bound(n, e, d).unwrap();
            prop_assert!(sample_bound(n + 1, e, d).unwrap() >= m);
            prop_assert!(sample_bound(n, (e * scale).min(0.99), d).unwrap() <= m);
            prop_assert!(sample_bound(n, e, (d * scale).min(0.99)).unwrap() <= m);
        }
    }

    fn spec(eps: f64, delta: f64, t1: f64, lo: Vec<f64>, hi: Vec<f64>) -> ReachSpec {
        ReachSpec::new(eps, delta, 0.0, t1, IntervalBox::new(lo, hi).unwrap()).unwrap()
    }

    #[test]
    fn zero_dynamics_hull_is_sample_hull() {
        let zero = LinearSystem::new(vec![vec![0.0, 0.0], vec![0.0, 0.0]]).unwrap();
        let s = spec(0.1, 0.05, 1.0, vec![0.0, 0.0], vec![1.0, 2.0]);
        let r = mcs_reach(&zero, &s, &SeededRng::new(3), 1e-2).unwrap();
        assert!(r.certified);
        assert_eq!(r.sample_count, 176);
        assert_eq!(r.hull, interval_hull(&r.initial_states).unwrap());
        assert!(s.initial_box.contains_box(&r.hull));
    }

    #[test]
    fn decay_hull_matches_pushforward() {
        let decay = LinearSystem::new(vec![vec![-1.0]]).unwrap();
        let s = spec(0.05, 0.01, 1.0, vec![1.0], vec![2.0]);
        let r = mcs_reach(&decay, &s, &SeededRng::new(8), 1e-3).unwrap();
        assert!(r.sample_count >= 100);
        let e = (-1.0f64).exp();
        let exact = IntervalBox::new(vec![e], vec![2.0 * e]).unwrap();
        // RK4 error ~1e-13; allow it at the faces.
        let slack = IntervalBox::new(vec![e - 1e-9], vec![2.0 * e + 1e-9]).unwrap();
        assert!(slack.contains_box(&r.hull));
        assert!((r.hull.width(0) - exact.width(0)).abs() < 0.05 * exact.width(0));
    }

    #[test]
    fn rotation_quarter_turn_hull() {
        let s = spec(0.1, 0.05, std::f64::consts::FRAC_PI_2, vec![1.0, 1.0], vec![1.1, 1.1]);
        let r = mcs_reach(&LinearSystem::rotation(), &s, &SeededRng::new(4), 1e-3).unwrap();
        let exact = IntervalBox::new(vec![-1.1 - 1e-9, 1.0 - 1e-9], vec![-1.0 + 1e-9, 1.1 + 1e-9]).unwrap();
        assert!(exact.contains_box(&r.hull));
        assert!(r.hull.width(0) > 0.09 && r.hull.width(1) > 0.09);
    }

    #[test]
    fn hull_faces_touch_final_states() {
        let sys = augment_parameters(DampedOscillator);
        let s = spec(0.2, 0.1, 2.0, vec![0.9, -0.1, 0.2], vec![1.1, 0.1, 0.6]);
        let r = mcs_reach(&sys, &s, &SeededRng::new(10), 1e-2).unwrap();
        for x in &r.final_states {
            assert!(r.hull.contains(x));
        }
        for axis in 0..3 {
            assert!(r.final_states.iter().any(|x| x[axis] == r.hull.lower()[axis]));
            assert!(r.final_states.iter().any(|x| x[axis] == r.hull.upper()[axis]));
        }
        // Parameters are carried through untouched.
        for (a, b) in r.initial_states.iter().zip(&r.final_states) {
            assert_eq!(a[2], b[2]);
        }
    }

    #[test]
    fn nested_prefixes_give_nested_hulls() {
        let s = spec(0.1, 0.1, 1.0, vec![-1.0, -1.0], vec![1.0, 1.0]);
        let sys = LinearSystem::damped_spiral();
        let rng = SeededRng::new(77);
        let mut prev: Option<IntervalBox> = None;
        for m in [5, 20, 80, 320] {
            let r = mcs_reach_with_count(&sys, &s, m, &rng, 1e-2).unwrap();
            assert_eq!(r.certified, m >= s.sample_bound());
            if let Some(p) = prev {
                assert!(r.hull.contains_box(&p));
            }
            prev = Some(r.hull);
        }
    }

    #[test]
    fn coverage_extremes() {
        let s = spec(0.1, 0.1, 1.0, vec![0.0, 0.0], vec![1.0, 1.0]);
        let sys = LinearSystem::rotation();
        let everything = IntervalBox::cube(2, -1e6, 1e6).unwrap();
        assert_eq!(
            validate_coverage(&everything, &sys, &s, 500, &SeededRng::new(1), 1e-2).unwrap(),
            1.0
        );
        let dot = IntervalBox::point(&StateVector::new(vec![0.3, 0.3]).unwrap());
        assert_eq!(
            validate_coverage(&dot, &sys, &s, 500, &SeededRng::new(1), 1e-2).unwrap(),
            0.0
        );
    }

    #[test]
    fn certified_decay_hull_covers() {
        let decay = LinearSystem::new(vec![vec![-1.0]]).unwrap();
        let s = spec(0.05, 0.01, 1.0, vec![1.0], vec![2.0]);
        let mut good = 0;
        for seed in 0..10 {
            let rng = SeededRng::new(seed);
            let r = mcs_reach(&decay, &s, &rng.fork(0), 1e-2).unwrap();
            let c = validate_coverage(&r.hull, &decay, &s, 100_000, &rng.fork(1), 1e-2).unwrap();
            good += (c >= 0.95) as usize;
        }
        assert!(good >= 9, "{good}/10");
    }

    #[test]
    fn near_vacuous_accuracy_always_succeeds() {
        let s = spec(0.99, 0.5, 1.0, vec![0.0, 0.0], vec![1.0, 1.0]);
        let suite =
            coverage_trial_suite(&LinearSystem::damped_spiral(), &s, 20, 1000, &SeededRng::new(2), 1e-2).unwrap();
        assert_eq!(suite.success_fraction, 1.0);
    }

    #[test]
    fn trial_suite_is_reproducible() {
        let s = spec(0.2, 0.2, 1.0, vec![0.0, 0.0], vec![1.0, 1.0]);
        let a = coverage_trial_suite(&LinearSystem::rotation(), &s, 1, 2000, &SeededRng::new(6), 1e-2).unwrap();
        let b = coverage_trial_suite(&LinearSystem::rotation(), &s, 1, 2000, &SeededRng::new(6), 1e-2).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn blow_up_names_the_initial_point() {
        let sys = FnSystem::new(1, |_, x, dx| dx[0] = x[0] * x[0]);
        let s = spec(0.5, 0.5, 3.0, vec![1.0], vec![2.0]);
        match mcs_reach(&sys, &s, &SeededRng::new(0), 1e-2) {
            Err(Error::Trajectory { point, .. }) => assert!((1.0..=2.0).contains(&point[0])),
            other => panic!("expected trajectory error, got {other:?}"),
        }
    }

    #[test]
    fn spec_validation() {
        let b = IntervalBox::cube(1, 0.0, 1.0).unwrap();
        assert!(ReachSpec::new(0.0, 0.1, 0.0, 1.0, b.clone()).is_err());
        assert!(ReachSpec::new(0.1, 1.0, 0.0, 1.0, b.clone()).is_err());
        assert!(ReachSpec::new(0.1, 0.1, 1.0, 0.0, b.clone()).is_err());
        let s = ReachSpec::new(0.1, 0.1, 0.0, 1.0, b).unwrap();
        assert!(mcs_reach(&LinearSystem::rotation(), &s, &SeededRng::new(0), 1e-2).is_err());
    }
}
