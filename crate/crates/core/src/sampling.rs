//! Uniform and Latin-hypercube sampling over boxes.

use crate::{IntervalBox, SeededRng, StateVector};

/// `count` independent uniform draws from `region`.
pub fn uniform_sample(region: &IntervalBox, count: usize, rng: &SeededRng) -> Vec<StateVector> {
    let mut g = rng.generator();
    let lo = region.lower();
    let hi = region.upper();
    (0..count)
        .map(|_| StateVector::from_finite((0..region.dim()).map(|i| g.uniform(lo[i], hi[i])).collect()))
        .collect()
}

/// Latin hypercube design: along every axis, each of the `count` equal-width
/// strata holds exactly one point. Placement inside a stratum is uniform and
/// strata are matched across axes by an independent random permutation.
pub fn lhs_sample(region: &IntervalBox, count: usize, rng: &SeededRng) -> Vec<StateVector> {
    let mut g = rng.generator();
    let n = region.dim();
    let mut coords = vec![vec![0.0; n]; count];
    let mut strata: Vec<usize> = (0..count).collect();
    for axis in 0..n {
        g.shuffle(&mut strata);
        let lo = region.lower()[axis];
        let width = region.width(axis);
        for (point, &s) in coords.iter_mut().zip(&strata) {
            let u = (s as f64 + g.unit()) / count as f64;
            let x = lo + width * u;
            // Rounding must not push a point into the neighbouring stratum.
            let s_lo = lo + width * s as f64 / count as f64;
            let mut s_hi = lo + width * (s + 1) as f64 / count as f64;
            if s + 1 < count {
                s_hi = s_hi.next_down().max(s_lo);
            }
            point[axis] = x.clamp(s_lo, s_hi);
        }
    }
    coords.into_iter().map(StateVector::from_finite).collect()
}
