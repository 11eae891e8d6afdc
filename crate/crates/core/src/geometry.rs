//! Points and axis-aligned boxes in ℝⁿ.

use std::ops::{Deref, Index};

use crate::{Error, Result};

/// A point in state space. All coordinates are finite.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector(Vec<f64>);

impl StateVector {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if let Some(bad) = coords.iter().find(|c| !c.is_finite()) {
            return Err(Error::invalid("coords", format!("non-finite coordinate {bad}")));
        }
        Ok(StateVector(coords))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    // Callers guarantee finiteness (e.g. values drawn inside a finite box).
    pub(crate) fn from_finite(coords: Vec<f64>) -> Self {
        debug_assert!(coords.iter().all(|c| c.is_finite()));
        StateVector(coords)
    }
}

impl Deref for StateVector {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl Index<usize> for StateVector {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl TryFrom<Vec<f64>> for StateVector {
    type Error = Error;

    fn try_from(coords: Vec<f64>) -> Result<Self> {
        StateVector::new(coords)
    }
}

/// Axis-aligned hyperrectangle `[lower, upper]`, closed on every face.
#[derive(Debug, Clone, PartialEq)]
pub struct IntervalBox {
    lower: StateVector,
    upper: StateVector,
}

impl IntervalBox {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(Error::Dimension {
                expected: lower.len(),
                got: upper.len(),
            });
        }
        let lower = StateVector::new(lower)?;
        let upper = StateVector::new(upper)?;
        if let Some(i) = (0..lower.dim()).find(|&i| lower[i] > upper[i]) {
            return Err(Error::invalid(
                "box",
                format!("lower[{i}] = {} exceeds upper[{i}] = {}", lower[i], upper[i]),
            ));
        }
        Ok(IntervalBox { lower, upper })
    }

    /// The box `[lo, hi]` in every coordinate.
    pub fn cube(dim: usize, lo: f64, hi: f64) -> Result<Self> {
        IntervalBox::new(vec![lo; dim], vec![hi; dim])
    }

    /// Degenerate box at a single point.
    pub fn point(p: &StateVector) -> Self {
        IntervalBox {
            lower: p.clone(),
            upper: p.clone(),
        }
    }

    pub fn dim(&self) -> usize {
        self.lower.dim()
    }

    pub fn lower(&self) -> &StateVector {
        &self.lower
    }

    pub fn upper(&self) -> &StateVector {
        &self.upper
    }

    pub fn width(&self, axis: usize) -> f64 {
        self.upper[axis] - self.lower[axis]
    }

    pub fn widths(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.width(i)).collect()
    }

    pub fn volume(&self) -> f64 {
        (0..self.dim()).map(|i| self.width(i)).product()
    }

    /// Inclusive containment test. Points of the wrong dimension are outside.
    pub fn contains(&self, p: &[f64]) -> bool {
        p.len() == self.dim()
            && p.iter()
                .enumerate()
                .all(|(i, &x)| self.lower[i] <= x && x <= self.upper[i])
    }

    /// Componentwise `other ⊆ self`.
    pub fn contains_box(&self, other: &IntervalBox) -> bool {
        self.contains(other.lower()) && self.contains(other.upper())
    }
}

/// Smallest closed box containing every point. Errors on an empty input.
pub fn interval_hull<P: AsRef<[f64]>>(points: &[P]) -> Result<IntervalBox> {
    let first = points.first().ok_or(Error::EmptyHull)?.as_ref();
    let mut lower = first.to_vec();
    let mut upper = first.to_vec();
    for p in &points[1..] {
        let p = p.as_ref();
        if p.len() != lower.len() {
            return Err(Error::Dimension {
                expected: lower.len(),
                got: p.len(),
            });
        }
        for (i, &x) in p.iter().enumerate() {
            lower[i] = lower[i].min(x);
            upper[i] = upper[i].max(x);
        }
    }
    IntervalBox::new(lower, upper)
}

impl AsRef<[f64]> for StateVector {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}
