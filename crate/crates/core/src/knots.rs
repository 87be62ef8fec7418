//! Knot vectors and knot-span lookup.

use crate::{Error, Result};

/// Non-decreasing sequence of knots `u_0 ..= u_m` spanning one parametric
/// direction.
///
/// Knot equality is exact floating-point equality everywhere in the crate.
#[derive(Debug, Clone, PartialEq)]
pub struct KnotVector {
    knots: Vec<f64>,
}

impl KnotVector {
    pub fn new(knots: Vec<f64>) -> Result<Self> {
        if knots.len() < 2 {
            return Err(Error::InvalidKnotVector(format!(
                "need at least 2 knots, got {}",
                knots.len()
            )));
        }
        if let Some(bad) = knots.iter().find(|k| !k.is_finite()) {
            return Err(Error::InvalidKnotVector(format!("non-finite knot {bad}")));
        }
        if let Some(i) = knots.windows(2).position(|w| w[0] > w[1]) {
            return Err(Error::InvalidKnotVector(format!(
                "knots decrease at index {}: {} > {}",
                i,
                knots[i],
                knots[i + 1]
            )));
        }
        Ok(Self { knots })
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.knots
    }

    pub fn len(&self) -> usize {
        self.knots.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Index of the last knot (`m`).
    pub fn last_index(&self) -> usize {
        self.knots.len() - 1
    }

    pub fn first(&self) -> f64 {
        self.knots[0]
    }

    pub fn last(&self) -> f64 {
        self.knots[self.knots.len() - 1]
    }

    pub fn contains(&self, u: f64) -> bool {
        u >= self.first() && u <= self.last()
    }

    /// Number of knots exactly equal to `u`.
    pub fn multiplicity(&self, u: f64) -> usize {
        let lo = self.knots.partition_point(|&k| k < u);
        let hi = self.knots.partition_point(|&k| k <= u);
        hi - lo
    }

    /// First and last knot both repeated exactly `degree + 1` times.
    pub fn is_clamped(&self, degree: usize) -> bool {
        self.knots.len() >= 2 * (degree + 1)
            && self.first() < self.last()
            && self.multiplicity(self.first()) == degree + 1
            && self.multiplicity(self.last()) == degree + 1
    }

    /// Index `i` of the knot span `[u_i, u_{i+1})` containing `u`.
    ///
    /// Repeated knots resolve to their last occurrence. The last knot itself
    /// belongs to the last non-zero span, which is closed on the right.
    pub fn find_span(&self, u: f64) -> Result<usize> {
        if !u.is_finite() || !self.contains(u) {
            return Err(Error::OutOfRange {
                value: u,
                lo: self.first(),
                hi: self.last(),
            });
        }
        let last = self.last();
        if u == last {
            let below = self.knots.partition_point(|&k| k < last);
            return Ok(below.saturating_sub(1).min(self.last_index() - 1));
        }
        Ok(self.knots.partition_point(|&k| k <= u) - 1)
    }

    /// Distinct knot values in increasing order.
    pub fn unique(&self) -> Vec<f64> {
        let mut out: Vec<f64> = Vec::new();
        for &k in &self.knots {
            if out.last() != Some(&k) {
                out.push(k);
            }
        }
        out
    }

    /// Indices `i` of the non-zero spans, `u_i < u_{i+1}`.
    pub fn nonzero_spans(&self) -> Vec<usize> {
        (0..self.last_index())
            .filter(|&i| self.knots[i] < self.knots[i + 1])
            .collect()
    }

    pub(crate) fn from_unchecked(knots: Vec<f64>) -> Self {
        debug_assert!(knots.windows(2).all(|w| w[0] <= w[1]));
        Self { knots }
    }
}

impl std::ops::Index<usize> for KnotVector {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.knots[i]
    }
}
