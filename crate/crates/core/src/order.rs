//! Descending radial order statistics with their concomitants.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{BivariatePoint, BivariateSample};

/// Radii sorted in nonincreasing order, each carrying the pair (and angle)
/// it came from. Equal radii keep their original sample order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RadialOrder {
    sorted_r: Vec<f64>,
    concomitant_theta: Vec<f64>,
    concomitant_pairs: Vec<BivariatePoint>,
    source_index: Vec<usize>,
}

impl RadialOrder {
    /// Sort the sample by radius. Fails when every radius is zero.
    pub fn new(sample: &BivariateSample) -> Result<Self> {
        Self::from_points(sample.points())
    }

    pub fn from_points(points: &[BivariatePoint]) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptySample);
        }
        let mut idx: Vec<usize> = (0..points.len()).collect();
        // (radius desc, index asc) is a total order, so the unstable sort is deterministic
        idx.sort_unstable_by(|&i, &j| {
            points[j]
                .radius()
                .total_cmp(&points[i].radius())
                .then(i.cmp(&j))
        });
        if points[idx[0]].radius() == 0.0 {
            return Err(Error::AllZero);
        }
        let n = idx.len();
        let mut sorted_r = Vec::with_capacity(n);
        let mut concomitant_theta = Vec::with_capacity(n);
        let mut concomitant_pairs = Vec::with_capacity(n);
        for &i in &idx {
            let p = points[i];
            let r = p.radius();
            sorted_r.push(r);
            // origin points never reach the statistics; park their angle at 0
            concomitant_theta.push(if r > 0.0 { p.x() / r } else { 0.0 });
            concomitant_pairs.push(p);
        }
        Ok(Self {
            sorted_r,
            concomitant_theta,
            concomitant_pairs,
            source_index: idx,
        })
    }

    pub fn len(&self) -> usize {
        self.sorted_r.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted_r.is_empty()
    }

    pub fn sorted_r(&self) -> &[f64] {
        &self.sorted_r
    }

    pub fn concomitant_theta(&self) -> &[f64] {
        &self.concomitant_theta
    }

    pub fn concomitant_pairs(&self) -> &[BivariatePoint] {
        &self.concomitant_pairs
    }

    /// Position in the source sample of the `i`-th largest radius.
    pub fn source_index(&self) -> &[usize] {
        &self.source_index
    }

    /// Check `1 <= k < n` and `R_(k) > 0`; returns `R_(k)`.
    pub(crate) fn threshold(&self, k: usize) -> Result<f64> {
        let n = self.len();
        if k == 0 || k >= n {
            return Err(Error::KOutOfRange { k, n });
        }
        let rk = self.sorted_r[k - 1];
        if rk <= 0.0 {
            return Err(Error::ZeroThreshold);
        }
        Ok(rk)
    }
}

/// Sort a sample by descending radius.
pub fn radial_order(sample: &BivariateSample) -> Result<RadialOrder> {
    RadialOrder::new(sample)
}
