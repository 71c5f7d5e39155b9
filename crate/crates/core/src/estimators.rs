//! Tail-index and dependence statistics computed from the `k` largest radii.
//!
//! All four statistics share the log-spacing `log(R_(i) / R_(k))` for
//! `i = 1..=k`. The `i = k` term is zero, which makes the cone statistic on
//! the full quadrant reduce exactly to the Hill estimator.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{d_star, AngularCone};
use crate::order::RadialOrder;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StatisticValue {
    pub value: f64,
    /// Number of upper order statistics used.
    pub k: usize,
    /// Sample size.
    pub n: usize,
}

/// Hill estimator of `1/alpha`: `(1/k) sum log(R_(i) / R_(k))`.
pub fn hill(ord: &RadialOrder, k: usize) -> Result<StatisticValue> {
    let rk = ord.threshold(k)?;
    let sum: f64 = ord.sorted_r()[..k].iter().map(|r| (r / rk).ln()).sum();
    Ok(StatisticValue { value: sum / k as f64, k, n: ord.len() })
}

/// Cone-penalized Hill statistic
/// `(1/k) sum (1 + d*(pair_i, cone) / R_(k)) log(R_(i) / R_(k))`.
///
/// Always at least the Hill estimate; equal to it when every contributing
/// pair lies inside the cone.
pub fn d_star_statistic(ord: &RadialOrder, k: usize, cone: &AngularCone) -> Result<StatisticValue> {
    let rk = ord.threshold(k)?;
    let sum: f64 = ord.sorted_r()[..k]
        .iter()
        .zip(&ord.concomitant_pairs()[..k])
        .map(|(r, p)| {
            let log_ratio = (r / rk).ln();
            if log_ratio == 0.0 {
                // the weight may be infinite for degenerate axis rays
                0.0
            } else {
                (1.0 + d_star(p, cone) / rk) * log_ratio
            }
        })
        .sum();
    Ok(StatisticValue { value: sum / k as f64, k, n: ord.len() })
}

/// Angle-weighted Hill statistic
/// `sum theta_i log(R_(i) / R_(k)) / sum theta_i`.
pub fn t_statistic(ord: &RadialOrder, k: usize) -> Result<StatisticValue> {
    let rk = ord.threshold(k)?;
    let (num, den) = weighted_log_sums(
        ord.sorted_r()[..k].iter().zip(&ord.concomitant_theta()[..k]).map(|(&r, &t)| (r, t)),
        rk,
    );
    if den == 0.0 {
        return Err(Error::ZeroAngleSum { k });
    }
    Ok(StatisticValue { value: num / den, k, n: ord.len() })
}

/// Angle-weighted statistic restricted to the cone.
///
/// Points whose angle falls outside `cone` get radius and angle zero, the
/// masked radii are re-ranked, and the top `k` enter
/// `sum theta_i log(max(R_(i) / R_(k), 1)) / sum theta_i` with `0/0 = 1`.
///
/// If fewer than `k` angles lie in the cone, but at least one does, the
/// masked threshold is zero and the result is `+inf`. With no angle in the
/// cone the result is `1`.
pub fn t_tilde_statistic(
    ord: &RadialOrder,
    k: usize,
    cone: &AngularCone,
) -> Result<StatisticValue> {
    ord.threshold(k)?;
    let n = ord.len();
    // Masked-out radii are zero and sort below every positive one; their
    // angle weight is zero too, so only the in-cone prefix matters.
    let mut kept = ord
        .sorted_r()
        .iter()
        .zip(ord.concomitant_theta())
        .filter(|(&r, &t)| r > 0.0 && cone.contains_angle(t))
        .map(|(&r, &t)| (r, t))
        .take(k)
        .peekable();
    if kept.peek().is_none() {
        return Ok(StatisticValue { value: 1.0, k, n });
    }
    let kept: Vec<(f64, f64)> = kept.collect();
    let rk = if kept.len() == k { kept[k - 1].0 } else { 0.0 };
    if rk == 0.0 {
        return Ok(StatisticValue { value: f64::INFINITY, k, n });
    }
    let (num, den) = weighted_log_sums(kept.into_iter(), rk);
    let value = if den == 0.0 { 1.0 } else { num / den };
    Ok(StatisticValue { value, k, n })
}

fn weighted_log_sums(terms: impl Iterator<Item = (f64, f64)>, rk: f64) -> (f64, f64) {
    terms.fold((0.0, 0.0), |(num, den), (r, theta)| {
        let log_ratio = (r / rk).max(1.0).ln();
        (num + theta * log_ratio, den + theta)
    })
}
