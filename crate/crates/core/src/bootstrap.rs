//! Bootstrap tests for the three dependence hypotheses.
//!
//! * `H1` (strong dependence): the angular measure lives on a given cone.
//! * `H2` (full dependence): the angular measure is a single point.
//! * `H3` (strong vs weak): the support is the cone rather than `[0, 1]`.
//!
//! Each test draws `B` resamples of size `m_n` with replacement and evaluates
//! a statistic on the `k_mn` largest radii of each. Resample `t` of a batch
//! reads its indices from substream `(domain, attempt << 32 | t)` of the
//! configured seed, where `attempt` counts redraws after a degenerate
//! resample. Results are therefore identical for any thread count.

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicUsize, Ordering};

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimators::{d_star_statistic, hill, t_statistic, t_tilde_statistic};
use crate::geometry::{AngularCone, BivariatePoint, BivariateSample};
use crate::order::RadialOrder;
use crate::rng::{domain_tag, DomainStreams, Streams};
use crate::statdist::{chisq_quantile, f_quantile, normal_quantile};

const D_STRONG: u64 = domain_tag("boot.H1");
const D_FULL: u64 = domain_tag("boot.H2");
const D_WEAK_T: u64 = domain_tag("boot.H3.T");
const D_WEAK_TILDE: u64 = domain_tag("boot.H3.Ttilde");

/// Maximum total draws per batch, as a multiple of `B`.
const REDRAW_FACTOR: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestConfig {
    /// Upper order statistics of the full sample.
    pub k_n: usize,
    /// Resample size.
    pub m_n: usize,
    /// Upper order statistics per resample.
    pub k_mn: usize,
    /// Number of resamples.
    #[serde(rename = "B")]
    pub b: usize,
    pub lambda: f64,
    pub alpha_sig: f64,
    pub seed: u64,
}

impl TestConfig {
    /// Defaults for a sample of size `n`: `m_n = round(n / k_n)`,
    /// `k_mn = max(5, round(0.05 m_n))`, `B = 2000`.
    pub fn with_defaults(n: usize, k_n: usize, seed: u64) -> Self {
        let m_n = ((n as f64 / k_n.max(1) as f64).round() as usize).max(2);
        let k_mn = default_k_mn(m_n);
        Self { k_n, m_n, k_mn, b: 2000, lambda: 1.0, alpha_sig: 0.05, seed }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if self.k_n == 0 || self.k_n >= n {
            return Err(Error::KOutOfRange { k: self.k_n, n });
        }
        if self.k_mn == 0 || self.k_mn >= self.m_n {
            return Err(Error::InvalidParameter(format!(
                "need 1 <= k_mn < m_n, got k_mn = {}, m_n = {}",
                self.k_mn, self.m_n
            )));
        }
        if self.b < 2 {
            return Err(Error::InvalidParameter(format!("B = {} must be at least 2", self.b)));
        }
        if !(self.alpha_sig > 0.0 && self.alpha_sig < 1.0) {
            return Err(Error::InvalidProbability(self.alpha_sig));
        }
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return Err(Error::InvalidParameter(format!("lambda {} must be positive", self.lambda)));
        }
        Ok(())
    }
}

/// `max(5, round(0.05 m))`, capped below `m`.
pub fn default_k_mn(m_n: usize) -> usize {
    ((0.05 * m_n as f64).round() as usize).max(5).min(m_n.saturating_sub(1)).max(1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TestId {
    H1,
    H2,
    H3,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Reject,
    FailToReject,
}

impl Verdict {
    fn reject_if(cond: bool) -> Self {
        if cond {
            Verdict::Reject
        } else {
            Verdict::FailToReject
        }
    }
}

/// Upper critical value or acceptance interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Threshold {
    Upper(f64),
    Interval([f64; 2]),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestReport {
    pub test_id: TestId,
    pub verdict: Verdict,
    pub statistic: f64,
    pub threshold: Threshold,
    pub cone: Option<AngularCone>,
    /// One statistic per resample, in resample order.
    pub per_resample: Vec<f64>,
    /// Second batch (the cone-restricted statistic of `H3`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub per_resample_secondary: Option<Vec<f64>>,
    pub auxiliary: BTreeMap<String, f64>,
}

/// Draw `m` points with replacement, indices uniform on the sample.
pub fn resample<R: Rng + ?Sized>(
    sample: &BivariateSample,
    m: usize,
    rng: &mut R,
) -> Result<BivariateSample> {
    BivariateSample::new(resample_points(sample.points(), m, rng))
}

fn resample_points<R: Rng + ?Sized>(
    points: &[BivariatePoint],
    m: usize,
    rng: &mut R,
) -> Vec<BivariatePoint> {
    let n = points.len();
    (0..m).map(|_| points[rng.random_range(0..n)]).collect()
}

struct Batch {
    values: Vec<f64>,
    draws: usize,
}

/// Evaluate `stat` on `B` resamples, redrawing degenerate ones.
fn run_batch<F>(sample: &BivariateSample, cfg: &TestConfig, domain: u64, stat: F) -> Result<Batch>
where
    F: Fn(&RadialOrder) -> Result<f64> + Sync,
{
    let streams: DomainStreams = Streams::new(cfg.seed).domain(domain);
    let cap = REDRAW_FACTOR * cfg.b;
    let draws = AtomicUsize::new(0);
    let points = sample.points();
    let values = (0..cfg.b as u64)
        .into_par_iter()
        .map(|t| {
            let mut attempt: u64 = 0;
            loop {
                if draws.fetch_add(1, Ordering::Relaxed) >= cap {
                    return Err(Error::DegenerateResamples { draws: cap, b: cfg.b });
                }
                let mut rng = streams.at(attempt << 32 | t);
                let res = resample_points(points, cfg.m_n, &mut rng);
                let value = RadialOrder::from_points(&res).and_then(|ord| stat(&ord));
                match value {
                    Ok(v) if v.is_finite() => return Ok(v),
                    _ => attempt += 1,
                }
            }
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(Batch { values, draws: draws.into_inner() })
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// Unbiased sample variance (`B - 1` denominator), summed in index order.
fn sample_variance(v: &[f64]) -> f64 {
    let m = mean(v);
    v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (v.len() - 1) as f64
}

fn full_sample_hill(sample: &BivariateSample, cfg: &TestConfig) -> Result<(RadialOrder, f64)> {
    cfg.validate(sample.len())?;
    let ord = RadialOrder::new(sample)?;
    let h = hill(&ord, cfg.k_n)?.value;
    if h.is_nan() || h <= 0.0 {
        return Err(Error::InvalidParameter(
            "Hill estimate of the full sample is zero; the top radii are all equal".to_string(),
        ));
    }
    Ok((ord, h))
}

/// Test `H1`: the angular measure is supported on `cone`.
///
/// A resample is flagged when `|D*_m - H| > z H / sqrt(k_mn)` with
/// `z = Phi^-1(1 - alpha_sig / 2)` and `H` the Hill estimate of the full
/// sample. The hypothesis is rejected when more than `alpha_sig` of the
/// resamples are flagged.
pub fn test_strong(
    sample: &BivariateSample,
    cone: &AngularCone,
    cfg: &TestConfig,
) -> Result<TestReport> {
    let (_, h) = full_sample_hill(sample, cfg)?;
    let z = normal_quantile(1.0 - cfg.alpha_sig / 2.0)?;
    let band = z * h / (cfg.k_mn as f64).sqrt();
    let batch = run_batch(sample, cfg, D_STRONG, |ord| {
        Ok(d_star_statistic(ord, cfg.k_mn, cone)?.value)
    })?;
    let flagged = batch.values.iter().filter(|d| (*d - h).abs() > band).count();
    let rate = flagged as f64 / cfg.b as f64;

    let mut aux = BTreeMap::new();
    aux.insert("hill".to_string(), h);
    aux.insert("z".to_string(), z);
    aux.insert("band".to_string(), band);
    aux.insert("rejection_rate".to_string(), rate);
    aux.insert("mean_statistic".to_string(), mean(&batch.values));
    aux.insert("redraws".to_string(), (batch.draws - cfg.b) as f64);
    Ok(TestReport {
        test_id: TestId::H1,
        verdict: Verdict::reject_if(rate > cfg.alpha_sig),
        statistic: rate,
        threshold: Threshold::Upper(cfg.alpha_sig),
        cone: Some(*cone),
        per_resample: batch.values,
        per_resample_secondary: None,
        auxiliary: aux,
    })
}

/// Test `H2`: full dependence (a single angle).
///
/// The statistic `k_mn SE^2 / H^2`, with `SE` the bootstrap standard
/// deviation of the angle-weighted statistic, is compared with
/// `chi2_{1 - alpha_sig, B - 1} / (B - 1)`. The proportion of resamples with
/// `|T_m - H| > z H / sqrt(k_mn)` is reported alongside as
/// `proportion_rate`; `proportion_reject` is 1 when it exceeds `alpha_sig`.
pub fn test_full(sample: &BivariateSample, cfg: &TestConfig) -> Result<TestReport> {
    let (ord, h) = full_sample_hill(sample, cfg)?;
    let z = normal_quantile(1.0 - cfg.alpha_sig / 2.0)?;
    let band = z * h / (cfg.k_mn as f64).sqrt();
    let batch = run_batch(sample, cfg, D_FULL, |ord| Ok(t_statistic(ord, cfg.k_mn)?.value))?;

    let var = sample_variance(&batch.values);
    let statistic = cfg.k_mn as f64 * var / (h * h);
    let dof = (cfg.b - 1) as f64;
    let threshold = chisq_quantile(1.0 - cfg.alpha_sig, dof)? / dof;
    let outside = batch.values.iter().filter(|t| (*t - h).abs() > band).count();
    let proportion = outside as f64 / cfg.b as f64;
    let theta0 = mean(&ord.concomitant_theta()[..cfg.k_n]);

    let mut aux = BTreeMap::new();
    aux.insert("hill".to_string(), h);
    aux.insert("z".to_string(), z);
    aux.insert("band".to_string(), band);
    aux.insert("se_boot".to_string(), var.sqrt());
    aux.insert("mean_statistic".to_string(), mean(&batch.values));
    aux.insert("proportion_rate".to_string(), proportion);
    aux.insert(
        "proportion_reject".to_string(),
        if proportion > cfg.alpha_sig { 1.0 } else { 0.0 },
    );
    aux.insert("theta0_hat".to_string(), theta0);
    aux.insert("redraws".to_string(), (batch.draws - cfg.b) as f64);
    Ok(TestReport {
        test_id: TestId::H2,
        verdict: Verdict::reject_if(statistic > threshold),
        statistic,
        threshold: Threshold::Upper(threshold),
        cone: None,
        per_resample: batch.values,
        per_resample_secondary: None,
        auxiliary: aux,
    })
}

/// Test `H3`: support equals `cone` rather than all of `[0, 1]`.
///
/// Two independent batches give the angle-weighted statistic and its
/// cone-restricted version; their variance ratio is compared with the
/// central `1 - alpha_sig` interval of `F(B - 1, B - 1)`.
pub fn test_weak(
    sample: &BivariateSample,
    cone: &AngularCone,
    cfg: &TestConfig,
) -> Result<TestReport> {
    if cone.is_full() {
        return Err(Error::InvalidParameter(
            "strong-vs-weak test needs a cone other than [0, 1]".to_string(),
        ));
    }
    let (_, h) = full_sample_hill(sample, cfg)?;
    let plain = run_batch(sample, cfg, D_WEAK_T, |ord| Ok(t_statistic(ord, cfg.k_mn)?.value))?;
    let tilde = run_batch(sample, cfg, D_WEAK_TILDE, |ord| {
        Ok(t_tilde_statistic(ord, cfg.k_mn, cone)?.value)
    })?;
    let var_t = sample_variance(&plain.values);
    let var_tilde = sample_variance(&tilde.values);
    let ratio = var_t / var_tilde;
    let dof = (cfg.b - 1) as f64;
    let lo = f_quantile(cfg.alpha_sig / 2.0, dof, dof)?;
    let hi = f_quantile(1.0 - cfg.alpha_sig / 2.0, dof, dof)?;

    let mut aux = BTreeMap::new();
    aux.insert("hill".to_string(), h);
    aux.insert("var_t".to_string(), var_t);
    aux.insert("var_t_tilde".to_string(), var_tilde);
    aux.insert("mean_statistic".to_string(), mean(&plain.values));
    aux.insert("mean_statistic_tilde".to_string(), mean(&tilde.values));
    aux.insert(
        "redraws".to_string(),
        (plain.draws + tilde.draws - 2 * cfg.b) as f64,
    );
    Ok(TestReport {
        test_id: TestId::H3,
        // NaN ratio (both variances zero) counts as no evidence
        verdict: Verdict::reject_if(ratio < lo || ratio > hi),
        statistic: ratio,
        threshold: Threshold::Interval([lo, hi]),
        cone: Some(*cone),
        per_resample: plain.values,
        per_resample_secondary: Some(tilde.values),
        auxiliary: aux,
    })
}
