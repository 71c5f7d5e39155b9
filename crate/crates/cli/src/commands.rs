//! Subcommand implementations.

use std::collections::BTreeMap;

use anyhow::{bail, Context, Result};
use serde::Serialize;
use taildep::bootstrap::{default_k_mn, test_full, test_strong, test_weak};
use taildep::datagen;
use taildep::series::{acf, log_returns};
use taildep::support::estimate_support;
use taildep::{
    AngularCone, BivariateSample, RadialOrder, SupportEstimate, SupportFitOptions, TestConfig,
    TestReport, Threshold,
};

use crate::data::{num, read_column, read_pairs, read_sample, Sink, Table};
use crate::{Common, Format, Which};

pub const SCHEMA_VERSION: u32 = 1;
const ACF_LAGS: usize = 20;

/// `k` from the flag, else the `min(ceil(n / 10), 100)` heuristic.
fn choose_k(c: &Common, n: usize) -> (usize, &'static str) {
    match c.k {
        Some(k) => (k, "given"),
        None => (n.div_ceil(10).min(100), "heuristic"),
    }
}

#[derive(Serialize)]
struct SimulateJson<'a> {
    schema_version: u32,
    command: &'static str,
    example: u8,
    n: usize,
    seed: u64,
    points: &'a BivariateSample,
}

pub fn simulate(c: &Common, example: u8, n: usize) -> Result<()> {
    let seed = c.seed();
    let sample = match example {
        1 => datagen::example1(n, seed)?,
        _ => datagen::example2(n, seed)?,
    };
    let sink = Sink::new(c.output.as_deref());
    match c.format_or(Format::Csv) {
        Format::Csv => {
            let mut t = Table::new(&["x", "y"]);
            for p in sample.points() {
                t.push([num(p.x()), num(p.y())]);
            }
            sink.write_csv_tables(&[(None, t)])
        }
        Format::Json => sink.write_json(&SimulateJson {
            schema_version: SCHEMA_VERSION,
            command: "simulate",
            example,
            n,
            seed,
            points: &sample,
        }),
    }
}

#[derive(Serialize)]
struct PrepJson<'a> {
    schema_version: u32,
    command: &'static str,
    prices: usize,
    stride: usize,
    returns: &'a [f64],
    abs_returns: &'a [f64],
    acf_abs_returns: Option<&'a [f64]>,
    acf_returns: Option<&'a [f64]>,
    acf_errors: BTreeMap<&'static str, String>,
}

pub fn prep(c: &Common, price_col: Option<&str>, stride: usize) -> Result<()> {
    let input = c.input()?;
    let prices = read_column(input, price_col)?;
    let returns = log_returns(&prices, stride)
        .with_context(|| format!("computing log returns of {}", input.display()))?;
    let abs_returns: Vec<f64> = returns.iter().map(|r| r.abs()).collect();

    // An ACF failure (constant or short series) is reported, not fatal.
    let mut acf_errors = BTreeMap::new();
    let mut try_acf = |name: &'static str, s: &[f64]| match acf(s, ACF_LAGS) {
        Ok(v) => Some(v),
        Err(e) => {
            eprintln!("taildep: warning: {name}: {e}");
            acf_errors.insert(name, e.to_string());
            None
        }
    };
    let acf_abs = try_acf("acf_abs_returns", &abs_returns);
    let acf_ret = try_acf("acf_returns", &returns);

    let sink = Sink::new(c.output.as_deref());
    match c.format_or(Format::Csv) {
        Format::Csv => {
            let mut rt = Table::new(&["index", "return", "abs_return"]);
            for (i, (r, a)) in returns.iter().zip(&abs_returns).enumerate() {
                rt.push([i.to_string(), num(*r), num(*a)]);
            }
            let mut at = Table::new(&["lag", "acf_abs_returns", "acf_returns"]);
            let cell = |v: &Option<Vec<f64>>, h: usize| v.as_ref().map_or(String::new(), |v| num(v[h]));
            for h in 0..=ACF_LAGS {
                at.push([h.to_string(), cell(&acf_abs, h), cell(&acf_ret, h)]);
            }
            sink.write_csv_tables(&[(None, rt), (Some("acf"), at)])
        }
        Format::Json => sink.write_json(&PrepJson {
            schema_version: SCHEMA_VERSION,
            command: "prep",
            prices: prices.len(),
            stride,
            returns: &returns,
            abs_returns: &abs_returns,
            acf_abs_returns: acf_abs.as_deref(),
            acf_returns: acf_ret.as_deref(),
            acf_errors,
        }),
    }
}

#[derive(Serialize)]
struct SupportJson<'a> {
    schema_version: u32,
    command: &'static str,
    n: usize,
    k: usize,
    k_source: &'static str,
    lambda: f64,
    estimate: &'a SupportEstimate,
}

pub fn support(c: &Common) -> Result<()> {
    let sample = read_sample(c.input()?, c.cols.as_ref(), c.abs_or(true))?;
    let (k, k_source) = choose_k(c, sample.len());
    let ord = RadialOrder::new(&sample)?;
    let est = estimate_support(&ord, k, &SupportFitOptions::with_lambda(c.lambda))?;
    let sink = Sink::new(c.output.as_deref());
    match c.format_or(Format::Json) {
        Format::Csv => {
            let mut t = Table::new(&["a_hat", "b_hat", "objective_value", "k", "lambda"]);
            t.push([num(est.a_hat), num(est.b_hat), num(est.objective_value), k.to_string(), num(c.lambda)]);
            sink.write_csv_tables(&[(None, t)])
        }
        Format::Json => sink.write_json(&SupportJson {
            schema_version: SCHEMA_VERSION,
            command: "support",
            n: sample.len(),
            k,
            k_source,
            lambda: c.lambda,
            estimate: &est,
        }),
    }
}

#[derive(Serialize)]
struct ConeJson {
    a: f64,
    b: f64,
    source: &'static str,
}

#[derive(Serialize)]
struct TestJson {
    schema_version: u32,
    command: &'static str,
    n: usize,
    k_source: &'static str,
    config: TestConfig,
    cone: Option<ConeJson>,
    support: Option<SupportEstimate>,
    reports: Vec<TestReport>,
    skipped: BTreeMap<&'static str, String>,
}

fn test_config(c: &Common, n: usize) -> Result<(TestConfig, &'static str)> {
    let (k, k_source) = choose_k(c, n);
    let mut cfg = TestConfig::with_defaults(n, k, c.seed());
    if let Some(m) = c.mn {
        cfg.m_n = m;
        cfg.k_mn = default_k_mn(m);
    }
    if let Some(km) = c.kmn {
        cfg.k_mn = km;
    }
    cfg.b = c.b;
    cfg.lambda = c.lambda;
    cfg.alpha_sig = c.alpha_sig;
    cfg.validate(n)?;
    Ok((cfg, k_source))
}

pub fn test(c: &Common, which: Which) -> Result<()> {
    let sample = read_sample(c.input()?, c.cols.as_ref(), c.abs_or(true))?;
    let n = sample.len();
    let (cfg, k_source) = test_config(c, n)?;

    let needs_cone = which != Which::Full;
    let mut support = None;
    let cone = match (c.cone, needs_cone) {
        (Some((a, b)), _) => Some((AngularCone::new(a, b)?, "given")),
        (None, true) => {
            let ord = RadialOrder::new(&sample)?;
            let est = estimate_support(&ord, cfg.k_n, &SupportFitOptions::with_lambda(cfg.lambda))?;
            let cone = est.cone();
            support = Some(est);
            Some((cone, "estimated"))
        }
        (None, false) => None,
    };

    let mut reports = Vec::new();
    let mut skipped = BTreeMap::new();
    if matches!(which, Which::Strong | Which::All) {
        let (cone, _) = cone.expect("cone resolved above");
        reports.push(test_strong(&sample, &cone, &cfg)?);
    }
    if matches!(which, Which::Full | Which::All) {
        reports.push(test_full(&sample, &cfg)?);
    }
    if matches!(which, Which::Weak | Which::All) {
        let (cone, _) = cone.expect("cone resolved above");
        if cone.is_full() && which == Which::All {
            skipped.insert("H3", "cone is [0, 1]; nothing to compare against".to_string());
        } else {
            reports.push(test_weak(&sample, &cone, &cfg)?);
        }
    }

    let sink = Sink::new(c.output.as_deref());
    match c.format_or(Format::Json) {
        Format::Csv => {
            let mut t = Table::new(&[
                "test_id",
                "verdict",
                "statistic",
                "threshold_low",
                "threshold_high",
                "cone_a",
                "cone_b",
            ]);
            for r in &reports {
                let (lo, hi) = match r.threshold {
                    Threshold::Upper(v) => (String::new(), num(v)),
                    Threshold::Interval([l, h]) => (num(l), num(h)),
                };
                let (ca, cb) = r.cone.map_or((String::new(), String::new()), |k| (num(k.a()), num(k.b())));
                let id = serde_json::to_value(r.test_id)?;
                let verdict = serde_json::to_value(r.verdict)?;
                t.push([
                    id.as_str().unwrap_or_default().to_string(),
                    verdict.as_str().unwrap_or_default().to_string(),
                    num(r.statistic),
                    lo,
                    hi,
                    ca,
                    cb,
                ]);
            }
            sink.write_csv_tables(&[(None, t)])
        }
        Format::Json => sink.write_json(&TestJson {
            schema_version: SCHEMA_VERSION,
            command: "test",
            n,
            k_source,
            config: cfg,
            cone: cone.map(|(k, source)| ConeJson { a: k.a(), b: k.b(), source }),
            support,
            reports,
            skipped,
        }),
    }
}

#[derive(Serialize)]
struct DiamondPoint {
    x: f64,
    y: f64,
    angle: f64,
}

#[derive(Serialize)]
struct Bin {
    lo: f64,
    hi: f64,
    count: usize,
    fraction: f64,
}

#[derive(Serialize)]
struct DiamondJson {
    schema_version: u32,
    command: &'static str,
    n: usize,
    k: usize,
    k_source: &'static str,
    points: Vec<DiamondPoint>,
    histogram: Vec<Bin>,
}

/// Map the `k` largest points by `|x| + |y|` onto the unit L1 diamond.
fn diamond_points(pairs: &[(f64, f64)], k: usize) -> Result<Vec<DiamondPoint>> {
    if k == 0 || k > pairs.len() {
        bail!("k = {k} must be between 1 and n = {}", pairs.len());
    }
    let radius = |p: &(f64, f64)| p.0.abs() + p.1.abs();
    let mut idx: Vec<usize> = (0..pairs.len()).collect();
    idx.sort_by(|&i, &j| radius(&pairs[j]).total_cmp(&radius(&pairs[i])).then(i.cmp(&j)));
    idx[..k]
        .iter()
        .map(|&i| {
            let (x, y) = pairs[i];
            let r = radius(&pairs[i]);
            if r == 0.0 {
                bail!("only {} of the points are nonzero; lower k", pairs.iter().filter(|p| radius(p) > 0.0).count());
            }
            Ok(DiamondPoint { x: x / r, y: y / r, angle: x.abs() / r })
        })
        .collect()
}

fn angle_histogram(points: &[DiamondPoint], bins: usize) -> Vec<Bin> {
    let mut counts = vec![0usize; bins];
    for p in points {
        let b = ((p.angle * bins as f64) as usize).min(bins - 1);
        counts[b] += 1;
    }
    counts
        .into_iter()
        .enumerate()
        .map(|(i, count)| Bin {
            lo: i as f64 / bins as f64,
            hi: (i + 1) as f64 / bins as f64,
            count,
            fraction: count as f64 / points.len() as f64,
        })
        .collect()
}

pub fn diamond(c: &Common, bins: usize) -> Result<()> {
    if bins == 0 {
        bail!("--bins must be positive");
    }
    let mut pairs = read_pairs(c.input()?, c.cols.as_ref())?;
    if c.abs_or(false) {
        for p in &mut pairs {
            *p = (p.0.abs(), p.1.abs());
        }
    }
    let (k, k_source) = choose_k(c, pairs.len());
    let points = diamond_points(&pairs, k)?;
    let histogram = angle_histogram(&points, bins);
    let sink = Sink::new(c.output.as_deref());
    match c.format_or(Format::Csv) {
        Format::Csv => {
            let mut pt = Table::new(&["x", "y", "angle"]);
            for p in &points {
                pt.push([num(p.x), num(p.y), num(p.angle)]);
            }
            let mut ht = Table::new(&["bin_lo", "bin_hi", "count", "fraction"]);
            for b in &histogram {
                ht.push([num(b.lo), num(b.hi), b.count.to_string(), num(b.fraction)]);
            }
            sink.write_csv_tables(&[(None, pt), (Some("hist"), ht)])
        }
        Format::Json => sink.write_json(&DiamondJson {
            schema_version: SCHEMA_VERSION,
            command: "diamond",
            n: pairs.len(),
            k,
            k_source,
            points,
            histogram,
        }),
    }
}
