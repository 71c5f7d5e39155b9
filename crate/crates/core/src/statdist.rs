//! Quantile functions for the normal, chi-square and F distributions.
//!
//! Everything here is self-contained (log-gamma, regularized incomplete
//! gamma and beta, and their inverses) so that decision thresholds are
//! reproducible bit-for-bit on every platform.

#![allow(clippy::excessive_precision)]

use crate::error::{Error, Result};

const EPS: f64 = 1e-16;
const MAX_ITER: usize = 10_000;

fn check_p(p: f64) -> Result<()> {
    if p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidProbability(p))
    }
}

fn check_dof(df: f64) -> Result<()> {
    if df > 0.0 && df.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidDof(df))
    }
}

/// `ln Gamma(x)` for `x > 0` (Lanczos, g = 7, n = 9).
pub fn ln_gamma(x: f64) -> f64 {
    const G: f64 = 7.0;
    const COEF: [f64; 9] = [
        0.999_999_999_999_809_93,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_13,
        -176.615_029_162_140_59,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_571_6e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        // reflection
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut acc = COEF[0];
    for (i, c) in COEF.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + G + 0.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}

/// Regularized lower incomplete gamma `P(a, x)`.
pub fn gamma_p(a: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x < a + 1.0 {
        gamma_series(a, x)
    } else {
        1.0 - gamma_cf(a, x)
    }
}

/// Regularized upper incomplete gamma `Q(a, x) = 1 - P(a, x)`.
pub fn gamma_q(a: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    if x < a + 1.0 {
        1.0 - gamma_series(a, x)
    } else {
        gamma_cf(a, x)
    }
}

fn gamma_series(a: f64, x: f64) -> f64 {
    let mut ap = a;
    let mut sum = 1.0 / a;
    let mut del = sum;
    for _ in 0..MAX_ITER {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if del.abs() < sum.abs() * EPS {
            break;
        }
    }
    sum * (-x + a * x.ln() - ln_gamma(a)).exp()
}

// Modified Lentz evaluation of the continued fraction for Q(a, x).
fn gamma_cf(a: f64, x: f64) -> f64 {
    let tiny = f64::MIN_POSITIVE / EPS;
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / tiny;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..MAX_ITER {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < tiny {
            d = tiny;
        }
        c = b + an / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < EPS {
            break;
        }
    }
    (-x + a * x.ln() - ln_gamma(a)).exp() * h
}

/// Regularized incomplete beta `I_x(a, b)`.
pub fn beta_inc(a: f64, b: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let ln_front =
        ln_gamma(a + b) - ln_gamma(a) - ln_gamma(b) + a * x.ln() + b * (1.0 - x).ln();
    if x < (a + 1.0) / (a + b + 2.0) {
        ln_front.exp() * beta_cf(a, b, x) / a
    } else {
        1.0 - ln_front.exp() * beta_cf(b, a, 1.0 - x) / b
    }
}

fn beta_cf(a: f64, b: f64, x: f64) -> f64 {
    let tiny = f64::MIN_POSITIVE / EPS;
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < tiny {
        d = tiny;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..MAX_ITER {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < tiny {
            d = tiny;
        }
        c = 1.0 + aa / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < tiny {
            d = tiny;
        }
        c = 1.0 + aa / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < EPS {
            break;
        }
    }
    h
}

/// Standard normal CDF.
pub fn normal_cdf(x: f64) -> f64 {
    // Phi(x) = erfc(-x / sqrt 2) / 2 and erfc(z) = Q(1/2, z^2) for z >= 0
    let half_q = 0.5 * gamma_q(0.5, 0.5 * x * x);
    if x >= 0.0 {
        1.0 - half_q
    } else {
        half_q
    }
}

// Wichura's AS 241 coefficients, highest degree first.
const CENTRAL_NUM: [f64; 8] = [
    2.509_080_928_730_122_7e3,
    3.343_057_558_358_812_8e4,
    6.726_577_092_700_870_1e4,
    4.592_195_393_154_987_1e4,
    1.373_169_376_550_946_1e4,
    1.971_590_950_306_551_4e3,
    1.331_416_678_917_843_8e2,
    3.387_132_872_796_366_6,
];
const CENTRAL_DEN: [f64; 8] = [
    5.226_495_278_852_854_6e3,
    2.872_908_573_572_194_3e4,
    3.930_789_580_009_271_1e4,
    2.121_379_430_158_659_6e4,
    5.394_196_021_424_751_1e3,
    6.871_870_074_920_579_1e2,
    4.231_333_070_160_091_1e1,
    1.0,
];
const INNER_NUM: [f64; 8] = [
    7.745_450_142_783_414_1e-4,
    2.272_384_498_926_918_5e-2,
    2.417_807_251_774_506_1e-1,
    1.270_458_252_452_368_4,
    3.647_848_324_763_204_6,
    5.769_497_221_460_691_4,
    4.630_337_846_156_545_3,
    1.423_437_110_749_683_6,
];
const INNER_DEN: [f64; 8] = [
    1.050_750_071_644_416_8e-9,
    5.475_938_084_995_344_9e-4,
    1.519_866_656_361_645_7e-2,
    1.481_039_764_274_800_7e-1,
    6.897_673_349_851_000_5e-1,
    1.676_384_830_183_803_8,
    2.053_191_626_637_758_8,
    1.0,
];
const OUTER_NUM: [f64; 8] = [
    2.010_334_399_292_288_1e-7,
    2.711_555_568_743_487_6e-5,
    1.242_660_947_388_078_4e-3,
    2.653_218_952_657_612_3e-2,
    2.965_605_718_285_048_9e-1,
    1.784_826_539_917_291_3,
    5.463_784_911_164_114_4,
    6.657_904_643_501_103_8,
];
const OUTER_DEN: [f64; 8] = [
    2.044_263_103_389_939_8e-15,
    1.421_511_758_316_445_9e-7,
    1.846_318_317_510_054_7e-5,
    7.868_691_311_456_132_6e-4,
    1.487_536_129_085_061_5e-2,
    1.369_298_809_227_358_1e-1,
    5.998_322_065_558_879_4e-1,
    1.0,
];

fn horner(coef: &[f64], x: f64) -> f64 {
    coef.iter().fold(0.0, |acc, c| acc * x + c)
}

/// Inverse standard normal CDF (Wichura's AS 241, ~1e-16 relative).
pub fn normal_quantile(p: f64) -> Result<f64> {
    check_p(p)?;
    let q = p - 0.5;
    if q.abs() <= 0.425 {
        let r = 0.180625 - q * q;
        return Ok(q * horner(&CENTRAL_NUM, r) / horner(&CENTRAL_DEN, r));
    }
    let tail = if q < 0.0 { p } else { 1.0 - p };
    let r = (-tail.ln()).sqrt();
    let val = if r <= 5.0 {
        let r = r - 1.6;
        horner(&INNER_NUM, r) / horner(&INNER_DEN, r)
    } else {
        let r = r - 5.0;
        horner(&OUTER_NUM, r) / horner(&OUTER_DEN, r)
    };
    Ok(if q < 0.0 { -val } else { val })
}

/// Chi-square CDF with `df` degrees of freedom.
pub fn chisq_cdf(x: f64, df: f64) -> f64 {
    gamma_p(0.5 * df, 0.5 * x)
}

/// F CDF with `(df1, df2)` degrees of freedom.
pub fn f_cdf(x: f64, df1: f64, df2: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    beta_inc(0.5 * df1, 0.5 * df2, df1 * x / (df1 * x + df2))
}

/// Solve `cdf(x) = p` for an increasing `cdf` on `(lo, hi)` by Newton steps
/// safeguarded with bisection. `hi` may be infinite.
fn invert_monotone(
    p: f64,
    start: f64,
    mut lo: f64,
    mut hi: f64,
    cdf: impl Fn(f64) -> f64,
    ln_pdf: impl Fn(f64) -> f64,
) -> f64 {
    let mut x = start.clamp(lo, hi);
    if !(x > lo && x < hi) {
        x = if hi.is_finite() { 0.5 * (lo + hi) } else { lo + 1.0 };
    }
    for _ in 0..200 {
        let f = cdf(x) - p;
        if f == 0.0 {
            return x;
        }
        if f < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let step = f / ln_pdf(x).exp();
        let mut next = x - step;
        if !(next > lo && next < hi) || !next.is_finite() {
            next = if hi.is_finite() { 0.5 * (lo + hi) } else { 2.0 * x.max(1.0) };
        }
        if (next - x).abs() <= 1e-15 * x.abs().max(f64::MIN_POSITIVE) {
            return next;
        }
        x = next;
    }
    x
}

/// Chi-square quantile: Newton on the regularized lower incomplete gamma
/// from a Wilson-Hilferty start.
pub fn chisq_quantile(p: f64, df: f64) -> Result<f64> {
    check_p(p)?;
    check_dof(df)?;
    let z = normal_quantile(p)?;
    let h = 2.0 / (9.0 * df);
    let wh = df * (1.0 - h + z * h.sqrt()).powi(3);
    let start = if wh > 0.0 {
        wh
    } else {
        // small-x asymptote P ~ (x/2)^(df/2) / Gamma(df/2 + 1)
        2.0 * ((p.ln() + ln_gamma(0.5 * df + 1.0)) / (0.5 * df)).exp()
    };
    let a = 0.5 * df;
    let ln_norm = ln_gamma(a) + a * std::f64::consts::LN_2;
    Ok(invert_monotone(
        p,
        start,
        0.0,
        f64::INFINITY,
        |x| chisq_cdf(x, df),
        |x| (a - 1.0) * x.ln() - 0.5 * x - ln_norm,
    ))
}

/// Inverse of the regularized incomplete beta `I_x(a, b)`.
pub fn beta_quantile(p: f64, a: f64, b: f64) -> Result<f64> {
    check_p(p)?;
    check_dof(a)?;
    check_dof(b)?;
    let ln_beta = ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b);
    // normal approximation start
    let mean = a / (a + b);
    let sd = (a * b / ((a + b).powi(2) * (a + b + 1.0))).sqrt();
    let start = (mean + normal_quantile(p)? * sd).clamp(1e-12, 1.0 - 1e-12);
    Ok(invert_monotone(
        p,
        start,
        0.0,
        1.0,
        |x| beta_inc(a, b, x),
        |x| (a - 1.0) * x.ln() + (b - 1.0) * (1.0 - x).ln() - ln_beta,
    ))
}

/// F quantile via the incomplete-beta inverse.
pub fn f_quantile(p: f64, df1: f64, df2: f64) -> Result<f64> {
    check_p(p)?;
    check_dof(df1)?;
    check_dof(df2)?;
    let x = beta_quantile(p, 0.5 * df1, 0.5 * df2)?;
    Ok(df2 * x / (df1 * (1.0 - x)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    // Reference values from an independent high-precision evaluation
    // (scipy.stats / mpmath).

    #[test]
    fn normal_reference() {
        assert_eq!(normal_quantile(0.5).unwrap(), 0.0);
        assert_relative_eq!(normal_quantile(0.975).unwrap(), 1.959_963_984_540_054, epsilon = 1e-12);
        assert_relative_eq!(normal_quantile(0.025).unwrap(), -1.959_963_984_540_054, epsilon = 1e-12);
        assert_relative_eq!(normal_quantile(0.9).unwrap(), 1.281_551_565_544_600_4, epsilon = 1e-12);
        assert_relative_eq!(normal_quantile(1e-6).unwrap(), -4.753_424_308_822_899, epsilon = 1e-10);
        assert_relative_eq!(normal_quantile(1e-10).unwrap(), -6.361_340_902_404_056, epsilon = 1e-9);
    }

    #[test]
    fn chisq_reference() {
        let cases = [
            (0.5, 2.0, 1.386_294_361_119_891),
            (0.05, 1.0, 0.003_932_140_000_019_522),
            (0.95, 1.0, 3.841_458_820_694_124),
            (0.99, 10.0, 23.209_251_158_954_356),
            (0.01, 0.5, 1.349_939_585_911_692e-8),
            (0.3, 100.0, 92.128_944_338_896_7),
            (0.95, 1999.0, 2_104.128_222_359_781),
        ];
        for (p, df, want) in cases {
            let got = chisq_quantile(p, df).unwrap();
            assert_relative_eq!(got, want, max_relative = 1e-8);
        }
    }

    #[test]
    fn f_reference() {
        let cases = [
            (0.025, 1999.0, 1999.0, 0.916_036_392_600_124_6),
            (0.975, 1999.0, 1999.0, 1.091_659_685_224_458),
            (0.95, 3.0, 7.0, 4.346_831_399_907_815),
            (0.1, 1.0, 1.0, 0.025_085_630_936_916_573),
            (0.9, 10.0, 2.0, 9.391_572_780_149_703),
            (0.5, 4.0, 9.0, 0.905_803_854_396_825_5),
            (0.05, 0.5, 30.0, 1.730_382_062_132_463_7e-5),
        ];
        for (p, d1, d2, want) in cases {
            let got = f_quantile(p, d1, d2).unwrap();
            assert_relative_eq!(got, want, max_relative = 1e-8);
        }
    }

    #[test]
    fn f_median_equal_dof() {
        for d in [1.0, 7.0, 100.0, 1999.0] {
            assert_relative_eq!(f_quantile(0.5, d, d).unwrap(), 1.0, max_relative = 1e-10);
        }
    }

    #[test]
    fn f_reciprocal() {
        for d in [10.0, 100.0, 1999.0] {
            let hi = f_quantile(0.975, d, d).unwrap();
            let lo = f_quantile(0.025, d, d).unwrap();
            assert_relative_eq!(hi, 1.0 / lo, max_relative = 1e-8);
        }
    }

    #[test]
    fn chisq_ratio_decreases_to_one() {
        let mut prev = f64::INFINITY;
        for df in [10.0, 100.0, 1000.0, 10_000.0, 100_000.0] {
            let r = chisq_quantile(0.95, df).unwrap() / df;
            assert!(r > 1.0 && r < prev, "df={df} r={r}");
            prev = r;
        }
    }

    #[test]
    fn invalid_arguments() {
        for p in [0.0, 1.0, -0.1, 1.5, f64::NAN] {
            assert!(normal_quantile(p).is_err());
            assert!(chisq_quantile(p, 3.0).is_err());
            assert!(f_quantile(p, 3.0, 4.0).is_err());
        }
        assert!(chisq_quantile(0.5, 0.0).is_err());
        assert!(f_quantile(0.5, 1.0, -2.0).is_err());
        assert!(f_quantile(0.5, f64::INFINITY, 2.0).is_err());
    }

    #[test]
    fn ln_gamma_known() {
        assert_relative_eq!(ln_gamma(1.0), 0.0, epsilon = 1e-14);
        assert_relative_eq!(ln_gamma(0.5), std::f64::consts::PI.sqrt().ln(), epsilon = 1e-14);
        assert_relative_eq!(ln_gamma(10.0), 362_880f64.ln(), max_relative = 1e-14);
        assert_relative_eq!(ln_gamma(0.05), 2.968_879_201_051_731, max_relative = 1e-12);
    }
}
