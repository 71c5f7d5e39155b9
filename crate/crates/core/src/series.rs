//! Price-series preparation: strided log returns and sample autocorrelation.

use crate::error::{Error, Result};

/// Log returns over every `stride`-th price: `log(p[(j+1)s] / p[js])`.
///
/// A trailing window shorter than `stride` is dropped, so the output has
/// `(len - 1) / stride` entries.
pub fn log_returns(prices: &[f64], stride: usize) -> Result<Vec<f64>> {
    if stride == 0 {
        return Err(Error::InvalidParameter("stride must be positive".to_string()));
    }
    if prices.len() <= stride {
        return Err(Error::SeriesTooShort { len: prices.len(), need: stride });
    }
    if let Some((index, &value)) = prices
        .iter()
        .enumerate()
        .find(|(_, p)| !(p.is_finite() && **p > 0.0))
    {
        return Err(Error::NonPositivePrice { index, value });
    }
    let m = (prices.len() - 1) / stride;
    Ok((0..m)
        .map(|j| (prices[(j + 1) * stride] / prices[j * stride]).ln())
        .collect())
}

/// Sample autocorrelation at lags `0..=max_lag`, using the biased (divide by
/// `n`) autocovariance.
pub fn acf(series: &[f64], max_lag: usize) -> Result<Vec<f64>> {
    if max_lag == 0 {
        return Err(Error::InvalidParameter("max_lag must be positive".to_string()));
    }
    let n = series.len();
    if n <= max_lag {
        return Err(Error::SeriesTooShort { len: n, need: max_lag });
    }
    if series.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter("series contains non-finite values".to_string()));
    }
    let mean = series.iter().sum::<f64>() / n as f64;
    let centered: Vec<f64> = series.iter().map(|v| v - mean).collect();
    let autocov = |h: usize| -> f64 {
        centered[..n - h]
            .iter()
            .zip(&centered[h..])
            .map(|(a, b)| a * b)
            .sum::<f64>()
            / n as f64
    };
    let c0 = autocov(0);
    if c0 == 0.0 {
        return Err(Error::ConstantSeries);
    }
    Ok((0..=max_lag).map(|h| autocov(h) / c0).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_distr::{Distribution, StandardNormal};

    #[test]
    fn log_return_examples() {
        let e = std::f64::consts::E;
        let r = log_returns(&[1.0, e, e * e], 1).unwrap();
        assert_eq!(r.len(), 2);
        assert_relative_eq!(r[0], 1.0, epsilon = 1e-15);
        assert_relative_eq!(r[1], 1.0, epsilon = 1e-15);

        let r = log_returns(&[1.0, 7.0, e.powi(2), 7.0, e.powi(4)], 2).unwrap();
        assert_eq!(r.len(), 2);
        assert_relative_eq!(r[0], 2.0, epsilon = 1e-15);
        assert_relative_eq!(r[1], 2.0, epsilon = 1e-15);

        assert_eq!(log_returns(&[5.0, 5.0, 5.0], 1).unwrap(), vec![0.0, 0.0]);
    }

    #[test]
    fn log_return_counts() {
        let prices = vec![1.0; 1761];
        assert_eq!(log_returns(&prices, 2).unwrap().len(), 880);
        assert_eq!(log_returns(&prices, 1).unwrap().len(), 1760);
        // trailing partial window dropped
        assert_eq!(log_returns(&[1.0; 6], 2).unwrap().len(), 2);
    }

    #[test]
    fn log_return_errors() {
        assert!(matches!(
            log_returns(&[1.0, 0.0, 2.0], 1),
            Err(Error::NonPositivePrice { index: 1, .. })
        ));
        assert!(matches!(log_returns(&[1.0, -2.0], 1), Err(Error::NonPositivePrice { .. })));
        assert!(matches!(log_returns(&[1.0, 2.0], 2), Err(Error::SeriesTooShort { .. })));
        assert!(log_returns(&[1.0, 2.0], 0).is_err());
    }

    #[test]
    fn acf_lag_zero_is_one() {
        let a = acf(&[1.0, 3.0, 2.0, 5.0, 4.0], 3).unwrap();
        assert_eq!(a.len(), 4);
        assert_eq!(a[0], 1.0);
    }

    #[test]
    fn acf_alternating() {
        let s: Vec<f64> = (0..100).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect();
        let a = acf(&s, 1).unwrap();
        assert_relative_eq!(a[1], -0.99, epsilon = 1e-12);
    }

    #[test]
    fn acf_constant_fails() {
        assert_eq!(acf(&[2.0; 10], 2), Err(Error::ConstantSeries));
        assert!(matches!(acf(&[1.0, 2.0], 2), Err(Error::SeriesTooShort { .. })));
    }

    #[test]
    fn acf_white_noise_band() {
        let n = 10_000;
        let band = 3.0 / (n as f64).sqrt();
        let seeds = 40;
        let mut good = 0;
        for seed in 0..seeds {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let s: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
            let a = acf(&s, 20).unwrap();
            if a[1..].iter().all(|v| v.abs() < band) {
                good += 1;
            }
        }
        assert!(good as f64 >= 0.95 * seeds as f64, "{good}/{seeds}");
    }
}
