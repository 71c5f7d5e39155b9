//! Seeded generators for two-component angular mixtures.
//!
//! A draw is `B * R1 * (theta1, 1 - theta1) + (1 - B) * R2 * (theta2, 1 - theta2)`
//! where `B ~ Bernoulli(mix_prob)`, `R1 ~ Pareto(alpha_main)`,
//! `R2 ~ Pareto(alpha_hidden)`, `theta1 = a + (b - a) Z` with `Z ~ Beta(p, q)`
//! and `theta2` uniform on `[0, 1] \ [a, b]`.
//!
//! Stream layout: point `i` reads `B` from substream `(gen.bernoulli, i)`,
//! `Z` from `(gen.z, i)`, `R1` from `(gen.r1, i)`, `R2` from `(gen.r2, i)` and
//! `theta2` from `(gen.theta2, i)`. Only the branch selected by `B` is drawn,
//! and no draw depends on another variable's stream.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{AngularCone, BivariatePoint, BivariateSample};
use crate::rng::{domain_tag, DomainStreams, Streams};

const D_BERNOULLI: u64 = domain_tag("gen.bernoulli");
const D_Z: u64 = domain_tag("gen.z");
const D_R1: u64 = domain_tag("gen.r1");
const D_R2: u64 = domain_tag("gen.r2");
const D_THETA2: u64 = domain_tag("gen.theta2");

/// Standard Pareto variate with `P(R > x) = x^-alpha`, `x >= 1`.
pub fn pareto<R: Rng + ?Sized>(alpha: f64, rng: &mut R) -> f64 {
    // 1 - U lies in (0, 1]
    let u = 1.0 - rng.random::<f64>();
    u.powf(-1.0 / alpha)
}

/// Logarithm of a Gamma(shape, 1) variate.
///
/// Marsaglia-Tsang squeeze for `shape >= 1`; for `shape < 1` the boost
/// `G(shape + 1) * U^(1/shape)` is applied in log space so tiny shapes do
/// not underflow.
pub fn ln_gamma_variate<R: Rng + ?Sized>(shape: f64, rng: &mut R) -> f64 {
    if shape < 1.0 {
        let u = 1.0 - rng.random::<f64>();
        return ln_gamma_variate(shape + 1.0, rng) + u.ln() / shape;
    }
    let d = shape - 1.0 / 3.0;
    let c = 1.0 / (9.0 * d).sqrt();
    loop {
        let z: f64 = StandardNormal.sample(rng);
        let v = 1.0 + c * z;
        if v <= 0.0 {
            continue;
        }
        let v = v * v * v;
        let u = 1.0 - rng.random::<f64>();
        let z2 = z * z;
        if u < 1.0 - 0.0331 * z2 * z2 || u.ln() < 0.5 * z2 + d * (1.0 - v + v.ln()) {
            return d.ln() + v.ln();
        }
    }
}

/// Beta(p, q) variate as the ratio `X / (X + Y)` of two gamma variates.
pub fn beta<R: Rng + ?Sized>(p: f64, q: f64, rng: &mut R) -> f64 {
    let lx = ln_gamma_variate(p, rng);
    let ly = ln_gamma_variate(q, rng);
    1.0 / (1.0 + (ly - lx).exp())
}

/// Uniform angle on `[0, a) ∪ (b, 1]`, each piece weighted by its length.
pub fn uniform_off_cone<R: Rng + ?Sized>(cone: &AngularCone, rng: &mut R) -> Result<f64> {
    let lower = cone.a();
    let total = lower + (1.0 - cone.b());
    if total <= 0.0 {
        return Err(Error::InvalidParameter(
            "cone covers [0, 1]; its complement is empty".to_string(),
        ));
    }
    let u = rng.random::<f64>() * total;
    Ok(if u < lower { u } else { 1.0 - (u - lower) })
}

/// Parameters of the two-component mixture.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MixtureSpec {
    pub alpha_main: f64,
    pub alpha_hidden: f64,
    pub cone: AngularCone,
    /// Beta shape parameters `(p, q)` of `Z`.
    pub z_beta: (f64, f64),
    pub mix_prob: f64,
}

impl MixtureSpec {
    pub fn new(
        alpha_main: f64,
        alpha_hidden: f64,
        cone: AngularCone,
        z_beta: (f64, f64),
        mix_prob: f64,
    ) -> Result<Self> {
        let spec = Self { alpha_main, alpha_hidden, cone, z_beta, mix_prob };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64| v > 0.0 && v.is_finite();
        if !positive(self.alpha_main) || !positive(self.alpha_hidden) {
            return Err(Error::InvalidParameter("tail indices must be positive".to_string()));
        }
        if self.alpha_hidden < self.alpha_main {
            return Err(Error::InvalidParameter(format!(
                "hidden tail index {} must be at least the main index {}",
                self.alpha_hidden, self.alpha_main
            )));
        }
        if !positive(self.z_beta.0) || !positive(self.z_beta.1) {
            return Err(Error::InvalidParameter("beta shapes must be positive".to_string()));
        }
        if !(self.mix_prob > 0.0 && self.mix_prob <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "mixing probability {} outside (0, 1]",
                self.mix_prob
            )));
        }
        if self.mix_prob < 1.0 && self.cone.is_full() {
            return Err(Error::InvalidParameter(
                "off-cone component needs a cone other than [0, 1]".to_string(),
            ));
        }
        AngularCone::new(self.cone.a(), self.cone.b())?;
        Ok(())
    }

    /// Bimodal on-cone angles: Z ~ Beta(0.05, 0.1).
    pub fn example1() -> Self {
        Self {
            alpha_main: 2.0,
            alpha_hidden: 4.0,
            cone: AngularCone::new(0.25, 0.75).expect("valid cone"),
            z_beta: (0.05, 0.1),
            mix_prob: 0.5,
        }
    }

    /// Unimodal on-cone angles: Z ~ Beta(1, 2).
    pub fn example2() -> Self {
        Self { z_beta: (1.0, 2.0), ..Self::example1() }
    }

    /// Every point on the ray through `theta0` with Pareto(alpha) radii.
    pub fn full_dependence(alpha: f64, theta0: f64) -> Result<Self> {
        Self::new(alpha, alpha, AngularCone::ray(theta0)?, (1.0, 1.0), 1.0)
    }

    /// Mean of the on-cone angle `a + (b - a) p / (p + q)`.
    pub fn on_cone_angle_mean(&self) -> f64 {
        let (p, q) = self.z_beta;
        self.cone.a() + self.cone.width() * p / (p + q)
    }

    /// Variance of the on-cone angle `(b - a)^2 pq / ((p + q)^2 (p + q + 1))`.
    pub fn on_cone_angle_variance(&self) -> f64 {
        let (p, q) = self.z_beta;
        let s = p + q;
        self.cone.width().powi(2) * p * q / (s * s * (s + 1.0))
    }

    /// Variance inflation factor `1 + sigma^2 / mu^2` of the angle-weighted
    /// statistic under strong dependence.
    pub fn variance_inflation(&self) -> f64 {
        1.0 + self.on_cone_angle_variance() / self.on_cone_angle_mean().powi(2)
    }

    /// Draw the on-cone angle `a + (b - a) Z`.
    pub fn on_cone_angle<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        if self.cone.is_ray() {
            return self.cone.a();
        }
        let z = beta(self.z_beta.0, self.z_beta.1, rng);
        // keep the angle inside [a, b] despite rounding
        (self.cone.a() + self.cone.width() * z).clamp(self.cone.a(), self.cone.b())
    }
}

/// Which mixture component a generated point came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Component {
    OnCone,
    OffCone,
}

struct PointStreams {
    coin: DomainStreams,
    z: DomainStreams,
    r1: DomainStreams,
    r2: DomainStreams,
    theta2: DomainStreams,
}

impl PointStreams {
    fn new(seed: u64) -> Self {
        let s = Streams::new(seed);
        Self {
            coin: s.domain(D_BERNOULLI),
            z: s.domain(D_Z),
            r1: s.domain(D_R1),
            r2: s.domain(D_R2),
            theta2: s.domain(D_THETA2),
        }
    }
}

fn draw_point(spec: &MixtureSpec, streams: &PointStreams, i: u64) -> (BivariatePoint, Component) {
    let on_cone = spec.mix_prob >= 1.0 || streams.coin.at(i).random::<f64>() < spec.mix_prob;
    let (r, theta, comp) = if on_cone {
        let theta = spec.on_cone_angle(&mut streams.z.at(i));
        let r = pareto(spec.alpha_main, &mut streams.r1.at(i));
        (r, theta, Component::OnCone)
    } else {
        let theta = uniform_off_cone(&spec.cone, &mut streams.theta2.at(i))
            .expect("validated spec has a nonempty off-cone region");
        let r = pareto(spec.alpha_hidden, &mut streams.r2.at(i));
        (r, theta, Component::OffCone)
    };
    let p = BivariatePoint::new(r * theta, r * (1.0 - theta)).expect("finite nonnegative draw");
    (p, comp)
}

/// `n` iid draws from the mixture; identical for identical `(spec, n, seed)`.
pub fn generate(spec: &MixtureSpec, n: usize, seed: u64) -> Result<BivariateSample> {
    Ok(generate_labeled(spec, n, seed)?.0)
}

/// Like [`generate`], also returning each point's component.
pub fn generate_labeled(
    spec: &MixtureSpec,
    n: usize,
    seed: u64,
) -> Result<(BivariateSample, Vec<Component>)> {
    spec.validate()?;
    if n == 0 {
        return Err(Error::EmptySample);
    }
    let streams = PointStreams::new(seed);
    let (points, labels): (Vec<_>, Vec<_>) = (0..n as u64)
        .into_par_iter()
        .map(|i| draw_point(spec, &streams, i))
        .unzip();
    Ok((BivariateSample::new(points)?, labels))
}

pub fn example1(n: usize, seed: u64) -> Result<BivariateSample> {
    generate(&MixtureSpec::example1(), n, seed)
}

pub fn example2(n: usize, seed: u64) -> Result<BivariateSample> {
    generate(&MixtureSpec::example2(), n, seed)
}
