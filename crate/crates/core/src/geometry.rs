//! First-quadrant geometry: L1 polar coordinates, angular cones and the
//! scaled cone distance.
//!
//! A point `(x, y)` with radius `r = x + y > 0` has angle `theta = x / r`.
//! The cone `[a, b]` collects every point whose angle lies in `[a, b]`; its
//! bounding rays are `y = (1/a - 1) x` (upper) and `y = (1/b - 1) x` (lower).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const ANGLE_SLACK: f64 = 4.0 * f64::EPSILON;

/// A nonnegative, finite observation pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "(f64, f64)", into = "(f64, f64)")]
pub struct BivariatePoint {
    x: f64,
    y: f64,
}

impl BivariatePoint {
    pub fn new(x: f64, y: f64) -> Result<Self> {
        if x.is_finite() && y.is_finite() && x >= 0.0 && y >= 0.0 {
            Ok(Self { x, y })
        } else {
            Err(Error::InvalidPoint { x, y })
        }
    }

    #[inline]
    pub fn x(&self) -> f64 {
        self.x
    }

    #[inline]
    pub fn y(&self) -> f64 {
        self.y
    }

    /// L1 radius `x + y`.
    #[inline]
    pub fn radius(&self) -> f64 {
        self.x + self.y
    }

    pub fn is_origin(&self) -> bool {
        self.x == 0.0 && self.y == 0.0
    }

    /// Multiply both coordinates by `c > 0`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        Self::new(self.x * c, self.y * c)
    }
}

impl TryFrom<(f64, f64)> for BivariatePoint {
    type Error = Error;

    fn try_from((x, y): (f64, f64)) -> Result<Self> {
        Self::new(x, y)
    }
}

impl From<BivariatePoint> for (f64, f64) {
    fn from(p: BivariatePoint) -> Self {
        (p.x, p.y)
    }
}

/// A nonempty list of observations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<BivariatePoint>", into = "Vec<BivariatePoint>")]
pub struct BivariateSample {
    points: Vec<BivariatePoint>,
}

impl BivariateSample {
    pub fn new(points: Vec<BivariatePoint>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptySample);
        }
        Ok(Self { points })
    }

    /// Validate and collect raw `(x, y)` pairs.
    pub fn from_pairs<I>(pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (f64, f64)>,
    {
        let points = pairs
            .into_iter()
            .map(|(x, y)| BivariatePoint::new(x, y))
            .collect::<Result<Vec<_>>>()?;
        Self::new(points)
    }

    pub fn points(&self) -> &[BivariatePoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    /// Always false; kept for API symmetry with slices.
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn scaled(&self, c: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::InvalidParameter(format!("scale factor {c} must be positive")));
        }
        let points = self.points.iter().map(|p| p.scaled(c)).collect::<Result<Vec<_>>>()?;
        Self::new(points)
    }
}

impl TryFrom<Vec<BivariatePoint>> for BivariateSample {
    type Error = Error;

    fn try_from(points: Vec<BivariatePoint>) -> Result<Self> {
        Self::new(points)
    }
}

impl From<BivariateSample> for Vec<BivariatePoint> {
    fn from(s: BivariateSample) -> Self {
        s.points
    }
}

/// L1 polar coordinates `(r, theta)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolarPoint {
    pub r: f64,
    pub theta: f64,
}

impl PolarPoint {
    /// Inverse transform `(r * theta, r * (1 - theta))`.
    pub fn to_cartesian(&self) -> Result<BivariatePoint> {
        BivariatePoint::new(self.r * self.theta, self.r * (1.0 - self.theta))
    }
}

/// `(x, y) -> (x + y, x / (x + y))`.
pub fn l1_polar(p: &BivariatePoint) -> Result<PolarPoint> {
    let r = p.radius();
    if r == 0.0 {
        return Err(Error::Origin);
    }
    Ok(PolarPoint { r, theta: p.x / r })
}

/// Closed angular interval `[a, b]` within `[0, 1]`. `a == b` is a single ray.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "(f64, f64)", into = "(f64, f64)")]
pub struct AngularCone {
    a: f64,
    b: f64,
}

impl AngularCone {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if a.is_finite() && b.is_finite() && 0.0 <= a && a <= b && b <= 1.0 {
            Ok(Self { a, b })
        } else {
            Err(Error::InvalidCone { a, b })
        }
    }

    /// The whole quadrant.
    pub fn full() -> Self {
        Self { a: 0.0, b: 1.0 }
    }

    /// The single ray through angle `theta0`.
    pub fn ray(theta0: f64) -> Result<Self> {
        Self::new(theta0, theta0)
    }

    #[inline]
    pub fn a(&self) -> f64 {
        self.a
    }

    #[inline]
    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn width(&self) -> f64 {
        self.b - self.a
    }

    pub fn is_full(&self) -> bool {
        self.a == 0.0 && self.b == 1.0
    }

    pub fn is_ray(&self) -> bool {
        self.a == self.b
    }

    /// Slope of the upper bounding ray, `1/a - 1` (infinite at `a = 0`).
    pub fn upper_slope(&self) -> f64 {
        1.0 / self.a - 1.0
    }

    /// Slope of the lower bounding ray, `1/b - 1`.
    pub fn lower_slope(&self) -> f64 {
        1.0 / self.b - 1.0
    }

    /// Closed-interval membership. Angles within a few ulps of an endpoint
    /// count as inside, since `x / (x + y)` of a point built on a bounding
    /// ray can round to either side of it.
    #[inline]
    pub fn contains_angle(&self, theta: f64) -> bool {
        self.a - ANGLE_SLACK <= theta && theta <= self.b + ANGLE_SLACK
    }

    /// `[a', b'] ⊆ [a, b]`.
    pub fn contains_cone(&self, other: &AngularCone) -> bool {
        self.a <= other.a && other.b <= self.b
    }
}

impl TryFrom<(f64, f64)> for AngularCone {
    type Error = Error;

    fn try_from((a, b): (f64, f64)) -> Result<Self> {
        Self::new(a, b)
    }
}

impl From<AngularCone> for (f64, f64) {
    fn from(c: AngularCone) -> Self {
        (c.a, c.b)
    }
}

/// Scaled distance from `p` to the cone:
/// `max{(1/b - 1) x - y, y - (1/a - 1) x, 0}`.
///
/// At `a = 0` the upper slope is infinite and the above-cone term never
/// contributes. At `b = 0` (the ray along the y-axis) any point with `x > 0`
/// is infinitely far away.
pub fn d_star(p: &BivariatePoint, cone: &AngularCone) -> f64 {
    let (x, y) = (p.x, p.y);
    let above = if cone.a == 0.0 {
        f64::NEG_INFINITY
    } else {
        y - cone.upper_slope() * x
    };
    let below = if cone.b == 0.0 {
        if x > 0.0 {
            f64::INFINITY
        } else {
            f64::NEG_INFINITY
        }
    } else {
        cone.lower_slope() * x - y
    };
    above.max(below).max(0.0)
}

/// Generalized polar coordinates relative to the cone: `(d*, p / d*)`.
///
/// The direction lies on the unit level set `d* = 1`.
pub fn gpolar(p: &BivariatePoint, cone: &AngularCone) -> Result<(f64, BivariatePoint)> {
    let d = d_star(p, cone);
    if d == 0.0 {
        return Err(Error::InsideCone);
    }
    if !d.is_finite() {
        return Err(Error::InvalidParameter(
            "distance to a degenerate axis ray is infinite".to_string(),
        ));
    }
    Ok((d, BivariatePoint::new(p.x / d, p.y / d)?))
}
