//! Classification of the asymptotic dependence of bivariate heavy-tailed
//! data as full, strong or weak.
//!
//! The crate works with nonnegative pairs `(x, y)` in L1 polar coordinates
//! `r = x + y`, `theta = x / r`. Given the `k` largest radii it provides
//!
//! * the Hill estimator and three dependence statistics ([`estimators`]),
//! * an estimator of the angular support `[a, b]` ([`support`]),
//! * bootstrap tests for strong, full and weak dependence ([`bootstrap`]),
//! * seeded mixture generators ([`datagen`]) and price-series helpers
//!   ([`series`]).
//!
//! ```
//! use taildep::{datagen, estimators, RadialOrder, AngularCone};
//!
//! let sample = datagen::example1(5_000, 7).unwrap();
//! let ord = RadialOrder::new(&sample).unwrap();
//! let h = estimators::hill(&ord, 100).unwrap().value;
//! let d = estimators::d_star_statistic(&ord, 100, &AngularCone::full()).unwrap().value;
//! assert_eq!(h, d);
//! ```

pub mod bootstrap;
pub mod datagen;
pub mod error;
pub mod estimators;
pub mod geometry;
pub mod order;
pub mod rng;
pub mod series;
pub mod statdist;
pub mod support;

pub use bootstrap::{TestConfig, TestId, TestReport, Threshold, Verdict};
pub use error::{Error, Result};
pub use estimators::StatisticValue;
pub use geometry::{AngularCone, BivariatePoint, BivariateSample, PolarPoint};
pub use order::RadialOrder;
pub use support::{SupportEstimate, SupportFitOptions};
