use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid point ({x}, {y}): coordinates must be finite and nonnegative")]
    InvalidPoint { x: f64, y: f64 },

    #[error("L1 polar transform is undefined at the origin")]
    Origin,

    #[error("invalid cone [{a}, {b}]: need 0 <= a <= b <= 1")]
    InvalidCone { a: f64, b: f64 },

    #[error("point lies inside the cone; generalized polar coordinates are undefined")]
    InsideCone,

    #[error("empty sample")]
    EmptySample,

    #[error("every observation has zero radius")]
    AllZero,

    #[error("k = {k} out of range for sample of size {n} (need 1 <= k < n)")]
    KOutOfRange { k: usize, n: usize },

    #[error("k-th largest radius is zero")]
    ZeroThreshold,

    #[error("top-{k} concomitant angles sum to zero")]
    ZeroAngleSum { k: usize },

    #[error("invalid probability {0}: must lie strictly in (0, 1)")]
    InvalidProbability(f64),

    #[error("invalid degrees of freedom {0}")]
    InvalidDof(f64),

    #[error("nonpositive price {value} at index {index}")]
    NonPositivePrice { index: usize, value: f64 },

    #[error("series too short: length {len}, need more than {need}")]
    SeriesTooShort { len: usize, need: usize },

    #[error("constant series has zero variance")]
    ConstantSeries,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("too many degenerate resamples: {draws} draws to fill {b} resamples")]
    DegenerateResamples { draws: usize, b: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
