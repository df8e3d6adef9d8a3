use thiserror::Error;

use crate::params::RegionClass;

/// Every failure the toolkit reports.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum CknError {
    #[error("dimension N = {0} is below 5")]
    InvalidDimension(u32),
    #[error("alpha = {alpha} must exceed 2 - N = {bound}")]
    AlphaOutOfRange { alpha: f64, bound: f64 },
    #[error("beta = {beta} lies outside [{lower}, {upper}]")]
    BetaOutOfRange { beta: f64, lower: f64, upper: f64 },
    #[error("bad grid: {0}")]
    BadGridSpec(String),
    #[error("grid has {n} nodes, at least {need} required")]
    GridTooSmall { n: usize, need: usize },
    #[error("argument {0} must be positive")]
    NonPositiveArgument(f64),
    #[error("radius {0} must be positive")]
    NonPositiveRadius(f64),
    #[error("M = {0} must exceed 4")]
    MOutOfRange(f64),
    #[error("operation undefined on the boundary beta = alpha - 2")]
    RellichBoundary,
    #[error("eps = {0} outside (0, 1/2)")]
    EpsOutOfRange(f64),
    #[error("tail fraction {tail:e} exceeds {limit:e}")]
    TailInadequate { tail: f64, limit: f64 },
    #[error("quotient increased for {0} consecutive accepted steps")]
    Diverged(usize),
    #[error("no convergence after {iters} iterations (value {value}, gradient {grad})")]
    MaxIters { iters: usize, value: f64, grad: f64 },
    #[error("perturbation amplitude {0} exceeds 0.2")]
    AmplitudeTooLarge(f64),
    #[error("inverse iteration stalled after {iters} iterations (residual {residual:e})")]
    NoConvergence { iters: usize, residual: f64 },
    #[error("operation requires a point on the critical boundary with alpha < 0, got {0:?}")]
    WrongRegion(RegionClass),
    #[error("weight exponent {a} must be below (N - 2)/2 = {bound}")]
    WeightOutOfRange { a: f64, bound: f64 },
    #[error("mode {k} not supported here: {reason}")]
    InvalidMode { k: u32, reason: &'static str },
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("singular banded system at row {0}")]
    Singular(usize),
    #[error("profile vanishes identically")]
    ZeroProfile,
}

impl CknError {
    /// Stable machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Self::InvalidDimension(_) => "InvalidDimension",
            Self::AlphaOutOfRange { .. } => "AlphaOutOfRange",
            Self::BetaOutOfRange { .. } => "BetaOutOfRange",
            Self::BadGridSpec(_) => "BadGridSpec",
            Self::GridTooSmall { .. } => "GridTooSmall",
            Self::NonPositiveArgument(_) => "NonPositiveArgument",
            Self::NonPositiveRadius(_) => "NonPositiveRadius",
            Self::MOutOfRange(_) => "MOutOfRange",
            Self::RellichBoundary => "RellichBoundary",
            Self::EpsOutOfRange(_) => "EpsOutOfRange",
            Self::TailInadequate { .. } => "TailInadequate",
            Self::Diverged(_) => "Diverged",
            Self::MaxIters { .. } => "MaxIters",
            Self::AmplitudeTooLarge(_) => "AmplitudeTooLarge",
            Self::NoConvergence { .. } => "NoConvergence",
            Self::WrongRegion(_) => "WrongRegion",
            Self::WeightOutOfRange { .. } => "WeightOutOfRange",
            Self::InvalidMode { .. } => "InvalidMode",
            Self::LengthMismatch { .. } => "LengthMismatch",
            Self::Singular(_) => "Singular",
            Self::ZeroProfile => "ZeroProfile",
        }
    }
}

pub type Result<T> = std::result::Result<T, CknError>;
