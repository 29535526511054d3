use std::fmt;

use crate::kinematics::Body;

/// Failures raised anywhere in the approximation or reference pipelines.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("ZeroRadius: position vector has zero length")]
    ZeroRadius,
    #[error("DegenerateRotation: relative angular rate is zero, the orbit is purely radial")]
    DegenerateRotation,
    #[error("RadiusDivergence: conic denominator {denominator:e} is not positive at theta = {theta}")]
    RadiusDivergence { theta: f64, denominator: f64 },
    #[error("NonPositiveRadius: reconstructed radius {radius:e} at theta = {theta}")]
    NonPositiveRadius { theta: f64, radius: f64 },
    #[error("QuadratureFailure: adaptive refinement stalled on [{a}, {b}] (error estimate {estimate:e})")]
    QuadratureFailure { a: f64, b: f64, estimate: f64 },
    #[error("Unreachable: time {t} lies beyond the escape time of an unbound orbit")]
    Unreachable { t: f64 },
    #[error("Collision: bodies {0} and {1} closer than {distance:e} at t = {t}", .pair.0, .pair.1)]
    Collision { t: f64, pair: (Body, Body), distance: f64 },
    #[error("StepFailure: step size underflow at t = {t} (h = {step:e})")]
    StepFailure { t: f64, step: f64 },
    #[error("GridMismatch: sample {index} at t = {left} vs t = {right}")]
    GridMismatch { index: usize, left: f64, right: f64 },
    #[error("InvalidConfig: {0}")]
    InvalidConfig(String),
}

impl Error {
    /// Short stable identifier, the variant name.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::ZeroRadius => "ZeroRadius",
            Error::DegenerateRotation => "DegenerateRotation",
            Error::RadiusDivergence { .. } => "RadiusDivergence",
            Error::NonPositiveRadius { .. } => "NonPositiveRadius",
            Error::QuadratureFailure { .. } => "QuadratureFailure",
            Error::Unreachable { .. } => "Unreachable",
            Error::Collision { .. } => "Collision",
            Error::StepFailure { .. } => "StepFailure",
            Error::GridMismatch { .. } => "GridMismatch",
            Error::InvalidConfig(_) => "InvalidConfig",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Pipeline stage at which a per-body failure happened.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Reduce,
    FitConic,
    TimeLaw,
    Sample,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stage::Reduce => "reduce",
            Stage::FitConic => "fit_conic",
            Stage::TimeLaw => "time_law",
            Stage::Sample => "sample",
        })
    }
}

/// An [`Error`] attributed to one body and one stage of its pipeline.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("body {body}, stage {stage}: {source}")]
pub struct BodyError {
    pub body: Body,
    pub stage: Stage,
    pub source: Error,
}
