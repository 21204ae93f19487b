use num_complex::Complex64;
use thiserror::Error;

use crate::point::Axis;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid quadrature spec: {0}")]
    InvalidSpec(String),
    #[error("quadrature did not converge (value {value}, error estimate {error:e})")]
    NonConvergence { value: Complex64, error: f64 },
    #[error("invalid measure: {0}")]
    InvalidMeasure(String),
    #[error("invalid region: {0}")]
    InvalidRegion(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("restriction to the hyperplane t_{axis} = {offset} is undecidable: {reason}")]
    Undecidable { axis: Axis, offset: f64, reason: String },
    #[error("measure puts mass on the hyperplane t_{axis} = {offset}; the Möbius pushforward needs it to be null")]
    HyperplaneMass { axis: Axis, offset: f64 },
    #[error("not a Nevanlinna measure: {0}")]
    NotNevanlinna(String),
    #[error("non-tangential limit estimation failed (estimate {estimate}, residual {residual:e})")]
    EstimationFailed { estimate: f64, residual: f64 },
    #[error("chart seam: {0}")]
    Seam(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
