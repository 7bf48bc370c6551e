use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("point {point:?} lies outside the domain")]
    OutsideDomain { point: Vec<f64> },

    #[error("point {point:?} is not strictly inside the unit ball (|p| = {norm})")]
    OutsideBall { point: Vec<f64>, norm: f64 },

    #[error("weight is not positive at {point:?} (value {value:e})")]
    NonPositiveWeight { point: Vec<f64>, value: f64 },

    #[error("arithmetic domain error: {0}")]
    Arithmetic(String),

    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },

    #[error("unknown identifier \"{name}\" at byte {offset}")]
    UnknownIdentifier { name: String, offset: usize },

    #[error("coordinate x{index} at byte {offset} exceeds dimension {dimension}")]
    CoordinateIndex {
        index: usize,
        dimension: usize,
        offset: usize,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unknown name \"{0}\"")]
    UnknownName(String),

    #[error("non-finite coordinate in point")]
    NonFinite,

    #[error("no admissible initial path between {from:?} and {to:?}")]
    NoAdmissiblePath { from: Vec<f64>, to: Vec<f64> },

    #[error("finite-difference stencil around {point:?} leaves the domain")]
    StencilOutsideDomain { point: Vec<f64> },

    #[error("jacobian of \"{label}\" disagrees with finite differences at {point:?} (relative error {error:e})")]
    JacobianMismatch {
        label: String,
        point: Vec<f64>,
        error: f64,
    },

    #[error("no samples could be evaluated")]
    EmptySample,
}

impl Error {
    /// True for failures of the numerics (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NonPositiveWeight { .. }
                | Error::Arithmetic(_)
                | Error::NoAdmissiblePath { .. }
                | Error::StencilOutsideDomain { .. }
                | Error::JacobianMismatch { .. }
                | Error::EmptySample
        )
    }
}
