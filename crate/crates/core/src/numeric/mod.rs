//! Floating-point laboratory for the model operator: truncated Fock
//! matrices, closed-form Bergman and Mehler kernels with quadrature checks,
//! heat-to-Bergman decay, the symbolic/numeric operator oracle, and a
//! flat-torus Landau-level demonstration.

pub mod fock;
pub mod kernels;
pub mod oracle;
pub mod quadrature;
pub mod torus;

use thiserror::Error;

use crate::exterior::ExteriorError;

pub use fock::{fock_matrix, FockBasisSpec, FockMatrix, FockSpace, Modes, TruncationWarning};
pub use kernels::{bergman_kernel_closed, heat_to_bergman_rate, mehler_kernel_closed, GridSpec};
pub use oracle::symbolic_numeric_oracle;
pub use torus::{torus_gap_demo, TorusResult, TorusSpec};

#[derive(Debug, Error, PartialEq)]
pub enum NumericError {
    #[error("invalid parameters: {0}")]
    InvalidSpec(String),
    #[error("generator {0} is not representable in the Landau basis; use the full basis")]
    Unrepresentable(String),
    #[error("primed coordinates are kernel parameters, not operators: {0}")]
    PrimedGenerator(String),
    #[error("exterior letters need a basis that includes the exterior factor: {0}")]
    MissingExterior(String),
    #[error("oracle failure for `{word}`: deviation {deviation:e} exceeds {tolerance:e}")]
    OracleFailure { word: String, deviation: f64, tolerance: f64 },
    #[error("resolution too coarse: {0}")]
    Resolution(String),
    #[error("eigensolver did not converge: {0}")]
    NoConvergence(String),
    #[error(transparent)]
    Exterior(#[from] ExteriorError),
}
