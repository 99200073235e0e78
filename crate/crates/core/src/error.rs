use thiserror::Error;

use crate::equation::StratumTag;
use crate::invariants::Absence;
use crate::expr::ExprError;

/// Errors raised above the expression kernel.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error("parabolic: D = 0")]
    Parabolic,
    #[error("degenerate map: Jacobian determinant is identically zero")]
    DegenerateMap,
    #[error("singular frame: det E = 0")]
    SingularFrame,
    #[error("singular matrix: det g = 0")]
    SingularMatrix,
    #[error("degenerate transformation: {0}")]
    DegenerateTransformation(&'static str),
    #[error("zero gauge: h = 0")]
    ZeroGauge,
    #[error("{0}")]
    Absent(Absence),
    #[error("shape: expected coefficients (0, B, 0, 0, 0, 0) with B != 0")]
    Shape,
    #[error("outside W0: {0}")]
    OutsideW0(String),
    #[error("necessary condition fails: {0}")]
    NecessaryCondition(String),
    #[error("stratum mismatch: {0} vs {1}")]
    StratumMismatch(StratumTag, StratumTag),
    #[error("precondition: {0}")]
    Precondition(String),
    #[error("input format: {0}")]
    Format(String),
}

impl Error {
    /// Whether the error reports a mathematical condition on valid input, as
    /// opposed to malformed input.
    pub fn is_domain(&self) -> bool {
        match self {
            Error::Format(_) => false,
            Error::Expr(e) => !matches!(e, ExprError::Syntax { .. } | ExprError::ZeroDenominator { .. }),
            _ => true,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
