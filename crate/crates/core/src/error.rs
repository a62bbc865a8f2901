use thiserror::Error;

use crate::solver::IvpState;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("division by zero: {quantity} vanishes at t = {t}")]
    DivisionByZero { quantity: &'static str, t: f64 },

    #[error("inconsistent state at t = {t}: {detail}")]
    Inconsistent { t: f64, detail: String },

    #[error("not a boundary point at t = {t}: f = {f} is not zero")]
    NotBoundary { t: f64, f: f64 },

    #[error("singular quadrature: u' vanishes at t = {t}")]
    SingularQuadrature { t: f64 },

    #[error("malformed profile: {0}")]
    MalformedProfile(String),

    #[error("singular point at t = {t}: f*u = {fu}")]
    SingularPoint { t: f64, fu: f64 },

    #[error("boundary condition violated: {0}")]
    BoundaryCondition(String),

    #[error("step size underflow at t = {}", last.t)]
    StepUnderflow { last: IvpState },

    #[error("solution blows up near t = {}", last.t)]
    Blowup { last: IvpState },

    #[error("ambiguous endpoint at t = {t}: f and f' both vanish")]
    AmbiguousEndpoint { t: f64 },

    #[error("insufficient resolution: {0}")]
    InsufficientResolution(String),

    #[error("bracket [{lo}, {hi}] does not straddle a root (mismatch {phi_lo} and {phi_hi})")]
    BracketNoStraddle {
        lo: f64,
        hi: f64,
        phi_lo: f64,
        phi_hi: f64,
    },

    #[error("no convergence after {iterations} iterations (best mismatch {mismatch})")]
    MaxIterations {
        iterations: usize,
        best: IvpState,
        mismatch: f64,
    },

    #[error("unknown family: {0}")]
    UnknownFamily(String),

    #[error("constraint violation: {0}")]
    ConstraintViolation(String),

    #[error("grid outside domain: {0}")]
    GridOutsideDomain(String),

    #[error("endpoint mismatch: {0}")]
    TargetMissed(String),

    #[error("i/o error: {0}")]
    Io(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// True for failures of the numerics (singularities, non-convergence) as
    /// opposed to bad input or configuration.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::DivisionByZero { .. }
                | Error::SingularQuadrature { .. }
                | Error::SingularPoint { .. }
                | Error::BoundaryCondition(_)
                | Error::StepUnderflow { .. }
                | Error::Blowup { .. }
                | Error::AmbiguousEndpoint { .. }
                | Error::InsufficientResolution(_)
                | Error::BracketNoStraddle { .. }
                | Error::MaxIterations { .. }
                | Error::TargetMissed(_)
                | Error::Inconsistent { .. }
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
