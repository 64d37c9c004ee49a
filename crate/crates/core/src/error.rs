use thiserror::Error;

use crate::complex::ComplexError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error("expected a vector of length {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("target is not Delaunay: psi[{edge}] = {value} is outside (0, pi)")]
    NotDelaunay { edge: usize, value: f64 },
    #[error("brute-force feasibility limited to {max} faces, complex has {faces}")]
    TooLarge { faces: usize, max: usize },
    #[error("angles {0:?} do not form a hyperbolic triangle")]
    NotRealizable([f64; 3]),
    #[error("angle system is not strictly inside the domain (margin {margin:e})")]
    OutsideDomain { margin: f64 },
    #[error("simplex iteration guard tripped after {0} pivots")]
    SimplexCycleGuardTripped(usize),
    #[error("target is infeasible (LP margin {epsilon:e})")]
    Infeasible { epsilon: f64 },
    #[error(
        "no convergence after {iterations} iterations: residual {residual:e}, min margin {min_margin:e}"
    )]
    MaxIterExceeded {
        iterations: usize,
        residual: f64,
        min_margin: f64,
    },
    #[error("Newton step and gradient step both failed at iteration {0}")]
    NumericalBreakdown(usize),
    #[error("solution failed certification: {0}")]
    NotCertified(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("circumcircle of face {face} is degenerate")]
    DegenerateCircle { face: usize },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
