use thiserror::Error;

use crate::phase::{SpherePoint, ZeroSet};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("eigensolver did not converge in the {sector} sector (residual {residual:.3e})")]
    Convergence { sector: String, residual: f64 },

    #[error("state {index} is degenerate (gap {gap:.3e}); its zeros are not well defined")]
    Degenerate { index: usize, gap: f64 },

    #[error("state index {index} out of range for dimension {dim}")]
    StateIndex { index: usize, dim: usize },

    #[error("root finder did not converge after {iterations} iterations")]
    RootNonConvergence {
        iterations: usize,
        partial: Box<ZeroSet>,
    },

    #[error("zero {zero} has no partner at -zeta within {tolerance:.1e}")]
    UnpairedZero { zero: SpherePoint, tolerance: f64 },

    #[error("singular parameter point: {0}")]
    Singular(String),

    #[error("inconsistent pairing energies: {0}")]
    Inconsistent(String),
}

impl Error {
    /// True for failures of the numerics (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Convergence { .. }
                | Error::Degenerate { .. }
                | Error::RootNonConvergence { .. }
                | Error::UnpairedZero { .. }
                | Error::Singular(_)
                | Error::Inconsistent(_)
        )
    }
}
