use thiserror::Error;

use crate::specfun::SpecialFunctionError;

/// Failure while evaluating a pole condition or S-matrix element.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error(transparent)]
    Special(#[from] SpecialFunctionError),
    #[error("series recursion singular: k is within the guard radius of fixed zero n = {n}")]
    RecursionSingular { n: u32 },
    #[error("Jost series did not converge within {terms} terms")]
    SeriesNonConvergence { terms: usize },
    #[error("S-matrix pole at k = {re}{im:+}i")]
    SMatrixPole { re: f64, im: f64 },
    #[error("{0}")]
    Domain(String),
}
