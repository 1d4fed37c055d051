//! Brackets, colouring polynomials and the brute-force oracles that check them.

mod bitgraph;
pub mod brackets;
pub mod census;
pub mod chromatic;
mod dense;
pub mod oracle;
mod potts;
pub mod tensor;

use thiserror::Error;

pub use brackets::{color_bracket, penrose, pk_bracket, pk_bracket_with, total_polynomial, PkMethod};
pub use census::{census, CensusRow};
pub use chromatic::{chromatic, chromatic_touch, ChromaticCache, SimpleGraph};
pub use oracle::oracle_pm_colorings;
pub use tensor::{tensor_contraction, TensorResult};

use crate::ribbon::RibbonError;

/// Default refusal threshold for the brute-force oracles, in elementary steps.
pub const DEFAULT_BUDGET: u64 = 1_000_000_000;

#[derive(Debug, Error)]
pub enum InvariantError {
    #[error("{what} needs {needed} steps, over the budget of {budget}")]
    Budget {
        what: &'static str,
        needed: u128,
        budget: u64,
    },
    #[error("state space of 2^{bits} is too large (limit 2^{max})")]
    TooManyStates { bits: usize, max: usize },
    #[error("{0}")]
    TooLarge(String),
    #[error("colour count {n} outside {min}..={max}")]
    BadColors { n: u64, min: u64, max: u64 },
    #[error(transparent)]
    Ribbon(#[from] RibbonError),
}

impl InvariantError {
    /// Whether the failure is a size refusal rather than bad input.
    pub fn is_budget(&self) -> bool {
        matches!(
            self,
            InvariantError::Budget { .. } | InvariantError::TooManyStates { .. } | InvariantError::TooLarge(_)
        )
    }
}
