//! Case analysis of a prime pair: classification, side conditions, the
//! fundamental system of units of K and the derived 2-class numbers.

pub mod biquad;
pub mod cases;
pub mod conditions;
pub mod report;
pub mod word;

use thiserror::Error;

use crate::mfield::FieldError;
use crate::quadratic::QuadError;

pub use cases::{canonical_order, synthesize_fsu, CaseId, Resolution, Synthesis, Theorem};
pub use conditions::{sqrt_half_params, sqrt_2p1p2_form, Conditions, SqrtHalfParams, TwoSquareForm};
pub use report::{analyze, analyze_with, AnalyzeOptions, CaseReport};
pub use word::{NamedWord, PairContext, UnitWord};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TheoremError {
    #[error(transparent)]
    Quad(#[from] QuadError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("inconsistency: {0}")]
    Inconsistency(String),
}

impl TheoremError {
    /// Process exit status: 2 for bad input, 3 for a mathematical or
    /// numerical failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            TheoremError::Quad(QuadError::BadPair(..) | QuadError::BadRadicand(_)) => 2,
            TheoremError::Precondition(_) => 2,
            TheoremError::Field(FieldError::BadField(_)) => 2,
            _ => 3,
        }
    }

    pub fn kind(&self) -> &'static str {
        if self.exit_code() == 2 {
            "precondition"
        } else {
            "inconsistency"
        }
    }
}
