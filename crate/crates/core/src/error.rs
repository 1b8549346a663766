use alloc::string::String;

use crate::chart::ChartRing;
use crate::param::ParamSystem;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("expected a polynomial in the {expected:?} parameters, found {found:?}")]
    SystemMismatch { expected: ParamSystem, found: ParamSystem },

    #[error("inverse generator used in {ring:?}, where it is not invertible")]
    InverseNotAllowed { ring: ChartRing },

    #[error("cannot combine elements of {left:?} and {right:?}")]
    RingMismatch { left: ChartRing, right: ChartRing },

    #[error("element does not lie in {ring:?}: {detail}")]
    NotInRing { ring: ChartRing, detail: String },

    #[error("{what} index {index} out of range for n = {n}")]
    IndexOutOfRange { what: &'static str, index: i64, n: usize },

    #[error("linear system needs {unknowns} unknowns, above the cap of {cap}")]
    TooManyUnknowns { unknowns: usize, cap: usize },

    #[error("homomorphism does not extend across chart {chart}")]
    NotExtendable { chart: usize },

    #[error("division algorithm did not terminate after {steps} steps (falsification candidate)")]
    ReductionDiverged { steps: usize },

    #[error("division algorithm stuck: {0}")]
    ReductionStuck(String),

    #[error("invalid argument: {0}")]
    Invalid(String),
}

pub type Result<T> = core::result::Result<T, Error>;
