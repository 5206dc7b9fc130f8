//! Adelic curves and diagonal adelic vector bundles.

mod bundle;
mod curve;

use thiserror::Error;

pub use bundle::{log_symmetric_count, DiagonalAdelicBundle, Nats, SlopeProfile, SmallSections, TensorSlopeReport, DEGREE_TOLERANCE};
pub use curve::{poly, AdelicCurve, CurveMode, FieldElement, Locus, Place, PlaceKind};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AdelicError {
    #[error("the product formula is evaluated on nonzero elements only")]
    ZeroElement,
    #[error("rational function with zero denominator")]
    ZeroDenominator,
    #[error("invalid place: {0}")]
    InvalidPlace(String),
    #[error("bundle shape: {0}")]
    Shape(String),
    #[error("trivial place {0} must carry degree 0")]
    TrivialPlaceDegree(String),
    #[error("nonarchimedean place {0} has no discrete value group")]
    NoValueGroup(String),
    #[error("bundles live on different curves")]
    CurveMismatch,
    #[error("small sections are unbounded (no archimedean place bounds them)")]
    UnboundedSmallSections,
    #[error("function-field places do not share a constant field")]
    NoConstantField,
    #[error("archimedean place {0} on a function-field curve")]
    ArchimedeanInFunctionField(String),
    #[error("csv line {line}: {message}")]
    Csv { line: usize, message: String },
}
