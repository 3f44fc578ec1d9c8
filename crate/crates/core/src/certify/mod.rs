//! Certified realization of a target O-matrix by a box of normalized lines.
//!
//! Every ordering difference is evaluated in interval arithmetic over the
//! whole box, bisecting slope and `eps` coordinates when needed. At `eps = 0`
//! the differences are classified once more; since each difference is affine
//! in `eps` for fixed slopes, non-negativity there plus positivity on
//! `[eps_lo, eps_hi]` covers all of `(0, eps_hi]`.

mod certificate;
mod params;
mod verify;

use thiserror::Error;

use crate::exactnum::NumError;

pub use certificate::{
    box_hash, emit_certificate, recheck_certificate, target_hash, CensusSummary, Certificate,
    EpsThresholds, Verdict, CERTIFICATE_FORMAT, CERTIFICATE_VERSION,
};
pub use params::{slope_var, InterceptAssignment, InterceptSpec, ParameterBox, Settings, EPS_VAR};
pub use verify::{
    check_iterative_hypotheses, crossing_height, expected_zero_set, row_difference,
    verify_eps_zero, verify_intercept_order, verify_row_orders, verify_slope_order,
    EpsZeroReport, HypothesisCheck, HypothesisReport, Margin, SlopeMargin, ZeroLocation,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CertifyError {
    #[error("row {row}, position {position}: sign undecided after bisection depth {depth}")]
    Inconclusive { row: usize, position: usize, depth: u32 },
    #[error("row {row}, position {position}: order violated somewhere in the box")]
    OrderViolated { row: usize, position: usize },
    #[error("slope interval of line {line} contains 0")]
    SignStraddle { line: usize },
    #[error("slope reciprocals of lines {lower} and {upper} overlap")]
    SlopeOverlap { lower: usize, upper: usize },
    #[error("row {row}, position {position}: negative at eps = 0")]
    NegativeAtZero { row: usize, position: usize },
    #[error("zero set at eps = 0 is {found:?}, expected {expected:?}")]
    UnexpectedZeroSet { found: Vec<ZeroLocation>, expected: Vec<ZeroLocation> },
    #[error("certificate field {field} does not match its recomputation")]
    TamperDetected { field: String },
    #[error("malformed certificate: {0}")]
    Malformed(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Num(#[from] NumError),
}
