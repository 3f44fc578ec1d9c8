//! Exact rational arithmetic, outward-rounded interval arithmetic and
//! certified enclosures of the intercept constants `±tan(kπ/n)`.

pub mod expr;
pub mod interval;
pub mod rational;
pub mod tan;

use thiserror::Error;

pub use expr::{interval_eval, interval_eval_with, Bindings, Expr, DEFAULT_PRECISION_BITS};
pub use interval::{sign_of, Interval, SignClass};
pub use rational::{
    best_approximation, from_f64_bounded, int, parse_rational, rat, ratio_text, ratio_text_vec, to_f64, to_ratio_string,
    Decimal, Rational,
};
pub use tan::{default_tan_width, enclose_pi, enclose_tan, pow2_neg, DEFAULT_TAN_WIDTH_BITS};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NumError {
    #[error("division by an interval containing zero: {0}")]
    DivisionByZeroInterval(String),
    #[error("tan(kπ/n) is undefined for k = {k}, n = {n}")]
    PoleError { k: i64, n: i64 },
    #[error("tan(kπ/n) requested outside 1 ≤ k < n/2 (k = {k}, n = {n})")]
    TanDomain { k: i64, n: i64 },
    #[error("width bound must be positive")]
    NonPositiveWidth,
    #[error("malformed number literal {0:?}")]
    Parse(String),
    #[error("unbound variable {0}")]
    UnboundVariable(String),
}
