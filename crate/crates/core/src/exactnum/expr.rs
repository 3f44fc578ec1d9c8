//! Rational expression trees over named variables, evaluated either exactly
//! at a point or as an interval enclosure over a box.

use std::collections::{BTreeMap, BTreeSet};
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_traits::Zero;

use super::interval::Interval;
use super::rational::Rational;
use super::NumError;

/// Significant bits kept by [`interval_eval`] before outward rounding kicks in.
pub const DEFAULT_PRECISION_BITS: u64 = 256;

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Var(String),
    Const(Rational),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
}

pub type Bindings = BTreeMap<String, Interval>;

impl Expr {
    pub fn var(name: impl Into<String>) -> Expr {
        Expr::Var(name.into())
    }

    pub fn constant(value: Rational) -> Expr {
        Expr::Const(value)
    }

    pub fn zero() -> Expr {
        Expr::Const(Rational::zero())
    }

    pub fn variables(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Expr::Var(name) => {
                out.insert(name.clone());
            }
            Expr::Const(_) => {}
            Expr::Neg(e) => e.collect_vars(out),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
        }
    }

    /// Exact evaluation at a rational point.
    pub fn eval_point(&self, point: &BTreeMap<String, Rational>) -> Result<Rational, NumError> {
        Ok(match self {
            Expr::Var(name) => point
                .get(name)
                .cloned()
                .ok_or_else(|| NumError::UnboundVariable(name.clone()))?,
            Expr::Const(c) => c.clone(),
            Expr::Neg(e) => -e.eval_point(point)?,
            Expr::Add(a, b) => a.eval_point(point)? + b.eval_point(point)?,
            Expr::Sub(a, b) => a.eval_point(point)? - b.eval_point(point)?,
            Expr::Mul(a, b) => a.eval_point(point)? * b.eval_point(point)?,
            Expr::Div(a, b) => {
                let d = b.eval_point(point)?;
                if d.is_zero() {
                    return Err(NumError::DivisionByZeroInterval("[0, 0]".into()));
                }
                a.eval_point(point)? / d
            }
        })
    }
}

/// Encloses `{expr(x) : x ∈ bindings}` with the default precision cap.
pub fn interval_eval(expr: &Expr, bindings: &Bindings) -> Result<Interval, NumError> {
    interval_eval_with(expr, bindings, Some(DEFAULT_PRECISION_BITS))
}

/// As [`interval_eval`]; `cap = None` keeps every endpoint exact.
pub fn interval_eval_with(
    expr: &Expr,
    bindings: &Bindings,
    cap: Option<u64>,
) -> Result<Interval, NumError> {
    let iv = match expr {
        Expr::Var(name) => bindings
            .get(name)
            .cloned()
            .ok_or_else(|| NumError::UnboundVariable(name.clone()))?,
        Expr::Const(c) => Interval::point(c.clone()),
        Expr::Neg(e) => -interval_eval_with(e, bindings, cap)?,
        Expr::Add(a, b) => {
            interval_eval_with(a, bindings, cap)? + interval_eval_with(b, bindings, cap)?
        }
        Expr::Sub(a, b) => {
            interval_eval_with(a, bindings, cap)? - interval_eval_with(b, bindings, cap)?
        }
        Expr::Mul(a, b) => {
            interval_eval_with(a, bindings, cap)? * interval_eval_with(b, bindings, cap)?
        }
        Expr::Div(a, b) => {
            let num = interval_eval_with(a, bindings, cap)?;
            let den = interval_eval_with(b, bindings, cap)?;
            num.checked_div(&den)?
        }
    };
    Ok(match cap {
        Some(bits) => iv.round_outward(bits),
        None => iv,
    })
}

macro_rules! expr_binop {
    ($tr:ident, $m:ident, $variant:ident) => {
        impl $tr for Expr {
            type Output = Expr;
            fn $m(self, rhs: Expr) -> Expr {
                Expr::$variant(Box::new(self), Box::new(rhs))
            }
        }
    };
}
expr_binop!(Add, add, Add);
expr_binop!(Sub, sub, Sub);
expr_binop!(Mul, mul, Mul);
expr_binop!(Div, div, Div);

impl Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::Neg(Box::new(self))
    }
}
