//! Stretching an O-matrix into straight lines.
//!
//! Lines other than `Y0` are written `x = s_i·y + a_i` (so `s_i = 1/m_i` and
//! `a_i` is the root on `Y0`). With the roots fixed every order condition is
//! linear in `s`, and [`solve_feasibility`] settles the question exactly. With
//! everything free, [`gradient_stretch`] searches for a realization.

mod gradient;
mod simplex;
mod system;

use num_traits::{Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::arrangement::{build_omatrix, AffineLine, ArrangementError};
use crate::exactnum::{int, Rational};
use crate::omatrix::OMatrix;

pub use gradient::{gradient_stretch, random_init, GradientConfig, StretchResult, StretchStatus};
pub use simplex::{solve_feasibility, FarkasCertificate, FeasiblePoint, Feasibility};
pub use system::{build_feasibility_system, default_eta, satisfies, Constraint, LinearSystem, Origin};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StretchError {
    #[error("roots of lines {} and {} contradict row 0 at position {position}", labels.0, labels.1)]
    InterceptClash { position: usize, labels: (usize, usize) },
    #[error("expected {expected} roots, found {found}")]
    WrongInterceptCount { expected: usize, found: usize },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("need at least two lines")]
    TooFewLines,
    #[error("bad initial parameters: {0}")]
    BadInit(String),
    #[error("s_{0} is zero")]
    VerticalLine(usize),
    #[error("lines reproduce a different O-matrix")]
    Mismatch,
    #[error(transparent)]
    Arrangement(#[from] ArrangementError),
}

/// `Y0: y = 0` followed by `y = (x − a_i)/s_i`.
pub fn lines_from_parameters(a: &[Rational], s: &[Rational]) -> Result<Vec<AffineLine>, StretchError> {
    let mut lines = vec![AffineLine::new(int(0), int(0))];
    for (i, (ai, si)) in a.iter().zip(s).enumerate() {
        if si.is_zero() {
            return Err(StretchError::VerticalLine(i + 1));
        }
        let m = si.recip();
        let b = -(ai * &m);
        lines.push(AffineLine::new(m, b));
    }
    Ok(lines)
}

/// Moves every `s_i` off zero by a common shift, which is a shear of the plane.
pub fn shift_off_zero(s: &[Rational]) -> Vec<Rational> {
    if !s.iter().any(Zero::is_zero) {
        return s.to_vec();
    }
    let h = s
        .iter()
        .filter(|x| !x.is_zero())
        .map(|x| x.abs())
        .min()
        .map(|m| m / int(2))
        .unwrap_or_else(|| int(1));
    s.iter().map(|x| x + &h).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum FixedStretch {
    Feasible {
        point: FeasiblePoint,
        #[serde(skip)]
        lines: Vec<AffineLine>,
    },
    Infeasible { certificate: FarkasCertificate },
}

/// Solves the fixed-root system for `target` and, when feasible, returns
/// lines whose O-matrix is checked to equal `target`.
pub fn stretch_fixed(
    target: &OMatrix,
    intercepts: &[Rational],
    eta: Option<&Rational>,
) -> Result<(LinearSystem, FixedStretch), StretchError> {
    let eta = eta.cloned().unwrap_or_else(|| default_eta(intercepts));
    let sys = build_feasibility_system(target, intercepts, &eta)?;
    let out = match solve_feasibility(&sys) {
        Feasibility::Infeasible(certificate) => FixedStretch::Infeasible { certificate },
        Feasibility::Feasible(point) => {
            let s = shift_off_zero(&point.s);
            let lines = lines_from_parameters(intercepts, &s)?;
            let (found, _) = build_omatrix(&lines)?;
            if found != *target {
                return Err(StretchError::Mismatch);
            }
            FixedStretch::Feasible { point, lines }
        }
    };
    Ok((sys, out))
}
