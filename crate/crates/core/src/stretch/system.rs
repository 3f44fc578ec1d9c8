use std::fmt::Write as _;

use num_traits::{Signed, Zero};
use serde::Serialize;

use super::StretchError;
use crate::exactnum::{parse_rational, ratio_text, ratio_text_vec, to_ratio_string, Rational};
use crate::omatrix::OMatrix;

/// Where a constraint row came from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Origin {
    /// Adjacent crossings `labels` at `position` of row `row`.
    Order { row: usize, position: usize, labels: (usize, usize) },
    /// `s_lower < s_upper`.
    Chain { lower: usize, upper: usize },
    Raw,
}

/// `coeffs · s ≤ rhs`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Constraint {
    #[serde(with = "ratio_text_vec")]
    pub coeffs: Vec<Rational>,
    #[serde(with = "ratio_text")]
    pub rhs: Rational,
    pub origin: Origin,
}

impl Constraint {
    pub fn lhs(&self, s: &[Rational]) -> Rational {
        self.coeffs
            .iter()
            .zip(s)
            .filter(|(c, _)| !c.is_zero())
            .fold(Rational::zero(), |acc, (c, x)| acc + c * x)
    }

    pub fn slack(&self, s: &[Rational]) -> Rational {
        &self.rhs - self.lhs(s)
    }
}

/// Linear system in the reciprocal slopes `s_1..s_vars`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LinearSystem {
    pub vars: usize,
    pub constraints: Vec<Constraint>,
    #[serde(with = "ratio_text")]
    pub eta: Rational,
}

impl LinearSystem {
    pub fn order_count(&self) -> usize {
        self.constraints
            .iter()
            .filter(|c| matches!(c.origin, Origin::Order { .. }))
            .count()
    }

    pub fn chain_count(&self) -> usize {
        self.constraints
            .iter()
            .filter(|c| matches!(c.origin, Origin::Chain { .. }))
            .count()
    }

    pub fn dump(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "vars {}", self.vars);
        let _ = writeln!(out, "eta {}", to_ratio_string(&self.eta));
        for c in &self.constraints {
            match &c.origin {
                Origin::Order { row, position, labels } => {
                    let _ = write!(out, "order {row} {position} {} {}", labels.0, labels.1);
                }
                Origin::Chain { lower, upper } => {
                    let _ = write!(out, "chain {lower} {upper}");
                }
                Origin::Raw => out.push_str("raw"),
            }
            out.push_str(" :");
            for k in &c.coeffs {
                out.push(' ');
                out.push_str(&to_ratio_string(k));
            }
            let _ = writeln!(out, " <= {}", to_ratio_string(&c.rhs));
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self, StretchError> {
        let mut vars = None;
        let mut eta = Rational::zero();
        let mut constraints = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let err = |m: &str| StretchError::Parse { line: line_no, message: m.to_string() };
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if let Some(v) = line.strip_prefix("vars ") {
                vars = Some(v.trim().parse::<usize>().map_err(|_| err("bad variable count"))?);
                continue;
            }
            if let Some(v) = line.strip_prefix("eta ") {
                eta = parse_rational(v.trim()).map_err(|e| err(&e.to_string()))?;
                continue;
            }
            let nvars = vars.ok_or_else(|| err("constraint before `vars`"))?;
            let (head, body) = line.split_once(':').ok_or_else(|| err("missing ':'"))?;
            let (lhs, rhs) = body.split_once("<=").ok_or_else(|| err("missing '<='"))?;
            let nums = |t: &str| -> Result<Vec<usize>, StretchError> {
                t.split_whitespace()
                    .skip(1)
                    .map(|x| x.parse().map_err(|_| err("bad index")))
                    .collect()
            };
            let origin = match head.split_whitespace().next() {
                Some("raw") => Origin::Raw,
                Some("chain") => match nums(head)?[..] {
                    [lower, upper] => Origin::Chain { lower, upper },
                    _ => return Err(err("chain needs two indices")),
                },
                Some("order") => match nums(head)?[..] {
                    [row, position, p, q] => Origin::Order { row, position, labels: (p, q) },
                    _ => return Err(err("order needs four indices")),
                },
                _ => return Err(err("unknown constraint kind")),
            };
            let coeffs = lhs
                .split_whitespace()
                .map(|t| parse_rational(t).map_err(|e| err(&e.to_string())))
                .collect::<Result<Vec<_>, _>>()?;
            if coeffs.len() != nvars {
                return Err(err("coefficient count differs from `vars`"));
            }
            let rhs = parse_rational(rhs.trim()).map_err(|e| err(&e.to_string()))?;
            constraints.push(Constraint { coeffs, rhs, origin });
        }
        let vars = vars.ok_or(StretchError::Parse { line: 0, message: "missing `vars`".into() })?;
        Ok(LinearSystem { vars, constraints, eta })
    }
}

fn sign(x: i64) -> Rational {
    Rational::from_integer(x.signum().into())
}

/// `1e-6 · max |a_i − a_j|`.
pub fn default_eta(intercepts: &[Rational]) -> Rational {
    let lo = intercepts.iter().min();
    let hi = intercepts.iter().max();
    match (lo, hi) {
        (Some(lo), Some(hi)) if lo < hi => (hi - lo) / Rational::from_integer(1_000_000.into()),
        _ => Rational::from_integer(1.into()) / Rational::from_integer(1_000_000.into()),
    }
}

/// Order constraints with fixed roots `a_1..a_{n−1}` (line `i` is `x = s_i·y + a_i`).
///
/// For crossings `p` before `q` on line `i`, the row order asks
/// `(a_i − a_p)/(s_p − s_i) > (a_i − a_q)/(s_q − s_i)`; with the chain in
/// force, `sign(s_p − s_i) = sign(p − i)`, so clearing denominators yields a
/// linear form. Comparisons against `Y0` do not involve `s` at all.
pub fn build_feasibility_system(
    target: &OMatrix,
    intercepts: &[Rational],
    eta: &Rational,
) -> Result<LinearSystem, StretchError> {
    let n = target.n();
    let vars = n - 1;
    if intercepts.len() != vars {
        return Err(StretchError::WrongInterceptCount { expected: vars, found: intercepts.len() });
    }
    let a = |i: usize| &intercepts[i - 1];
    let row0 = target.row(0);
    for (j, w) in row0.windows(2).enumerate() {
        if a(w[0]) >= a(w[1]) {
            return Err(StretchError::InterceptClash { position: j, labels: (w[0], w[1]) });
        }
    }
    let mut constraints = Vec::new();
    let neg_eta = -eta.clone();
    for i in 1..n {
        let r = target.row(i);
        for (pos, w) in r.windows(2).enumerate() {
            let (p, q) = (w[0], w[1]);
            let origin = Origin::Order { row: i, position: pos, labels: (p, q) };
            let mut coeffs = vec![Rational::zero(); vars];
            let rhs = if p == 0 {
                // 0 > y_{i,q}
                -(sign(q as i64 - i as i64) * (a(i) - a(q)))
            } else if q == 0 {
                // y_{i,p} > 0
                sign(p as i64 - i as i64) * (a(i) - a(p))
            } else {
                let sigma = sign(p as i64 - i as i64) * sign(q as i64 - i as i64);
                coeffs[q - 1] = -(&sigma * (a(i) - a(p)));
                coeffs[p - 1] = &sigma * (a(i) - a(q));
                coeffs[i - 1] = -(&sigma * (a(p) - a(q)));
                neg_eta.clone()
            };
            constraints.push(Constraint { coeffs, rhs, origin });
        }
    }
    for i in 1..vars {
        let mut coeffs = vec![Rational::zero(); vars];
        coeffs[i - 1] = Rational::from_integer(1.into());
        coeffs[i] = Rational::from_integer((-1).into());
        constraints.push(Constraint { coeffs, rhs: neg_eta.clone(), origin: Origin::Chain { lower: i, upper: i + 1 } });
    }
    Ok(LinearSystem { vars, constraints, eta: eta.clone() })
}

/// True when every constraint holds at `s` (no strictness beyond the system).
pub fn satisfies(sys: &LinearSystem, s: &[Rational]) -> bool {
    s.len() == sys.vars && sys.constraints.iter().all(|c| !c.slack(s).is_negative())
}
