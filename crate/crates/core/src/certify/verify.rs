use std::collections::{BTreeSet, VecDeque};

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use super::params::{slope_var, InterceptSpec, ParameterBox, EPS_VAR};
use super::CertifyError;
use crate::exactnum::{interval_eval_with, ratio_text, rat, Bindings, Expr, Interval, Rational, SignClass};
use crate::omatrix::{affine_upper_bound, enumerate_bounded_faces, OMatrix};

/// Certified lower bound of one ordering difference over the box.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Margin {
    pub row: usize,
    pub position: usize,
    pub labels: (usize, usize),
    #[serde(with = "ratio_text")]
    pub value_lo: Rational,
    /// Deepest bisection level needed.
    pub depth: u32,
}

/// Certified lower bound of `1/m_upper − 1/m_lower`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlopeMargin {
    pub lower: usize,
    pub upper: usize,
    #[serde(with = "ratio_text")]
    pub value_lo: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ZeroLocation {
    pub row: usize,
    pub position: usize,
    pub labels: (usize, usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EpsZeroReport {
    pub zero_set: Vec<ZeroLocation>,
    pub expected: Vec<ZeroLocation>,
    /// Smallest certified lower bound among the non-vanishing differences.
    #[serde(with = "ratio_text")]
    pub min_positive: Rational,
    /// Root pairs that coincide at `eps = 0`.
    pub intercept_ties: Vec<(usize, usize)>,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HypothesisCheck {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HypothesisReport {
    pub checks: Vec<HypothesisCheck>,
}

impl HypothesisReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn get(&self, name: &str) -> Option<&HypothesisCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// `y` of the crossing of lines `i` and `j`; zero when either is `Y0`.
pub fn crossing_height(b: &ParameterBox, i: usize, j: usize) -> Expr {
    if i == 0 || j == 0 {
        return Expr::zero();
    }
    let (mi, mj) = (Expr::var(slope_var(i)), Expr::var(slope_var(j)));
    let (ai, aj) = (b.intercepts[i - 1].expr(), b.intercepts[j - 1].expr());
    mi.clone() * mj.clone() * (ai - aj) / (mi - mj)
}

/// `y(i, O[i][pos]) − y(i, O[i][pos + 1])`, positive when the row order holds.
pub fn row_difference(b: &ParameterBox, target: &OMatrix, row: usize, pos: usize) -> Expr {
    let r = target.row(row);
    crossing_height(b, row, r[pos]) - crossing_height(b, row, r[pos + 1])
}

enum Outcome {
    Positive { lo: Rational, depth: u32 },
    Negative,
    Undecided { depth: u32 },
}

fn widest(expr_vars: &BTreeSet<String>, b: &Bindings) -> Option<String> {
    let mut best: Option<(Rational, &String)> = None;
    for v in expr_vars {
        if !(v == EPS_VAR || v.starts_with("m_")) {
            continue;
        }
        let w = b[v].width();
        if w.is_zero() {
            continue;
        }
        if best.as_ref().is_none_or(|(bw, _)| &w > bw) {
            best = Some((w, v));
        }
    }
    best.map(|(_, v)| v.clone())
}

/// Proves `expr > 0` on the box by breadth-first bisection of slope and
/// `eps` coordinates.
fn prove_positive(expr: &Expr, root: &Bindings, max_depth: u32, bits: u64) -> Outcome {
    let vars = expr.variables();
    let mut queue = VecDeque::from([(root.clone(), 0u32)]);
    let mut min_lo: Option<Rational> = None;
    let mut deepest = 0;
    while let Some((bind, depth)) = queue.pop_front() {
        let value = interval_eval_with(expr, &bind, Some(bits));
        match value.as_ref().map(Interval::sign) {
            Ok(SignClass::StrictlyPositive) => {
                let lo = value.unwrap().lo().clone();
                deepest = deepest.max(depth);
                if min_lo.as_ref().is_none_or(|m| &lo < m) {
                    min_lo = Some(lo);
                }
                continue;
            }
            Ok(SignClass::StrictlyNegative) => return Outcome::Negative,
            _ => {}
        }
        if value.is_ok() && value.as_ref().unwrap().is_point() {
            return Outcome::Undecided { depth };
        }
        if depth >= max_depth {
            return Outcome::Undecided { depth };
        }
        let Some(v) = widest(&vars, &bind) else {
            return Outcome::Undecided { depth };
        };
        let (left, right) = bind[&v].bisect();
        for half in [left, right] {
            let mut nb = bind.clone();
            nb.insert(v.clone(), half);
            queue.push_back((nb, depth + 1));
        }
    }
    Outcome::Positive { lo: min_lo.expect("at least one leaf"), depth: deepest }
}

/// Box bindings at successively finer tan enclosures, built on demand.
struct Ladder<'a> {
    b: &'a ParameterBox,
    eps: Interval,
    levels: Vec<Bindings>,
}

impl<'a> Ladder<'a> {
    fn new(b: &'a ParameterBox, eps: Interval) -> Self {
        Ladder { b, eps, levels: Vec::new() }
    }

    fn level(&mut self, k: usize) -> Result<&Bindings, CertifyError> {
        while self.levels.len() <= k {
            let bits = self.b.settings.tan_width_bits << self.levels.len();
            self.levels.push(self.b.bindings(&self.eps, bits)?);
        }
        Ok(&self.levels[k])
    }
}

/// Certifies one difference, doubling the tan precision while undecided.
fn certify_difference(
    ladder: &mut Ladder<'_>,
    expr: &Expr,
    row: usize,
    position: usize,
    labels: (usize, usize),
) -> Result<Margin, CertifyError> {
    let settings = ladder.b.settings.clone();
    for attempt in 0..=TAN_REFINEMENTS {
        let bind = ladder.level(attempt as usize)?;
        match prove_positive(expr, bind, settings.max_depth, settings.precision_bits) {
            Outcome::Positive { lo, depth } => {
                return Ok(Margin { row, position, labels, value_lo: lo, depth })
            }
            Outcome::Negative => return Err(CertifyError::OrderViolated { row, position }),
            Outcome::Undecided { depth } if attempt == TAN_REFINEMENTS => {
                return Err(CertifyError::Inconclusive { row, position, depth })
            }
            Outcome::Undecided { .. } => {}
        }
    }
    unreachable!()
}

const TAN_REFINEMENTS: u32 = 2;

fn check_shape(b: &ParameterBox, target: &OMatrix) -> Result<(), CertifyError> {
    if target.n() != b.line_count() {
        return Err(CertifyError::Config(format!(
            "target has {} lines, box describes {}",
            target.n(),
            b.line_count()
        )));
    }
    Ok(())
}

/// Roots along `Y0` must increase in the order of row 0.
pub fn verify_intercept_order(b: &ParameterBox, target: &OMatrix) -> Result<Vec<Margin>, CertifyError> {
    verify_intercept_order_at(b, target, &b.eps_interval())
}

fn verify_intercept_order_at(
    b: &ParameterBox,
    target: &OMatrix,
    eps: &Interval,
) -> Result<Vec<Margin>, CertifyError> {
    check_shape(b, target)?;
    let mut ladder = Ladder::new(b, eps.clone());
    let row = target.row(0);
    (0..row.len() - 1)
        .map(|j| {
            let (p, q) = (row[j], row[j + 1]);
            let expr = b.intercepts[q - 1].expr() - b.intercepts[p - 1].expr();
            certify_difference(&mut ladder, &expr, 0, j, (p, q))
        })
        .collect()
}

/// Certified margins of every adjacent crossing pair in rows `1..n`.
pub fn verify_row_orders(b: &ParameterBox, target: &OMatrix) -> Result<Vec<Margin>, CertifyError> {
    check_shape(b, target)?;
    verify_intercept_order(b, target)?;
    verify_slope_order(b)?;
    let mut ladder = Ladder::new(b, b.eps_interval());
    let mut out = Vec::new();
    for i in 1..target.n() {
        let r = target.row(i);
        for pos in 0..r.len() - 1 {
            let expr = row_difference(b, target, i, pos);
            out.push(certify_difference(&mut ladder, &expr, i, pos, (r[pos], r[pos + 1]))?);
        }
    }
    Ok(out)
}

/// Certified margins of `1/m_{i+1} − 1/m_i`.
pub fn verify_slope_order(b: &ParameterBox) -> Result<Vec<SlopeMargin>, CertifyError> {
    let mut recips = Vec::with_capacity(b.n);
    for i in 1..=b.n {
        let iv = b.slope_interval(i);
        if iv.contains_zero() {
            return Err(CertifyError::SignStraddle { line: i });
        }
        recips.push(iv.recip()?);
    }
    let mut out = Vec::new();
    for i in 1..b.n {
        let diff = &recips[i] - &recips[i - 1];
        match diff.sign() {
            SignClass::StrictlyPositive => out.push(SlopeMargin {
                lower: i,
                upper: i + 1,
                value_lo: diff.lo().clone(),
            }),
            SignClass::StrictlyNegative => {
                return Err(CertifyError::OrderViolated { row: i, position: i + 1 })
            }
            _ => return Err(CertifyError::SlopeOverlap { lower: i, upper: i + 1 }),
        }
    }
    Ok(out)
}

/// Classifies every row difference at `eps = 0` over the slope box.
pub fn verify_eps_zero(b: &ParameterBox, target: &OMatrix) -> Result<EpsZeroReport, CertifyError> {
    check_shape(b, target)?;
    let mut ladder = Ladder::new(b, Interval::zero());
    let base = ladder.level(0)?.clone();
    let mut zero_set = Vec::new();
    let mut min_positive: Option<Rational> = None;
    for i in 1..target.n() {
        let r = target.row(i);
        for pos in 0..r.len() - 1 {
            let expr = row_difference(b, target, i, pos);
            let whole = interval_eval_with(&expr, &base, Some(b.settings.precision_bits));
            if matches!(whole.as_ref().map(Interval::sign), Ok(SignClass::IdenticallyZero)) {
                zero_set.push(ZeroLocation { row: i, position: pos, labels: (r[pos], r[pos + 1]) });
                continue;
            }
            match certify_difference(&mut ladder, &expr, i, pos, (r[pos], r[pos + 1])) {
                Ok(m) => {
                    if min_positive.as_ref().is_none_or(|v| &m.value_lo < v) {
                        min_positive = Some(m.value_lo);
                    }
                }
                Err(CertifyError::OrderViolated { row, position }) => {
                    return Err(CertifyError::NegativeAtZero { row, position })
                }
                Err(e) => return Err(e),
            }
        }
    }
    let mut intercept_ties = Vec::new();
    let row0 = target.row(0);
    for w in row0.windows(2) {
        let d = b.intercepts[w[1] - 1].expr() - b.intercepts[w[0] - 1].expr();
        let v = interval_eval_with(&d, &base, Some(b.settings.precision_bits))?;
        match v.sign() {
            SignClass::IdenticallyZero => intercept_ties.push((w[0], w[1])),
            SignClass::StrictlyPositive => {}
            _ => return Err(CertifyError::NegativeAtZero { row: 0, position: 0 }),
        }
    }
    let expected = expected_zero_set(b, target);
    let expected_ties: Vec<(usize, usize)> = b
        .eps_lines()
        .map(|(p, q)| vec![(p, q)])
        .unwrap_or_default();
    let passed = expected.len() == 2 && zero_set == expected && intercept_ties == expected_ties;
    if !passed {
        return Err(CertifyError::UnexpectedZeroSet { found: zero_set, expected });
    }
    Ok(EpsZeroReport {
        zero_set,
        expected,
        min_positive: min_positive.unwrap_or_else(Rational::zero),
        intercept_ties,
        passed,
    })
}

/// At `eps = 0` the lines `−eps`, `+eps` and `Y0` pass through the origin, so
/// along each of the two lines the other two crossings coincide.
pub fn expected_zero_set(b: &ParameterBox, target: &OMatrix) -> Vec<ZeroLocation> {
    let Some((p, q)) = b.eps_lines() else { return Vec::new() };
    let mut out = Vec::new();
    for (line, other) in [(p, q), (q, p)] {
        let (s, t) = (target.position(line, 0), target.position(line, other));
        if s.abs_diff(t) == 1 {
            let pos = s.min(t);
            let r = target.row(line);
            out.push(ZeroLocation { row: line, position: pos, labels: (r[pos], r[pos + 1]) });
        }
    }
    out.sort();
    out
}

/// Checks the hypotheses that let the configuration seed the doubling step.
pub fn check_iterative_hypotheses(b: &ParameterBox, target: &OMatrix) -> HypothesisReport {
    let n = b.n as i64;
    let mut checks = Vec::new();

    let mut expected: Vec<String> = (1..n)
        .filter(|k| 2 * k < n)
        .flat_map(|k| {
            [true, false].map(|negative| InterceptSpec::Tan { k, n, negative }.to_string())
        })
        .chain(["-eps".to_string(), "+eps".to_string()])
        .collect();
    let mut found: Vec<String> = b.intercepts.iter().map(|s| s.to_string()).collect();
    expected.sort();
    found.sort();
    checks.push(HypothesisCheck {
        name: "intercept-multiset".into(),
        passed: expected == found,
        detail: format!("{} roots: ±tan(kπ/{n}) for 1 ≤ k < {n}/2 and ±eps", b.intercepts.len()),
    });

    let half = rat(1, 2 * n.max(1));
    let whole = rat(1, n.max(1));
    checks.push(HypothesisCheck {
        name: "eps-below-1/(2n)".into(),
        passed: b.eps_lo.is_positive() && b.eps_hi < half,
        detail: format!("eps_hi = {} vs 1/{}", crate::exactnum::to_ratio_string(&b.eps_hi), 2 * n),
    });
    checks.push(HypothesisCheck {
        name: "eps-below-1/n".into(),
        passed: b.eps_lo.is_positive() && b.eps_hi < whole,
        detail: format!("eps_hi = {} vs 1/{}", crate::exactnum::to_ratio_string(&b.eps_hi), n),
    });

    let census = enumerate_bounded_faces(target);
    let touching = census.touching.get(&0).copied().unwrap_or(0);
    checks.push(HypothesisCheck {
        name: "touching-distinguished-line".into(),
        passed: touching + 1 == b.n,
        detail: format!("line 0 touches {touching} triangles, need {}", b.n.saturating_sub(1)),
    });

    let bound = affine_upper_bound(target.n() as u64).ok();
    checks.push(HypothesisCheck {
        name: "triangles-attain-bound".into(),
        passed: bound == Some(census.triangles as u64),
        detail: format!("{} triangles, bound {:?}", census.triangles, bound),
    });
    HypothesisReport { checks }
}
