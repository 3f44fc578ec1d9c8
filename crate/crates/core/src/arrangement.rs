//! Straight-line arrangements in affine form `y = m·x + b` and in the
//! normalized form `y = m·(x − a)` relative to the distinguished line `y = 0`,
//! together with the sweep that turns coordinates into an [`OMatrix`].
//!
//! The canonical sweep is a horizontal line moving downward, tilted by an
//! infinitesimal positive angle. Lines are labelled in the order it first
//! meets them: a horizontal line (if any) first, then the rest by increasing
//! `1/m`. Row `i` lists the crossings on line `i` by decreasing `y`, with the
//! crossings on a horizontal line taken left to right.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::io::Read;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::exactnum::{parse_rational, ratio_text, to_ratio_string, Interval, Rational, SignClass};
use crate::omatrix::{OMatrix, OMatrixError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ArrangementError {
    #[error("arrangement is not simple: {0}")]
    NotSimple(SimplicityReport),
    #[error("lines {0} and {1} are parallel")]
    ParallelLines(usize, usize),
    #[error("need at least {needed} lines, got {found}")]
    TooFewLines { needed: usize, found: usize },
    #[error("line index {0} out of range")]
    IndexOutOfRange(usize),
    #[error("csv record {record}: {message}")]
    Csv { record: usize, message: String },
    #[error("crossings {first} and {second} on line {row} cannot be ordered with the given enclosures")]
    AmbiguousOrder { row: usize, first: usize, second: usize },
    #[error(transparent)]
    Matrix(#[from] OMatrixError),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct AffineLine {
    #[serde(with = "ratio_text")]
    pub m: Rational,
    #[serde(with = "ratio_text")]
    pub b: Rational,
}

impl AffineLine {
    pub fn new(m: Rational, b: Rational) -> Self {
        AffineLine { m, b }
    }

    pub fn y_at(&self, x: &Rational) -> Rational {
        &self.m * x + &self.b
    }

    /// Crossing point with `other`, or `None` for parallel lines.
    pub fn crossing(&self, other: &AffineLine) -> Option<(Rational, Rational)> {
        let dm = &self.m - &other.m;
        if dm.is_zero() {
            return None;
        }
        let x = (&other.b - &self.b) / dm;
        let y = self.y_at(&x);
        Some((x, y))
    }
}

/// Reads `m,b` records; each field may be a decimal or a `p/q` literal.
pub fn read_lines_csv<R: Read>(reader: R) -> Result<Vec<AffineLine>, ArrangementError> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr
        .headers()
        .map_err(|e| ArrangementError::Csv { record: 0, message: e.to_string() })?
        .clone();
    if headers.len() != 2 || &headers[0] != "m" || &headers[1] != "b" {
        return Err(ArrangementError::Csv {
            record: 0,
            message: format!("expected header \"m,b\", found {:?}", headers.iter().collect::<Vec<_>>()),
        });
    }
    let mut out = Vec::new();
    for (idx, rec) in rdr.records().enumerate() {
        let record = idx + 1;
        let rec = rec.map_err(|e| ArrangementError::Csv { record, message: e.to_string() })?;
        let field = |k: usize| {
            parse_rational(&rec[k]).map_err(|e| ArrangementError::Csv { record, message: e.to_string() })
        };
        out.push(AffineLine::new(field(0)?, field(1)?));
    }
    Ok(out)
}

pub fn parse_lines_csv(text: &str) -> Result<Vec<AffineLine>, ArrangementError> {
    read_lines_csv(text.as_bytes())
}

/// Writes `m,b` records using exact `p/q` literals.
pub fn write_lines_csv(lines: &[AffineLine]) -> String {
    let mut out = String::from("m,b\n");
    for l in lines {
        out.push_str(&to_ratio_string(&l.m));
        out.push(',');
        out.push_str(&to_ratio_string(&l.b));
        out.push('\n');
    }
    out
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SimplicityReport {
    pub parallel_pairs: Vec<(usize, usize)>,
    pub concurrent_triples: Vec<(usize, usize, usize)>,
}

impl SimplicityReport {
    pub fn is_simple(&self) -> bool {
        self.parallel_pairs.is_empty() && self.concurrent_triples.is_empty()
    }
}

impl std::fmt::Display for SimplicityReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "parallel pairs {:?}, concurrent triples {:?}",
            self.parallel_pairs, self.concurrent_triples
        )
    }
}

/// `p·x + q·y + r = 0` with integer coefficients and `q ≠ 0`.
struct IntLine {
    p: BigInt,
    q: BigInt,
    r: BigInt,
}

impl IntLine {
    fn new(l: &AffineLine) -> Self {
        let (mn, md) = (l.m.numer(), l.m.denom());
        let (bn, bd) = (l.b.numer(), l.b.denom());
        IntLine { p: mn * bd, q: -(md * bd), r: bn * md }
    }
}

/// Unreduced fraction with positive denominator.
#[derive(Clone)]
struct Frac {
    num: BigInt,
    den: BigInt,
}

impl Frac {
    fn cmp(&self, other: &Frac) -> Ordering {
        (&self.num * &other.den).cmp(&(&other.num * &self.den))
    }
}

/// Crossing of two integer lines by Cramer's rule; `None` when parallel.
fn int_crossing(a: &IntLine, b: &IntLine) -> Option<(Frac, Frac)> {
    let mut det = &a.p * &b.q - &b.p * &a.q;
    if det.is_zero() {
        return None;
    }
    let mut x = &a.q * &b.r - &b.q * &a.r;
    let mut y = &b.p * &a.r - &a.p * &b.r;
    if det.is_negative() {
        det = -det;
        x = -x;
        y = -y;
    }
    Some((Frac { num: x, den: det.clone() }, Frac { num: y, den: det }))
}

/// Crossings on line `i` ordered by decreasing `y`, then increasing `x`,
/// along with the lines parallel to it.
fn ordered_crossings(lines: &[IntLine], i: usize) -> (Vec<(usize, Frac, Frac)>, Vec<usize>) {
    let mut crossings = Vec::with_capacity(lines.len());
    let mut parallel = Vec::new();
    for j in (0..lines.len()).filter(|&j| j != i) {
        match int_crossing(&lines[i], &lines[j]) {
            Some((x, y)) => crossings.push((j, x, y)),
            None => parallel.push(j),
        }
    }
    crossings.sort_by(|a, b| b.2.cmp(&a.2).then_with(|| a.1.cmp(&b.1)));
    (crossings, parallel)
}

/// Lists every parallel pair and every triple of lines through a common point.
pub fn check_simple(lines: &[AffineLine]) -> SimplicityReport {
    let ints: Vec<IntLine> = lines.iter().map(IntLine::new).collect();
    let mut parallel = BTreeSet::new();
    let mut triples = BTreeSet::new();
    for i in 0..ints.len() {
        let (crossings, par) = ordered_crossings(&ints, i);
        for j in par {
            parallel.insert((i.min(j), i.max(j)));
        }
        let mut start = 0;
        while start < crossings.len() {
            let mut end = start + 1;
            while end < crossings.len()
                && crossings[end].1.cmp(&crossings[start].1) == Ordering::Equal
                && crossings[end].2.cmp(&crossings[start].2) == Ordering::Equal
            {
                end += 1;
            }
            let group: Vec<usize> = crossings[start..end].iter().map(|c| c.0).collect();
            for a in 0..group.len() {
                for b in a + 1..group.len() {
                    let mut t = [i, group[a], group[b]];
                    t.sort_unstable();
                    triples.insert((t[0], t[1], t[2]));
                }
            }
            start = end;
        }
    }
    SimplicityReport {
        parallel_pairs: parallel.into_iter().collect(),
        concurrent_triples: triples.into_iter().collect(),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SweepLabeling {
    pub direction: String,
    /// `labels[k]` is the label given to input line `k`.
    pub labels: Vec<usize>,
}

impl SweepLabeling {
    /// `order()[label]` is the input index carrying that label.
    pub fn order(&self) -> Vec<usize> {
        let mut inv = vec![0; self.labels.len()];
        for (k, &l) in self.labels.iter().enumerate() {
            inv[l] = k;
        }
        inv
    }
}

pub const CANONICAL_SWEEP: &str = "horizontal, downward, infinitesimal positive tilt";

/// Angular order in which the sweep first meets two non-parallel lines.
fn sweep_cmp(p: &AffineLine, q: &AffineLine) -> Ordering {
    match (p.m.is_zero(), q.m.is_zero()) {
        (true, true) => Ordering::Equal,
        (true, false) => Ordering::Less,
        (false, true) => Ordering::Greater,
        (false, false) => p.m.recip().cmp(&q.m.recip()),
    }
}

/// Sweeps a simple arrangement and returns its O-matrix in canonical labels.
pub fn build_omatrix(lines: &[AffineLine]) -> Result<(OMatrix, SweepLabeling), ArrangementError> {
    let n = lines.len();
    if n < 2 {
        return Err(ArrangementError::TooFewLines { needed: 2, found: n });
    }
    let report = check_simple(lines);
    if !report.is_simple() {
        return Err(ArrangementError::NotSimple(report));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| sweep_cmp(&lines[i], &lines[j]));
    let mut labels = vec![0; n];
    for (label, &k) in order.iter().enumerate() {
        labels[k] = label;
    }
    let sorted: Vec<IntLine> = order.iter().map(|&k| IntLine::new(&lines[k])).collect();
    let rows = (0..n)
        .map(|i| ordered_crossings(&sorted, i).0.into_iter().map(|c| c.0).collect())
        .collect();
    let m = OMatrix::from_rows(rows)?;
    Ok((m, SweepLabeling { direction: CANONICAL_SWEEP.to_string(), labels }))
}

/// `y = m·(x − a)` with slope and root given exactly (point intervals) or as
/// enclosures.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NormalizedLine {
    pub m: Interval,
    pub a: Interval,
}

impl NormalizedLine {
    pub fn exact(m: Rational, a: Rational) -> Self {
        NormalizedLine { m: Interval::point(m), a: Interval::point(a) }
    }

    pub fn is_exact(&self) -> bool {
        self.m.is_point() && self.a.is_point()
    }

    pub fn to_affine(&self) -> Option<AffineLine> {
        self.is_exact().then(|| {
            let m = self.m.lo().clone();
            let b = -(&m * self.a.lo());
            AffineLine::new(m, b)
        })
    }
}

/// Lines `L_1..L_{n−1}` plus the implicit `Y0: y = 0` carrying index 0.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NormalizedFamily {
    pub lines: Vec<NormalizedLine>,
}

impl NormalizedFamily {
    pub fn new(lines: Vec<NormalizedLine>) -> Self {
        NormalizedFamily { lines }
    }

    /// Total number of lines including `Y0`.
    pub fn n(&self) -> usize {
        self.lines.len() + 1
    }

    pub fn line(&self, i: usize) -> Result<&NormalizedLine, ArrangementError> {
        if i == 0 || i > self.lines.len() {
            return Err(ArrangementError::IndexOutOfRange(i));
        }
        Ok(&self.lines[i - 1])
    }

    /// Exact affine lines in index order, `Y0` first.
    pub fn to_affine_lines(&self) -> Option<Vec<AffineLine>> {
        let mut out = vec![AffineLine::new(Rational::zero(), Rational::zero())];
        for l in &self.lines {
            out.push(l.to_affine()?);
        }
        Some(out)
    }

    /// `y` of the crossing of lines `i` and `j`; `0` whenever one of them is `Y0`.
    pub fn intersection_y(&self, i: usize, j: usize) -> Result<Interval, ArrangementError> {
        if i == j {
            return Err(ArrangementError::ParallelLines(i, j));
        }
        if i >= self.n() || j >= self.n() {
            return Err(ArrangementError::IndexOutOfRange(i.max(j)));
        }
        if i == 0 || j == 0 {
            return Ok(Interval::zero());
        }
        let (li, lj) = (self.line(i)?, self.line(j)?);
        let dm = &li.m - &lj.m;
        if dm.contains_zero() {
            return Err(ArrangementError::ParallelLines(i, j));
        }
        let num = &(&li.m * &lj.m) * &(&li.a - &lj.a);
        Ok(num.checked_div(&dm).expect("denominator excludes zero"))
    }

    /// O-matrix in family indices. Every adjacent pair of crossings must be
    /// strictly separated by the enclosures, otherwise the order is refused.
    pub fn omatrix(&self) -> Result<OMatrix, ArrangementError> {
        let n = self.n();
        if n < 2 {
            return Err(ArrangementError::TooFewLines { needed: 2, found: n });
        }
        let mut rows = Vec::with_capacity(n);
        let mut row0: Vec<(usize, Interval)> =
            (1..n).map(|j| (j, self.lines[j - 1].a.clone())).collect();
        row0.sort_by_key(|p| p.1.midpoint());
        rows.push(certain_order(0, row0, false)?);
        for i in 1..n {
            let mut ys = Vec::with_capacity(n - 1);
            for j in (0..n).filter(|&j| j != i) {
                ys.push((j, self.intersection_y(i, j)?));
            }
            ys.sort_by_key(|p| std::cmp::Reverse(p.1.midpoint()));
            rows.push(certain_order(i, ys, true)?);
        }
        Ok(OMatrix::from_rows(rows)?)
    }
}

fn certain_order(
    row: usize,
    keyed: Vec<(usize, Interval)>,
    descending: bool,
) -> Result<Vec<usize>, ArrangementError> {
    for w in keyed.windows(2) {
        let diff = if descending { &w[0].1 - &w[1].1 } else { &w[1].1 - &w[0].1 };
        if diff.sign() != SignClass::StrictlyPositive {
            return Err(ArrangementError::AmbiguousOrder { row, first: w[0].0, second: w[1].0 });
        }
    }
    Ok(keyed.into_iter().map(|(j, _)| j).collect())
}

/// Maps the line `y0_index` to `y = 0` by the shear `(x, y) ↦ (x, y − m₀x − b₀)`
/// and rewrites the others as `y = m(x − a)`, indexed by increasing `1/m`.
///
/// The shear fixes every vertical direction, so no image is vertical. When
/// the chosen line is horizontal the shear is a translation and the O-matrix
/// is unchanged up to relabeling; otherwise the sweep direction moves with the
/// chosen line, so rows agree up to relabeling and reversal.
pub fn normalize(lines: &[AffineLine], y0_index: usize) -> Result<NormalizedFamily, ArrangementError> {
    let base = lines.get(y0_index).ok_or(ArrangementError::IndexOutOfRange(y0_index))?;
    let report = check_simple(lines);
    if !report.is_simple() {
        return Err(ArrangementError::NotSimple(report));
    }
    let mut out: Vec<NormalizedLine> = lines
        .iter()
        .enumerate()
        .filter(|&(k, _)| k != y0_index)
        .map(|(_, l)| {
            let m = &l.m - &base.m;
            let a = -(&l.b - &base.b) / &m;
            NormalizedLine::exact(m, a)
        })
        .collect();
    out.sort_by_key(|p| p.m.lo().recip());
    Ok(NormalizedFamily::new(out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{int, rat};

    fn line(m: i64, b: i64) -> AffineLine {
        AffineLine::new(int(m), int(b))
    }

    #[test]
    fn intersection_height() {
        let fam = NormalizedFamily::new(vec![
            NormalizedLine::exact(int(2), int(0)),
            NormalizedLine::exact(int(-1), int(3)),
        ]);
        assert_eq!(fam.intersection_y(1, 2).unwrap(), Interval::point(int(2)));
        assert_eq!(fam.intersection_y(2, 1).unwrap(), Interval::point(int(2)));
        assert_eq!(fam.intersection_y(1, 0).unwrap(), Interval::zero());
    }

    #[test]
    fn simplicity_reports() {
        let r = check_simple(&[line(1, 0), line(1, 1)]);
        assert_eq!(r.parallel_pairs, vec![(0, 1)]);
        let r = check_simple(&[line(1, 0), line(-1, 0), line(0, 0)]);
        assert_eq!(r.concurrent_triples, vec![(0, 1, 2)]);
        assert!(check_simple(&[line(1, 0), line(-1, 0), line(0, 1)]).is_simple());
    }

    #[test]
    fn two_lines() {
        let (m, lab) = build_omatrix(&[line(1, 0), line(-1, 0)]).unwrap();
        assert_eq!(m.rows(), &[vec![1], vec![0]]);
        assert_eq!(lab.labels, vec![1, 0]);
    }

    #[test]
    fn not_simple_is_refused() {
        let err = build_omatrix(&[line(1, 0), line(-1, 0), line(2, 0)]).unwrap_err();
        assert!(matches!(err, ArrangementError::NotSimple(_)));
    }

    #[test]
    fn csv_round_trip() {
        let text = "m,b\n19.6440380158708,-0.578845642445838\n-1/3,2\n";
        let lines = parse_lines_csv(text).unwrap();
        assert_eq!(lines[1].m, rat(-1, 3));
        assert_eq!(parse_lines_csv(&write_lines_csv(&lines)).unwrap(), lines);
        assert!(parse_lines_csv("x,y\n1,2\n").is_err());
        assert!(matches!(
            parse_lines_csv("m,b\n1,zz\n"),
            Err(ArrangementError::Csv { record: 1, .. })
        ));
    }

    #[test]
    fn normalize_single_line() {
        let fam = normalize(&[line(0, 0), line(2, 3)], 0).unwrap();
        assert_eq!(fam.lines, vec![NormalizedLine::exact(int(2), rat(-3, 2))]);
    }

    #[test]
    fn interval_mode_refuses_overlap() {
        let fam = NormalizedFamily::new(vec![
            NormalizedLine { m: Interval::point(int(1)), a: Interval::new(int(0), int(2)) },
            NormalizedLine { m: Interval::point(int(2)), a: Interval::new(int(1), int(3)) },
        ]);
        assert!(matches!(fam.omatrix(), Err(ArrangementError::AmbiguousOrder { row: 0, .. })));
    }
}
