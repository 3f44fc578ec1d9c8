use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{lines_from_parameters, StretchError};
use crate::arrangement::{build_omatrix, AffineLine};
use crate::exactnum::rational::from_f64_bounded;
use crate::exactnum::{ratio_text_vec, Rational};
use crate::omatrix::OMatrix;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GradientConfig {
    pub margin: f64,
    pub max_iterations: u64,
    /// Largest denominator accepted when rounding parameters to rationals.
    pub max_denominator: u64,
    pub armijo: f64,
}

impl Default for GradientConfig {
    fn default() -> Self {
        GradientConfig { margin: 1e-3, max_iterations: 100_000, max_denominator: 1_000_000_000_000, armijo: 1e-4 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum StretchStatus {
    Realized,
    Stalled,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StretchResult {
    pub status: StretchStatus,
    #[serde(with = "ratio_text_vec")]
    pub a: Vec<Rational>,
    #[serde(with = "ratio_text_vec")]
    pub s: Vec<Rational>,
    /// `Σ max(0, g_r)²` at the returned parameters.
    pub residual: f64,
    pub iterations: u64,
    #[serde(skip)]
    pub lines: Option<Vec<AffineLine>>,
}

/// One cleared-denominator inequality `g(a, s) < 0`. Indices are line labels.
#[derive(Clone, Copy, Debug)]
enum Term {
    /// `a_p − a_q`
    Roots { p: usize, q: usize },
    /// `s_lo − s_hi`
    Chain { lo: usize, hi: usize },
    /// `t·(a_i − a_j)`
    Anchor { t: f64, i: usize, j: usize },
    /// `−σ[(a_i − a_p)(s_q − s_i) − (a_i − a_q)(s_p − s_i)]`
    Order { sigma: f64, i: usize, p: usize, q: usize },
}

struct Problem {
    v: usize,
    terms: Vec<Term>,
}

fn sgn(x: i64) -> f64 {
    x.signum() as f64
}

impl Problem {
    fn new(target: &OMatrix) -> Self {
        let n = target.n();
        let mut terms = Vec::new();
        for w in target.row(0).windows(2) {
            terms.push(Term::Roots { p: w[0], q: w[1] });
        }
        for i in 1..n {
            for w in target.row(i).windows(2) {
                let (p, q) = (w[0], w[1]);
                let (pi, qi, ii) = (p as i64, q as i64, i as i64);
                terms.push(if p == 0 {
                    Term::Anchor { t: sgn(qi - ii), i, j: q }
                } else if q == 0 {
                    Term::Anchor { t: -sgn(pi - ii), i, j: p }
                } else {
                    Term::Order { sigma: sgn(pi - ii) * sgn(qi - ii), i, p, q }
                });
            }
        }
        for i in 1..n - 1 {
            terms.push(Term::Chain { lo: i, hi: i + 1 });
        }
        Problem { v: n - 1, terms }
    }

    fn a(&self, i: usize) -> usize {
        i - 1
    }

    fn s(&self, i: usize) -> usize {
        self.v + i - 1
    }

    fn value(&self, term: &Term, x: &[f64]) -> f64 {
        match *term {
            Term::Roots { p, q } => x[self.a(p)] - x[self.a(q)],
            Term::Chain { lo, hi } => x[self.s(lo)] - x[self.s(hi)],
            Term::Anchor { t, i, j } => t * (x[self.a(i)] - x[self.a(j)]),
            Term::Order { sigma, i, p, q } => {
                let (ai, ap, aq) = (x[self.a(i)], x[self.a(p)], x[self.a(q)]);
                let (si, sp, sq) = (x[self.s(i)], x[self.s(p)], x[self.s(q)]);
                -sigma * ((ai - ap) * (sq - si) - (ai - aq) * (sp - si))
            }
        }
    }

    fn add_gradient(&self, term: &Term, x: &[f64], w: f64, g: &mut [f64]) {
        match *term {
            Term::Roots { p, q } => {
                g[self.a(p)] += w;
                g[self.a(q)] -= w;
            }
            Term::Chain { lo, hi } => {
                g[self.s(lo)] += w;
                g[self.s(hi)] -= w;
            }
            Term::Anchor { t, i, j } => {
                g[self.a(i)] += w * t;
                g[self.a(j)] -= w * t;
            }
            Term::Order { sigma, i, p, q } => {
                let (ai, ap, aq) = (x[self.a(i)], x[self.a(p)], x[self.a(q)]);
                let (si, sp, sq) = (x[self.s(i)], x[self.s(p)], x[self.s(q)]);
                let (ca, bs, cq, ds) = (ai - ap, sq - si, ai - aq, sp - si);
                let k = w * sigma;
                g[self.a(i)] += k * (ds - bs);
                g[self.a(p)] += k * bs;
                g[self.a(q)] -= k * ds;
                g[self.s(q)] -= k * ca;
                g[self.s(p)] += k * cq;
                g[self.s(i)] += k * (ca - cq);
            }
        }
    }

    fn loss(&self, x: &[f64], margin: f64) -> f64 {
        self.terms
            .iter()
            .map(|t| (self.value(t, x) + margin).max(0.0).powi(2))
            .sum()
    }

    fn loss_and_gradient(&self, x: &[f64], margin: f64) -> (f64, Vec<f64>) {
        let mut g = vec![0.0; x.len()];
        let mut loss = 0.0;
        for t in &self.terms {
            let h = self.value(t, x) + margin;
            if h > 0.0 {
                loss += h * h;
                self.add_gradient(t, x, 2.0 * h, &mut g);
            }
        }
        (loss, g)
    }

    fn residual(&self, x: &[f64]) -> f64 {
        self.loss(x, 0.0)
    }

    fn all_strict(&self, x: &[f64]) -> bool {
        self.terms.iter().all(|t| self.value(t, x) < 0.0)
    }
}

/// Random start that already satisfies the `Y0` row and the slope chain.
pub fn random_init(target: &OMatrix, seed: u64) -> Vec<f64> {
    let v = target.n() - 1;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = |k: usize| {
        let mut xs: Vec<f64> = (0..k).map(|_| rng.gen_range(-1.0..1.0)).collect();
        xs.sort_by(f64::total_cmp);
        xs
    };
    let roots = draw(v);
    let slopes = draw(v);
    let mut x = vec![0.0; 2 * v];
    for (rank, &label) in target.row(0).iter().enumerate() {
        x[label - 1] = roots[rank];
    }
    x[v..].copy_from_slice(&slopes);
    x
}

fn rationalize(x: &[f64], max_den: u64) -> Option<Vec<Rational>> {
    x.iter().map(|&v| from_f64_bounded(v, max_den)).collect()
}

fn exact_check(target: &OMatrix, x: &[f64], v: usize, max_den: u64) -> Option<(Vec<Rational>, Vec<Rational>, Vec<AffineLine>)> {
    let q = rationalize(x, max_den)?;
    let (a, s) = (q[..v].to_vec(), q[v..].to_vec());
    let lines = lines_from_parameters(&a, &s).ok()?;
    let (found, _) = build_omatrix(&lines).ok()?;
    (found == *target).then_some((a, s, lines))
}

/// Minimizes `Σ max(0, g_r + margin)²` by gradient descent with backtracking.
///
/// `init` holds `a_1..a_{n−1}` followed by `s_1..s_{n−1}` for lines
/// `x = s_i·y + a_i`, with `Y0` fixed at `y = 0`. Whenever every `g_r` is
/// negative in floating point, the parameters are rounded to rationals and
/// the O-matrix is recomputed exactly; only an exact match counts.
pub fn gradient_stretch(
    target: &OMatrix,
    init: &[f64],
    config: &GradientConfig,
) -> Result<StretchResult, StretchError> {
    let n = target.n();
    if n < 2 {
        return Err(StretchError::TooFewLines);
    }
    let v = n - 1;
    if init.len() != 2 * v || init.iter().any(|x| !x.is_finite()) {
        return Err(StretchError::BadInit(format!("expected {} finite parameters", 2 * v)));
    }
    let mut sorted: Vec<f64> = init[v..].to_vec();
    sorted.sort_by(f64::total_cmp);
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(StretchError::BadInit("slopes are not pairwise distinct".into()));
    }

    let problem = Problem::new(target);
    let mut x = init.to_vec();
    let mut step = 1.0;
    let mut iterations = 0;
    let stalled = |x: &[f64], iterations| {
        let q = rationalize(x, config.max_denominator).unwrap_or_else(|| vec![Rational::zero(); 2 * v]);
        StretchResult {
            status: StretchStatus::Stalled,
            a: q[..v].to_vec(),
            s: q[v..].to_vec(),
            residual: problem.residual(x),
            iterations,
            lines: None,
        }
    };
    loop {
        if problem.all_strict(&x) {
            if let Some((a, s, lines)) = exact_check(target, &x, v, config.max_denominator) {
                return Ok(StretchResult {
                    status: StretchStatus::Realized,
                    a,
                    s,
                    residual: 0.0,
                    iterations,
                    lines: Some(lines),
                });
            }
        }
        if iterations >= config.max_iterations {
            return Ok(stalled(&x, iterations));
        }
        let (loss, grad) = problem.loss_and_gradient(&x, config.margin);
        let norm2: f64 = grad.iter().map(|g| g * g).sum();
        if loss == 0.0 || norm2 == 0.0 {
            return Ok(stalled(&x, iterations));
        }
        step *= 2.0;
        let mut trial;
        loop {
            trial = x.iter().zip(&grad).map(|(xi, gi)| xi - step * gi).collect::<Vec<_>>();
            if problem.loss(&trial, config.margin) <= loss - config.armijo * step * norm2 {
                break;
            }
            step *= 0.5;
            if step < 1e-30 {
                return Ok(stalled(&x, iterations));
            }
        }
        x = trial;
        iterations += 1;
    }
}
