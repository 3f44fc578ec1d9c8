use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::system::LinearSystem;
use crate::exactnum::{ratio_text, ratio_text_vec, Rational};

/// A point `s` with `A·s ≤ b`, checked by substitution.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FeasiblePoint {
    #[serde(with = "ratio_text_vec")]
    pub s: Vec<Rational>,
    /// Smallest `b_r − A_r·s` over all rows.
    #[serde(with = "ratio_text")]
    pub min_slack: Rational,
}

impl FeasiblePoint {
    pub fn verify(&self, sys: &LinearSystem) -> bool {
        self.s.len() == sys.vars
            && sys.constraints.iter().all(|c| !c.slack(&self.s).is_negative())
    }
}

/// Multipliers `y ≥ 0` with `yᵀA = 0` and `yᵀb < 0`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FarkasCertificate {
    #[serde(with = "ratio_text_vec")]
    pub multipliers: Vec<Rational>,
}

impl FarkasCertificate {
    pub fn combined_row(&self, sys: &LinearSystem) -> Vec<Rational> {
        let mut acc = vec![Rational::zero(); sys.vars];
        for (y, c) in self.multipliers.iter().zip(&sys.constraints) {
            if y.is_zero() {
                continue;
            }
            for (a, k) in acc.iter_mut().zip(&c.coeffs) {
                *a += y * k;
            }
        }
        acc
    }

    pub fn combined_rhs(&self, sys: &LinearSystem) -> Rational {
        self.multipliers
            .iter()
            .zip(&sys.constraints)
            .fold(Rational::zero(), |acc, (y, c)| acc + y * &c.rhs)
    }

    pub fn verify(&self, sys: &LinearSystem) -> bool {
        self.multipliers.len() == sys.constraints.len()
            && self.multipliers.iter().all(|y| !y.is_negative())
            && self.combined_row(sys).iter().all(Zero::is_zero)
            && self.combined_rhs(sys).is_negative()
    }

    /// Scales to coprime non-negative integers.
    pub fn normalized(&self) -> FarkasCertificate {
        let lcm = self
            .multipliers
            .iter()
            .fold(BigInt::one(), |l, y| l.lcm(y.denom()));
        let ints: Vec<BigInt> = self
            .multipliers
            .iter()
            .map(|y| (y * Rational::from_integer(lcm.clone())).to_integer())
            .collect();
        let g = ints.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
        let g = if g.is_zero() { BigInt::one() } else { g };
        FarkasCertificate {
            multipliers: ints.into_iter().map(|x| Rational::from_integer(x / &g)).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Feasibility {
    Feasible(FeasiblePoint),
    Infeasible(FarkasCertificate),
}

impl Feasibility {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Feasibility::Feasible(_))
    }

    pub fn verify(&self, sys: &LinearSystem) -> bool {
        match self {
            Feasibility::Feasible(p) => p.verify(sys),
            Feasibility::Infeasible(c) => c.verify(sys),
        }
    }
}

/// Integer-preserving tableau: the true entries are `rows / det` and every
/// update divides exactly by the previous pivot.
struct Tableau {
    rows: Vec<Vec<BigInt>>,
    rhs: Vec<BigInt>,
    cost: Vec<BigInt>,
    basis: Vec<usize>,
    det: BigInt,
}

impl Tableau {
    fn pivot(&mut self, r: usize, col: usize) {
        let p = self.rows[r][col].clone();
        let prow = self.rows[r].clone();
        let prhs = self.rhs[r].clone();
        let update = |row: &mut [BigInt], rhs: Option<&mut BigInt>, det: &BigInt| {
            let f = row[col].clone();
            for (x, pr) in row.iter_mut().zip(&prow) {
                *x = (&p * &*x - &f * pr) / det;
            }
            if let Some(rhs) = rhs {
                *rhs = (&p * &*rhs - &f * &prhs) / det;
            }
        };
        for i in 0..self.rows.len() {
            if i != r {
                update(&mut self.rows[i], Some(&mut self.rhs[i]), &self.det);
            }
        }
        update(&mut self.cost, None, &self.det);
        self.det = p;
        self.basis[r] = col;
    }

    /// Bland's rule: lowest-index improving column, lowest-index basic
    /// variable among ratio-test ties.
    fn run(&mut self) {
        loop {
            let Some(col) = self.cost.iter().position(Signed::is_negative) else {
                return;
            };
            let mut best: Option<usize> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][col];
                if !a.is_positive() {
                    continue;
                }
                let better = match best {
                    None => true,
                    Some(k) => {
                        let lhs = &self.rhs[i] * &self.rows[k][col];
                        let rhs = &self.rhs[k] * a;
                        lhs < rhs || (lhs == rhs && self.basis[i] < self.basis[k])
                    }
                };
                if better {
                    best = Some(i);
                }
            }
            // Phase 1 is bounded below by zero, so a pivot row always exists.
            let r = best.expect("phase-1 objective is bounded");
            self.pivot(r, col);
        }
    }

    fn value(&self, x: &BigInt) -> Rational {
        Rational::new(x.clone(), self.det.clone())
    }
}

/// Positive factor turning `(coeffs, rhs)` into coprime integers.
fn integer_scale(coeffs: &[Rational], rhs: &Rational) -> Rational {
    let all = coeffs.iter().chain(std::iter::once(rhs));
    let lcm = all.clone().fold(BigInt::one(), |l, x| l.lcm(x.denom()));
    let g = all.fold(BigInt::zero(), |g, x| g.gcd(&(x.numer() * (&lcm / x.denom()))));
    if g.is_zero() {
        Rational::from_integer(lcm)
    } else {
        Rational::new(lcm, g)
    }
}

/// Decides `A·s ≤ b` exactly.
///
/// Phase 1 runs on the alternative system `y ≥ 0, Aᵀy = 0, −bᵀy = 1`. A zero
/// optimum hands back `y` as the infeasibility certificate; a positive one
/// leaves dual values `π` with `A·π[..V] ≤ b·π[V]`, which gives the point.
pub fn solve_feasibility(sys: &LinearSystem) -> Feasibility {
    let v = sys.vars;
    let r = sys.constraints.len();
    let m = v + 1;
    let width = r + m;
    let scales: Vec<Rational> = sys.constraints.iter().map(|c| integer_scale(&c.coeffs, &c.rhs)).collect();
    let mut rows = vec![vec![BigInt::zero(); width]; m];
    for (j, (c, k)) in sys.constraints.iter().zip(&scales).enumerate() {
        for (i, a) in c.coeffs.iter().enumerate() {
            rows[i][j] = (a * k).to_integer();
        }
        rows[v][j] = -(&c.rhs * k).to_integer();
    }
    for (i, row) in rows.iter_mut().enumerate() {
        row[r + i] = BigInt::one();
    }
    let mut rhs = vec![BigInt::zero(); m];
    rhs[v] = BigInt::one();
    let mut cost = vec![BigInt::zero(); width];
    for j in 0..r {
        cost[j] = -rows.iter().fold(BigInt::zero(), |acc, row| acc + &row[j]);
    }
    let mut t = Tableau { rows, rhs, cost, basis: (r..width).collect(), det: BigInt::one() };
    t.run();

    let objective = t
        .basis
        .iter()
        .zip(&t.rhs)
        .filter(|(b, _)| **b >= r)
        .fold(BigInt::zero(), |acc, (_, x)| acc + x);

    let outcome = if objective.is_zero() {
        let mut y = vec![Rational::zero(); r];
        for (b, x) in t.basis.iter().zip(&t.rhs) {
            if *b < r {
                y[*b] = t.value(x) * &scales[*b];
            }
        }
        Feasibility::Infeasible(FarkasCertificate { multipliers: y }.normalized())
    } else {
        let pi: Vec<Rational> = (0..m).map(|k| Rational::one() - t.value(&t.cost[r + k])).collect();
        let s: Vec<Rational> = pi[..v].iter().map(|x| x / &pi[v]).collect();
        let min_slack = sys
            .constraints
            .iter()
            .map(|c| c.slack(&s))
            .min()
            .unwrap_or_else(Rational::zero);
        Feasibility::Feasible(FeasiblePoint { s, min_slack })
    };
    assert!(outcome.verify(sys), "simplex outcome failed exact re-verification");
    outcome
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{int, rat};
    use crate::stretch::system::{Constraint, Origin};

    fn raw(coeffs: &[Rational], rhs: Rational) -> Constraint {
        Constraint { coeffs: coeffs.to_vec(), rhs, origin: Origin::Raw }
    }

    #[test]
    fn contradiction_gives_unit_multipliers() {
        let sys = LinearSystem {
            vars: 1,
            constraints: vec![raw(&[int(1)], int(-1)), raw(&[int(-1)], int(-2))],
            eta: int(0),
        };
        match solve_feasibility(&sys) {
            Feasibility::Infeasible(c) => assert_eq!(c.multipliers, vec![int(1), int(1)]),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn box_is_feasible() {
        // 1 ≤ s_1 ≤ 2, s_2 ≥ s_1 + 1/2
        let sys = LinearSystem {
            vars: 2,
            constraints: vec![
                raw(&[int(-1), int(0)], int(-1)),
                raw(&[int(1), int(0)], int(2)),
                raw(&[int(1), int(-1)], rat(-1, 2)),
            ],
            eta: int(0),
        };
        let out = solve_feasibility(&sys);
        assert!(out.is_feasible() && out.verify(&sys));
    }

    #[test]
    fn empty_system_is_feasible() {
        let sys = LinearSystem { vars: 3, constraints: vec![], eta: int(0) };
        assert!(solve_feasibility(&sys).is_feasible());
    }
}
