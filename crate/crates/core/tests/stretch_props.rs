mod common;

use common::{q, simple_lines};
use kobon_core::arrangement::build_omatrix;
use kobon_core::exactnum::int;
use kobon_core::stretch::{
    gradient_stretch, random_init, solve_feasibility, Constraint, FarkasCertificate, Feasibility,
    GradientConfig, LinearSystem, Origin, StretchStatus,
};
use kobon_core::Rational;
use proptest::prelude::*;

fn system() -> impl Strategy<Value = LinearSystem> {
    (1usize..=4, 1usize..=9).prop_flat_map(|(vars, rows)| {
        proptest::collection::vec(
            (proptest::collection::vec(-4i64..=4, vars), -6i64..=6),
            rows,
        )
        .prop_map(move |rs| LinearSystem {
            vars,
            constraints: rs
                .into_iter()
                .map(|(c, b)| Constraint {
                    coeffs: c.into_iter().map(int).collect(),
                    rhs: int(b),
                    origin: Origin::Raw,
                })
                .collect(),
            eta: int(0),
        })
    })
}

fn scaled(sys: &LinearSystem, factors: &[Rational]) -> LinearSystem {
    let mut out = sys.clone();
    for (c, k) in out.constraints.iter_mut().zip(factors) {
        c.coeffs.iter_mut().for_each(|x| *x *= k);
        c.rhs *= k;
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn every_solve_is_verified(sys in system()) {
        let out = solve_feasibility(&sys);
        prop_assert!(out.verify(&sys));
        if let Feasibility::Infeasible(c) = &out {
            prop_assert!(c.multipliers.iter().all(|y| y.is_integer()));
        }
    }

    #[test]
    fn positive_row_scaling_changes_nothing(
        sys in system(),
        raw in proptest::collection::vec((1i64..=9, 1i64..=9), 9),
    ) {
        let factors: Vec<Rational> = raw.iter().take(sys.constraints.len()).map(|&(n, d)| q(n, d)).collect();
        let other = scaled(&sys, &factors);
        let (a, b) = (solve_feasibility(&sys), solve_feasibility(&other));
        prop_assert_eq!(a.is_feasible(), b.is_feasible());
        if let Feasibility::Infeasible(c) = b {
            let back = FarkasCertificate {
                multipliers: c.multipliers.iter().zip(&factors).map(|(y, k)| y * k).collect(),
            };
            prop_assert!(back.verify(&sys));
            prop_assert!(back.normalized().verify(&sys));
        }
        if let Feasibility::Feasible(p) = a {
            prop_assert!(p.verify(&other));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn realized_means_exact_match(lines in simple_lines(3..=6), seed in any::<u64>(), shuffle in any::<bool>()) {
        let target = build_omatrix(&lines).unwrap().0;
        // A second matrix that is usually not realizable: swap one adjacent pair.
        let target = if shuffle {
            let mut rows = target.rows().to_vec();
            rows[1].swap(0, 1);
            match kobon_core::OMatrix::from_rows(rows) {
                Ok(m) => m,
                Err(_) => target,
            }
        } else {
            target
        };
        let config = GradientConfig { max_iterations: 2_000, ..Default::default() };
        let r = gradient_stretch(&target, &random_init(&target, seed), &config).unwrap();
        if r.status == StretchStatus::Realized {
            let (found, _) = build_omatrix(r.lines.as_ref().unwrap()).unwrap();
            prop_assert_eq!(found, target);
        } else {
            prop_assert!(r.lines.is_none());
        }
    }
}
