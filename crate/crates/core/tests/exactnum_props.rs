use std::collections::BTreeMap;

use kobon_core::exactnum::{enclose_tan, Decimal, interval_eval, parse_rational, pow2_neg, Bindings, Expr, Interval};
use kobon_core::Rational;
use num_bigint::BigInt;
use proptest::prelude::*;

const VARS: [&str; 3] = ["x", "y", "z"];

fn small_rational() -> impl Strategy<Value = Rational> {
    (-50i64..=50, 1i64..=12).prop_map(|(p, q)| Rational::new(BigInt::from(p), BigInt::from(q)))
}

fn expr() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        (0usize..3).prop_map(|i| Expr::var(VARS[i])),
        small_rational().prop_map(Expr::constant),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|e| -e),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a + b),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a - b),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a * b),
            (inner.clone(), inner).prop_map(|(a, b)| a / b),
        ]
    })
}

/// A box per variable plus a point inside it, given by fractions `t ∈ [0, 1]`.
fn box_and_point() -> impl Strategy<Value = (Bindings, BTreeMap<String, Rational>)> {
    proptest::collection::vec((small_rational(), 0i64..=20, 0i64..=16), 3).prop_map(|specs| {
        let mut b = Bindings::new();
        let mut p = BTreeMap::new();
        for (name, (lo, w, t)) in VARS.iter().zip(specs) {
            let width = Rational::new(BigInt::from(w), BigInt::from(8));
            let frac = Rational::new(BigInt::from(t), BigInt::from(16));
            p.insert(name.to_string(), &lo + &width * frac);
            b.insert(name.to_string(), Interval::new(lo.clone(), lo + width));
        }
        (b, p)
    })
}

fn widen(b: &Bindings, by: &Rational) -> Bindings {
    b.iter()
        .map(|(k, iv)| (k.clone(), Interval::new(iv.lo() - by, iv.hi() + by)))
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100_000))]

    #[test]
    fn enclosure_contains_point_value(e in expr(), (b, p) in box_and_point()) {
        let Ok(iv) = interval_eval(&e, &b) else { return Ok(()) };
        let v = e.eval_point(&p).expect("denominator interval excludes zero");
        prop_assert!(iv.contains(&v), "{v} outside {iv:?}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2_000))]

    #[test]
    fn evaluation_is_inclusion_monotone(e in expr(), (b, _) in box_and_point(), pad in 0i64..=8) {
        let wide = widen(&b, &Rational::new(BigInt::from(pad), BigInt::from(16)));
        let Ok(outer) = interval_eval(&e, &wide) else { return Ok(()) };
        let inner = interval_eval(&e, &b).expect("subset of a box that evaluates");
        prop_assert!(inner.is_subset_of(&outer));
    }

}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn tan_enclosures_nest(n in 3i64..=60, k_seed in 0i64..1000, bits in 4u32..=90) {
        let k = 1 + k_seed % ((n - 1) / 2);
        let coarse = enclose_tan(k, n, &pow2_neg(bits)).unwrap();
        let fine = enclose_tan(k, n, &pow2_neg(bits + 1)).unwrap();
        prop_assert!(fine.is_subset_of(&coarse));
        prop_assert!(fine.width() <= pow2_neg(bits + 1));
    }
}

proptest! {

    #[test]
    fn decimal_literals_round_trip(int_part in -99i64..=99, frac in 0u64..=999_999_999_999_999, digits in 1usize..=15) {
        let text = format!("{int_part}.{}", &format!("{frac:015}")[..digits]);
        let d = Decimal::parse(&text).unwrap();
        prop_assert_eq!(d.scale as usize, digits);
        prop_assert_eq!(d.to_string(), text.clone());
        prop_assert_eq!(d.to_rational(), parse_rational(&text).unwrap());
    }
}

#[test]
fn table_literal_keeps_its_digits() {
    let r = parse_rational("-0.578845642445838").unwrap();
    assert_eq!(r, Rational::new(BigInt::from(-578845642445838i64), BigInt::from(10u64.pow(15))));
    assert_eq!(Decimal::parse("-0.578845642445838").unwrap().to_string(), "-0.578845642445838");
}
