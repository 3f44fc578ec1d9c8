#![allow(dead_code)]

pub mod subdivision;

use std::path::PathBuf;

use kobon_core::arrangement::check_simple;
use kobon_core::{AffineLine, Rational};
use num_bigint::BigInt;
use proptest::prelude::*;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

pub fn q(p: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(d))
}

pub fn random_simple(rng: &mut ChaCha8Rng, n: usize) -> Vec<AffineLine> {
    loop {
        let lines: Vec<AffineLine> = (0..n)
            .map(|_| {
                let m = q(rng.gen_range(-40..=40), rng.gen_range(1..=7));
                let b = q(rng.gen_range(-60..=60), rng.gen_range(1..=5));
                AffineLine::new(m, b)
            })
            .collect();
        if check_simple(&lines).is_simple() {
            return lines;
        }
    }
}

pub fn simple_lines(sizes: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = Vec<AffineLine>> {
    let line = (-40i64..=40, 1i64..=7, -60i64..=60, 1i64..=5)
        .prop_map(|(mn, md, bn, bd)| AffineLine::new(q(mn, md), q(bn, bd)));
    sizes
        .prop_flat_map(move |n| proptest::collection::vec(line.clone(), n))
        .prop_filter("simple arrangement", |lines| check_simple(lines).is_simple())
}
