mod common;

use std::collections::BTreeSet;

use common::{q, simple_lines};
use kobon_core::arrangement::{build_omatrix, check_simple, normalize};
use kobon_core::omatrix::{affine_upper_bound, enumerate_bounded_faces};
use kobon_core::{AffineLine, Rational};
use num_traits::Zero;
use proptest::prelude::*;

/// Image of `y = m·x + b` under `(x, y) ↦ (p·x + r·y + e, s·x + t·y + f)`;
/// `None` when the image is vertical.
fn map_line(l: &AffineLine, a: &[Rational; 6]) -> Option<AffineLine> {
    let [p, r, e, s, t, f] = a;
    let image = |x: Rational| {
        let y = l.y_at(&x);
        (p * &x + r * &y + e, s * &x + t * &y + f)
    };
    let (x0, y0) = image(Rational::zero());
    let (x1, y1) = image(Rational::from_integer(1.into()));
    if x0 == x1 {
        return None;
    }
    let m = (&y1 - &y0) / (&x1 - &x0);
    let b = &y0 - &m * &x0;
    Some(AffineLine::new(m, b))
}

fn map_all(lines: &[AffineLine], a: &[Rational; 6]) -> Option<Vec<AffineLine>> {
    lines.iter().map(|l| map_line(l, a)).collect()
}

fn coeff() -> impl Strategy<Value = Rational> {
    (-6i64..=6, 1i64..=4).prop_map(|(n, d)| q(n, d))
}

fn positive() -> impl Strategy<Value = Rational> {
    (1i64..=6, 1i64..=4).prop_map(|(n, d)| q(n, d))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn input_order_is_irrelevant(
        (lines, shuffled) in simple_lines(2..=8).prop_flat_map(|l| (Just(l.clone()), Just(l).prop_shuffle())),
    ) {
        prop_assert_eq!(build_omatrix(&lines).unwrap().0, build_omatrix(&shuffled).unwrap().0);
    }

    #[test]
    fn crossing_heights_are_symmetric(lines in simple_lines(3..=7), pick in 0usize..7) {
        let fam = normalize(&lines, pick % lines.len()).unwrap();
        for i in 0..fam.n() {
            for j in 0..fam.n() {
                if i != j {
                    prop_assert_eq!(fam.intersection_y(i, j).unwrap(), fam.intersection_y(j, i).unwrap());
                }
            }
        }
    }

    #[test]
    fn sweep_preserving_maps_keep_the_matrix(
        lines in simple_lines(2..=8),
        alpha in positive(), delta in positive(), beta in coeff(), gx in coeff(), gy in coeff(),
    ) {
        let a = [alpha, beta, gx, Rational::zero(), delta, gy];
        let Some(image) = map_all(&lines, &a) else { return Ok(()) };
        prop_assert_eq!(build_omatrix(&lines).unwrap().0, build_omatrix(&image).unwrap().0);
    }

    #[test]
    fn orientation_preserving_maps_keep_the_census(
        lines in simple_lines(3..=8),
        p in coeff(), r in coeff(), s in coeff(), t in coeff(), e in coeff(), f in coeff(),
    ) {
        prop_assume!(&p * &t - &r * &s > Rational::zero());
        let a = [p, r, e, s, t, f];
        let Some(image) = map_all(&lines, &a) else { return Ok(()) };
        prop_assert!(check_simple(&image).is_simple());
        let before = enumerate_bounded_faces(&build_omatrix(&lines).unwrap().0);
        let after = enumerate_bounded_faces(&build_omatrix(&image).unwrap().0);
        prop_assert_eq!(before.triangles, after.triangles);
        prop_assert_eq!(before.size_histogram(), after.size_histogram());
    }

    #[test]
    fn census_is_consistent(lines in simple_lines(2..=8)) {
        let m = build_omatrix(&lines).unwrap().0;
        let c = enumerate_bounded_faces(&m);
        prop_assert_eq!(c.touching.values().sum::<usize>(), 3 * c.triangles);
        prop_assert!(c.triangles as u64 <= affine_upper_bound(m.n() as u64).unwrap_or(u64::MAX));
        prop_assert_eq!(enumerate_bounded_faces(&m.reversed()).faces, c.faces.clone());

        let mut used = BTreeSet::new();
        for tri in c.triangles() {
            for (line, prev, next) in tri.edges() {
                let seg = m.position(line, prev).min(m.position(line, next));
                prop_assert!(used.insert((line, seg)), "segment {line}/{seg} bounds two triangles");
            }
        }
    }
}
