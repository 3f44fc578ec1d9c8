mod common;

use common::{q, random_simple};
use common::subdivision::Subdivision;
use kobon_core::arrangement::build_omatrix;
use kobon_core::omatrix::{enumerate_bounded_faces, parse_omatrix, wedge_count};
use kobon_core::AffineLine;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn faces_and_wedges_match_subdivision() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut trials = 0;
    for t in 0..240 {
        let n = if t < 200 { rng.gen_range(4..=8) } else { rng.gen_range(2..=3) };
        let lines = random_simple(&mut rng, n);
        let (m, labeling) = build_omatrix(&lines).unwrap();
        let order = labeling.order();
        let relabeled: Vec<AffineLine> = order.iter().map(|&k| lines[k].clone()).collect();
        let sub = Subdivision::new(&relabeled);
        let census = enumerate_bounded_faces(&m);
        assert_eq!(census.faces, sub.bounded_faces(), "lines {:?}", relabeled);
        assert_eq!(wedge_count(&m), sub.wedges(), "lines {:?}", relabeled);
        if n >= 4 {
            trials += 1;
        }
    }
    assert!(trials >= 200);
}

#[test]
fn four_lines_coordinates() {
    // Four lines through (x0, 5/2) and (x1, 0).
    let through = |x0: i64, x1: i64| {
        let (x0, x1) = (q(x0, 100), q(x1, 100));
        let (y0, y1) = (q(250, 100), q(0, 1));
        let m = (&y1 - &y0) / (&x1 - &x0);
        let b = &y0 - &m * &x0;
        AffineLine::new(m, b)
    };
    let lines = vec![through(-80, 160), through(10, 140), through(35, -45), through(115, -60)];
    let (m, labeling) = build_omatrix(&lines).unwrap();
    assert_eq!(labeling.labels, vec![0, 1, 2, 3]);
    assert_eq!(m, parse_omatrix("[[2,3,1],[2,3,0],[1,0,3],[1,0,2]]").unwrap());
    let sub = Subdivision::new(&lines);
    assert_eq!(enumerate_bounded_faces(&m).faces, sub.bounded_faces());
    assert_eq!(sub.bounded_faces().len(), 3);
}

#[test]
fn two_lines_have_four_wedges() {
    let lines = vec![AffineLine::new(q(1, 1), q(0, 1)), AffineLine::new(q(-1, 1), q(0, 1))];
    assert_eq!(Subdivision::new(&lines).wedges(), 4);
    let (m, _) = build_omatrix(&lines).unwrap();
    assert_eq!(wedge_count(&m), 4);
}
