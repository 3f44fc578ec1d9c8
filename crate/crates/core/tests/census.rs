mod common;

use kobon_core::arrangement::{build_omatrix, check_simple, read_lines_csv};
use kobon_core::omatrix::{
    affine_upper_bound, enumerate_bounded_faces, parse_omatrix, projective_triangle_count,
    projective_upper_bound, serialize_omatrix, touching_count, wedge_count,
};

use common::fixture;

#[test]
fn seed_matrix_round_trips_byte_for_byte() {
    let text = std::fs::read_to_string(fixture("seed19.omatrix")).unwrap();
    let m = parse_omatrix(&text).unwrap();
    assert_eq!(m.n(), 19);
    assert_eq!(&m.row(0)[..4], &[1, 11, 3, 7]);
    assert_eq!(serialize_omatrix(&m), text);
}

#[test]
fn seed_matrix_census() {
    let m = parse_omatrix(&std::fs::read_to_string(fixture("seed19.omatrix")).unwrap()).unwrap();
    let c = enumerate_bounded_faces(&m);
    assert_eq!(c.triangles, 107);
    assert_eq!(c.triangles as u64, affine_upper_bound(19).unwrap());
    assert_eq!(touching_count(&m, 0), 17);
    assert_eq!(c.unused_segments.len(), 2);
    assert!(c.defects.is_empty());
    let total: usize = c.touching.values().sum();
    assert_eq!(total, 3 * c.triangles);
    let reversed = enumerate_bounded_faces(&m.reversed());
    assert_eq!(reversed.faces, c.faces);
}

fn table(name: &str) -> kobon_core::OMatrix {
    let f = std::fs::File::open(fixture(name)).unwrap();
    let lines = read_lines_csv(f).unwrap();
    assert!(check_simple(&lines).is_simple());
    build_omatrix(&lines).unwrap().0
}

#[test]
fn published_tables_reach_their_counts() {
    for (name, n, tri) in [("table1_41.csv", 41, 533), ("table2_45.csv", 45, 645), ("table3_49.csv", 49, 766)] {
        let m = table(name);
        assert_eq!(m.n(), n);
        let c = enumerate_bounded_faces(&m);
        assert_eq!(c.triangles, tri, "{name}");
        println!("{name}: wedges {}", wedge_count(&m));
    }
    let m = table("table3_49.csv");
    assert_eq!(projective_triangle_count(&m), 815);
    assert_eq!(projective_upper_bound(50).unwrap(), 815);
}
