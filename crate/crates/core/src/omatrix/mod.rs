//! The combinatorial layer: O-matrix model and text format, bounded faces,
//! triangle/touching/defect censuses and the triangle-count bounds.
//!
//! Row `i` of an O-matrix lists the labels of the lines crossing line `i`, in
//! the order the sweep meets those crossings.

mod bounds;
mod faces;

use std::fmt::Write as _;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

pub use bounds::{
    affine_upper_bound, projective_upper_bound, series_line_count, series_value, BoundError,
};
pub use faces::{
    defect_census, enumerate_bounded_faces, projective_triangle_count, touching_count,
    wedge_count, DefectCensus, Face, FaceCensus, Segment,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OMatrixError {
    #[error("malformed O-matrix text: {0}")]
    MalformedText(String),
    #[error("row {row} has length {found}, expected {expected}")]
    WrongRowLength { row: usize, found: usize, expected: usize },
    #[error("row {row} contains invalid label {label}")]
    InvalidLabel { row: usize, label: usize },
    #[error("label {label} appears in row {row}, but {row} is missing from row {label}")]
    InconsistentRows { row: usize, label: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct OMatrix {
    rows: Vec<Vec<usize>>,
    // positions[i][j] = index of label j in row i (unused on the diagonal).
    positions: Vec<Vec<usize>>,
}

impl OMatrix {
    pub fn from_rows(rows: Vec<Vec<usize>>) -> Result<Self, OMatrixError> {
        let n = rows.len();
        if n < 2 {
            return Err(OMatrixError::MalformedText(format!(
                "need at least 2 rows, found {n}"
            )));
        }
        let mut positions = vec![vec![usize::MAX; n]; n];
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n - 1 {
                return Err(OMatrixError::WrongRowLength {
                    row: i,
                    found: row.len(),
                    expected: n - 1,
                });
            }
            for (p, &label) in row.iter().enumerate() {
                if label >= n || label == i {
                    return Err(OMatrixError::InvalidLabel { row: i, label });
                }
                positions[i][label] = p;
            }
        }
        for (i, row) in rows.iter().enumerate() {
            for &label in row {
                if positions[label][i] == usize::MAX {
                    return Err(OMatrixError::InconsistentRows { row: i, label });
                }
            }
            // A repeated label leaves some other label unplaced; find the row
            // that references this line without a partner entry.
            for (j, &p) in positions[i].iter().enumerate() {
                if j != i && p == usize::MAX {
                    return Err(OMatrixError::InconsistentRows { row: j, label: i });
                }
            }
        }
        Ok(OMatrix { rows, positions })
    }

    /// Number of lines.
    pub fn n(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<usize>] {
        &self.rows
    }

    pub fn row(&self, line: usize) -> &[usize] {
        &self.rows[line]
    }

    /// Index of `label` in the row of `line`.
    pub fn position(&self, line: usize, label: usize) -> usize {
        assert_ne!(line, label, "a line does not cross itself");
        self.positions[line][label]
    }

    pub fn adjacent_in_row(&self, line: usize, a: usize, b: usize) -> bool {
        self.position(line, a).abs_diff(self.position(line, b)) == 1
    }

    /// Every row reversed: the same arrangement swept from the opposite side.
    pub fn reversed(&self) -> OMatrix {
        let rows = self
            .rows
            .iter()
            .map(|r| r.iter().rev().copied().collect())
            .collect();
        OMatrix::from_rows(rows).expect("reversal preserves validity")
    }

    /// Renames label `old` to `perm[old]`.
    pub fn relabeled(&self, perm: &[usize]) -> OMatrix {
        let n = self.n();
        let mut rows = vec![Vec::new(); n];
        for (old, row) in self.rows.iter().enumerate() {
            rows[perm[old]] = row.iter().map(|&l| perm[l]).collect();
        }
        OMatrix::from_rows(rows).expect("relabeling preserves validity")
    }
}

impl Serialize for OMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.rows.serialize(s)
    }
}

impl<'de> Deserialize<'de> for OMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let rows = Vec::<Vec<usize>>::deserialize(d)?;
        OMatrix::from_rows(rows).map_err(serde::de::Error::custom)
    }
}

/// Parses a bracketed list of bracketed integer lists.
pub fn parse_omatrix(text: &str) -> Result<OMatrix, OMatrixError> {
    let rows: Vec<Vec<usize>> =
        serde_json::from_str(text).map_err(|e| OMatrixError::MalformedText(e.to_string()))?;
    OMatrix::from_rows(rows)
}

/// One row per line, two-space indent, trailing newline.
pub fn serialize_omatrix(m: &OMatrix) -> String {
    let mut out = String::from("[\n");
    for (i, row) in m.rows.iter().enumerate() {
        let items: Vec<String> = row.iter().map(|l| l.to_string()).collect();
        let sep = if i + 1 == m.n() { "" } else { "," };
        let _ = writeln!(out, "  [{}]{}", items.join(", "), sep);
    }
    out.push_str("]\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accepts_small_matrices() {
        let m = parse_omatrix("[[1],[0]]").unwrap();
        assert_eq!(m.n(), 2);
        let t = parse_omatrix("[[1,2],[0,2],[1,0]]").unwrap();
        assert!(t.adjacent_in_row(2, 0, 1));
    }

    #[test]
    fn rejects_broken_rows() {
        assert!(matches!(parse_omatrix("[[1],[0"), Err(OMatrixError::MalformedText(_))));
        assert_eq!(
            parse_omatrix("[[1,2],[0],[1,0]]"),
            Err(OMatrixError::WrongRowLength { row: 1, found: 1, expected: 2 })
        );
        assert_eq!(
            parse_omatrix("[[1,1],[0,2],[1,0]]"),
            Err(OMatrixError::InconsistentRows { row: 2, label: 0 })
        );
        assert_eq!(
            parse_omatrix("[[1,0],[0,2],[1,0]]"),
            Err(OMatrixError::InvalidLabel { row: 0, label: 0 })
        );
        assert_eq!(
            parse_omatrix("[[1,5],[0,2],[1,0]]"),
            Err(OMatrixError::InvalidLabel { row: 0, label: 5 })
        );
        assert!(parse_omatrix("[[]]").is_err());
    }

    #[test]
    fn serialization_matches_bracketed_layout() {
        let m = parse_omatrix("[[2,3,1],[2,3,0],[1,0,3],[1,0,2]]").unwrap();
        assert_eq!(
            serialize_omatrix(&m),
            "[\n  [2, 3, 1],\n  [2, 3, 0],\n  [1, 0, 3],\n  [1, 0, 2]\n]\n"
        );
        assert_eq!(parse_omatrix(&serialize_omatrix(&m)).unwrap(), m);
    }

    #[test]
    fn relabel_and_reverse() {
        let m = parse_omatrix("[[2,3,1],[2,3,0],[1,0,3],[1,0,2]]").unwrap();
        assert_eq!(m.reversed().reversed(), m);
        let id: Vec<usize> = (0..4).collect();
        assert_eq!(m.relabeled(&id), m);
        let swapped = m.relabeled(&[1, 0, 2, 3]);
        assert_eq!(swapped.row(1), &[2, 3, 0]);
    }
}
