use std::collections::BTreeMap;

use serde::Serialize;

use super::OMatrix;

/// A bounded face, given by the cyclic sequence of lines along its boundary.
///
/// The boundary is stored canonically: the smallest label first, followed by
/// the smaller of its two neighbours.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct Face {
    boundary: Vec<usize>,
}

impl Face {
    pub fn canonical(mut cycle: Vec<usize>) -> Face {
        let k = cycle.len();
        if k == 0 {
            return Face { boundary: cycle };
        }
        let start = (0..k).min_by_key(|&i| cycle[i]).unwrap();
        cycle.rotate_left(start);
        if k > 2 && cycle[k - 1] < cycle[1] {
            cycle[1..].reverse();
        }
        Face { boundary: cycle }
    }

    pub fn boundary(&self) -> &[usize] {
        &self.boundary
    }

    pub fn size(&self) -> usize {
        self.boundary.len()
    }

    pub fn contains_line(&self, line: usize) -> bool {
        self.boundary.contains(&line)
    }

    /// Edges of the face as `(line, previous, next)` triples.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        let k = self.boundary.len();
        (0..k).map(move |s| {
            (
                self.boundary[s],
                self.boundary[(s + k - 1) % k],
                self.boundary[(s + 1) % k],
            )
        })
    }

    /// Checks that every consecutive pair of neighbours sits in adjacent
    /// positions of the row of the line between them.
    pub fn satisfies_adjacency(&self, m: &OMatrix) -> bool {
        let mut seen = self.boundary.clone();
        seen.sort_unstable();
        seen.dedup();
        if seen.len() != self.size() || self.size() < 3 {
            return false;
        }
        self.edges().all(|(l, p, q)| m.adjacent_in_row(l, p, q))
    }
}

/// A bounded segment of line `line`, between the crossings at `position` and
/// `position + 1` of its row.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Segment {
    pub line: usize,
    pub position: usize,
    pub labels: (usize, usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FaceCensus {
    pub n: usize,
    pub faces: Vec<Face>,
    pub triangles: usize,
    pub touching: BTreeMap<usize, usize>,
    pub unused_segments: Vec<Segment>,
    pub defects: Vec<Face>,
}

impl FaceCensus {
    pub fn size_histogram(&self) -> BTreeMap<usize, usize> {
        let mut out = BTreeMap::new();
        for f in &self.faces {
            *out.entry(f.size()).or_insert(0) += 1;
        }
        out
    }

    pub fn triangles(&self) -> impl Iterator<Item = &Face> {
        self.faces.iter().filter(|f| f.size() == 3)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DefectCensus {
    pub unused_segments: Vec<Segment>,
    pub defects: Vec<Face>,
}

#[derive(Clone, Copy, PartialEq, Eq)]
struct DirectedEdge {
    line: usize,
    segment: usize,
    forward: bool,
}

/// Follows the boundary of the face lying on one fixed side of `start`.
/// Returns the visited edges when the walk closes up without reaching a ray.
fn walk_face(m: &OMatrix, start: DirectedEdge) -> Option<Vec<DirectedEdge>> {
    let n = m.n();
    let mut edges = vec![start];
    let mut cur = start;
    loop {
        let row = m.row(cur.line);
        let (q, dir) = if cur.forward {
            (row[cur.segment + 1], 1i8)
        } else {
            (row[cur.segment], -1i8)
        };
        let t = m.position(q, cur.line);
        let turn = if q > cur.line { dir } else { -dir };
        let next = if turn > 0 {
            if t + 1 > n - 2 {
                return None;
            }
            DirectedEdge { line: q, segment: t, forward: true }
        } else {
            if t == 0 {
                return None;
            }
            DirectedEdge { line: q, segment: t - 1, forward: false }
        };
        if next == start {
            return Some(edges);
        }
        if edges.len() >= n {
            return None;
        }
        edges.push(next);
        cur = next;
    }
}

fn bounded_faces_with_edges(m: &OMatrix) -> Vec<(Face, Vec<(usize, usize)>)> {
    let n = m.n();
    if n < 3 {
        return Vec::new();
    }
    let segs = n - 2;
    let mut visited = vec![vec![[false; 2]; segs]; n];
    let mut out = Vec::new();
    for line in 0..n {
        for segment in 0..segs {
            for forward in [true, false] {
                if visited[line][segment][forward as usize] {
                    continue;
                }
                let start = DirectedEdge { line, segment, forward };
                let Some(edges) = walk_face(m, start) else { continue };
                for e in &edges {
                    visited[e.line][e.segment][e.forward as usize] = true;
                }
                let face = Face::canonical(edges.iter().map(|e| e.line).collect());
                if face.satisfies_adjacency(m) {
                    let mut segments: Vec<_> = edges.iter().map(|e| (e.line, e.segment)).collect();
                    segments.sort_unstable();
                    out.push((face, segments));
                }
            }
        }
    }
    out.sort_by(|a, b| (a.0.size(), &a.0).cmp(&(b.0.size(), &b.0)));
    out
}

/// All bounded faces of the arrangement, with triangle, touching and defect data.
pub fn enumerate_bounded_faces(m: &OMatrix) -> FaceCensus {
    let n = m.n();
    let faces = bounded_faces_with_edges(m);
    let mut on_triangle = vec![vec![false; n.saturating_sub(2)]; n];
    let mut touching: BTreeMap<usize, usize> = (0..n).map(|i| (i, 0)).collect();
    let mut triangles = 0;
    for (face, segments) in &faces {
        if face.size() != 3 {
            continue;
        }
        triangles += 1;
        for &(line, seg) in segments {
            on_triangle[line][seg] = true;
            *touching.get_mut(&line).unwrap() += 1;
        }
    }
    let mut unused_segments = Vec::new();
    for (line, used) in on_triangle.iter().enumerate() {
        for (position, &u) in used.iter().enumerate() {
            if !u {
                let row = m.row(line);
                unused_segments.push(Segment {
                    line,
                    position,
                    labels: (row[position], row[position + 1]),
                });
            }
        }
    }
    let defects = faces
        .iter()
        .filter(|(_, segs)| segs.iter().all(|&(l, s)| !on_triangle[l][s]))
        .map(|(f, _)| f.clone())
        .collect();
    FaceCensus {
        n,
        faces: faces.into_iter().map(|(f, _)| f).collect(),
        triangles,
        touching,
        unused_segments,
        defects,
    }
}

/// Number of triangles with a side on `line`.
pub fn touching_count(m: &OMatrix, line: usize) -> usize {
    enumerate_bounded_faces(m).touching[&line]
}

pub fn defect_census(m: &OMatrix) -> DefectCensus {
    let c = enumerate_bounded_faces(m);
    DefectCensus { unused_segments: c.unused_segments, defects: c.defects }
}

/// Unbounded faces cut out by exactly two rays meeting at a crossing.
pub fn wedge_count(m: &OMatrix) -> usize {
    let n = m.n();
    let first = |i: usize| m.row(i)[0];
    let last = |i: usize| m.row(i)[n - 2];
    let mut w = 0;
    for i in 0..n - 1 {
        if first(i) == i + 1 && first(i + 1) == i {
            w += 1;
        }
        if last(i) == i + 1 && last(i + 1) == i {
            w += 1;
        }
    }
    if first(n - 1) == 0 && last(0) == n - 1 {
        w += 1;
    }
    if first(0) == n - 1 && last(n - 1) == 0 {
        w += 1;
    }
    w
}

/// Triangles of the projective arrangement obtained by adding the line at infinity.
pub fn projective_triangle_count(m: &OMatrix) -> usize {
    enumerate_bounded_faces(m).triangles + wedge_count(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::omatrix::parse_omatrix;

    fn fig2() -> OMatrix {
        parse_omatrix("[[2,3,1],[2,3,0],[1,0,3],[1,0,2]]").unwrap()
    }

    #[test]
    fn canonical_rotation_and_reflection() {
        assert_eq!(Face::canonical(vec![3, 0, 2]).boundary(), &[0, 2, 3]);
        assert_eq!(Face::canonical(vec![5, 4, 1, 7]).boundary(), &[1, 4, 5, 7]);
        assert_eq!(Face::canonical(vec![1, 7, 5, 4]).boundary(), &[1, 4, 5, 7]);
    }

    #[test]
    fn four_lines_census() {
        let c = enumerate_bounded_faces(&fig2());
        let expected: Vec<Face> = [vec![0, 1, 3], vec![0, 2, 3], vec![0, 2, 1, 3]]
            .into_iter()
            .map(Face::canonical)
            .collect();
        assert_eq!(c.faces, expected);
        assert_eq!(c.triangles, 2);
        assert_eq!(touching_count(&fig2(), 0), 2);
        assert_eq!(touching_count(&fig2(), 1), 1);
        assert_eq!(touching_count(&fig2(), 2), 1);
        assert_eq!(c.unused_segments.len(), 8 - 6);
        assert!(c.defects.is_empty());
    }

    #[test]
    fn tiny_arrangements() {
        let two = parse_omatrix("[[1],[0]]").unwrap();
        assert!(enumerate_bounded_faces(&two).faces.is_empty());
        assert_eq!(wedge_count(&two), 4);
        assert_eq!(projective_triangle_count(&two), 4);
        let three = parse_omatrix("[[1,2],[0,2],[0,1]]").unwrap();
        let c = enumerate_bounded_faces(&three);
        assert_eq!(c.triangles, 1);
        assert!(c.unused_segments.is_empty());
    }
}
