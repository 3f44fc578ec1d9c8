//! Exact planar subdivision of a simple line arrangement, built directly from
//! coordinates. Used as an independent reference for face enumeration and
//! wedge counting.

use std::cmp::Ordering;
use std::collections::HashMap;

use kobon_core::omatrix::Face;
use kobon_core::{AffineLine, Rational};
use num_traits::{Signed, Zero};

type Point = (Rational, Rational);

struct Out {
    line: usize,
    dir: (Rational, Rational),
    target: Option<usize>,
}

pub struct Subdivision {
    vertices: Vec<Point>,
    // Outgoing half-edges per vertex, sorted counterclockwise.
    outs: Vec<Vec<Out>>,
}

fn half(d: &(Rational, Rational)) -> u8 {
    if d.1.is_positive() || (d.1.is_zero() && d.0.is_positive()) {
        0
    } else {
        1
    }
}

fn ccw_cmp(a: &(Rational, Rational), b: &(Rational, Rational)) -> Ordering {
    half(a).cmp(&half(b)).then_with(|| {
        let cross = &a.0 * &b.1 - &a.1 * &b.0;
        if cross.is_positive() {
            Ordering::Less
        } else if cross.is_negative() {
            Ordering::Greater
        } else {
            Ordering::Equal
        }
    })
}

impl Subdivision {
    pub fn new(lines: &[AffineLine]) -> Self {
        let n = lines.len();
        let mut vertices: Vec<Point> = Vec::new();
        let mut index: HashMap<Point, usize> = HashMap::new();
        let mut on_line: Vec<Vec<usize>> = vec![Vec::new(); n];
        for i in 0..n {
            for j in i + 1..n {
                let p = lines[i].crossing(&lines[j]).expect("simple arrangement");
                let v = *index.entry(p.clone()).or_insert_with(|| {
                    vertices.push(p);
                    vertices.len() - 1
                });
                on_line[i].push(v);
                on_line[j].push(v);
            }
        }
        let mut outs: Vec<Vec<Out>> = (0..vertices.len()).map(|_| Vec::new()).collect();
        let one = Rational::from_integer(1.into());
        for (l, vs) in on_line.iter_mut().enumerate() {
            vs.sort_by(|&a, &b| vertices[a].0.cmp(&vertices[b].0));
            let fwd = (one.clone(), lines[l].m.clone());
            let bwd = (-one.clone(), -lines[l].m.clone());
            for (k, &v) in vs.iter().enumerate() {
                outs[v].push(Out { line: l, dir: fwd.clone(), target: vs.get(k + 1).copied() });
                let prev = if k == 0 { None } else { Some(vs[k - 1]) };
                outs[v].push(Out { line: l, dir: bwd.clone(), target: prev });
            }
        }
        for o in &mut outs {
            o.sort_by(|a, b| ccw_cmp(&a.dir, &b.dir));
        }
        Subdivision { vertices, outs }
    }

    fn twin(&self, v: usize, k: usize) -> Option<(usize, usize)> {
        let w = self.outs[v][k].target?;
        let line = self.outs[v][k].line;
        let back = self.outs[w]
            .iter()
            .position(|o| o.line == line && o.target == Some(v))
            .expect("twin exists");
        Some((w, back))
    }

    /// Next half-edge around the face on the left: at the head, the outgoing
    /// edge immediately clockwise from the reversed edge.
    fn next(&self, v: usize, k: usize) -> Option<(usize, usize)> {
        let (w, back) = self.twin(v, k)?;
        let deg = self.outs[w].len();
        Some((w, (back + deg - 1) % deg))
    }

    pub fn bounded_faces(&self) -> Vec<Face> {
        let mut seen: Vec<Vec<bool>> = self.outs.iter().map(|o| vec![false; o.len()]).collect();
        let mut faces = Vec::new();
        for v in 0..self.vertices.len() {
            for k in 0..self.outs[v].len() {
                if seen[v][k] {
                    continue;
                }
                let mut cycle = Vec::new();
                let mut cur = (v, k);
                let mut bounded = true;
                loop {
                    seen[cur.0][cur.1] = true;
                    cycle.push(self.outs[cur.0][cur.1].line);
                    match self.next(cur.0, cur.1) {
                        None => {
                            bounded = false;
                            break;
                        }
                        Some(nx) if nx == (v, k) => break,
                        Some(nx) => cur = nx,
                    }
                }
                if bounded {
                    faces.push(Face::canonical(cycle));
                }
            }
        }
        faces.sort_by(|a, b| (a.size(), a).cmp(&(b.size(), b)));
        faces
    }

    /// Unbounded faces whose boundary is two rays leaving a single vertex.
    pub fn wedges(&self) -> usize {
        let mut count = 0;
        for v in 0..self.vertices.len() {
            let deg = self.outs[v].len();
            for k in 0..deg {
                if self.outs[v][k].target.is_some() {
                    continue;
                }
                // The ray arriving along this line from infinity turns onto
                // the edge clockwise from it.
                let nk = (k + deg - 1) % deg;
                if self.outs[v][nk].target.is_none() {
                    count += 1;
                }
            }
        }
        count
    }
}
