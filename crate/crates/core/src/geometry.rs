//! Exact checks of straight-line drawings, written without reference to how
//! the drawing was produced.

use std::cmp::Ordering;
use std::fmt;

use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::map::{Dart, PlanarMap};

pub type Point = (BigRational, BigRational);

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DrawingViolation {
    NotUpward { edge: usize },
    Crossing { a: usize, b: usize },
    Overlap { a: usize, b: usize },
    VertexOnEdge { vertex: usize, edge: usize },
    RotationMismatch { vertex: usize },
    CoincidentVertices { a: usize, b: usize },
    /// The west boundary is not drawn west of the east boundary.
    OuterOrientation,
}

impl fmt::Display for DrawingViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DrawingViolation::NotUpward { edge } => write!(f, "edge {edge} does not point upward"),
            DrawingViolation::Crossing { a, b } => write!(f, "edges {a} and {b} cross"),
            DrawingViolation::Overlap { a, b } => write!(f, "edges {a} and {b} overlap"),
            DrawingViolation::VertexOnEdge { vertex, edge } => write!(f, "v{vertex} lies on edge {edge}"),
            DrawingViolation::RotationMismatch { vertex } => {
                write!(f, "drawn edge order around v{vertex} differs from the map")
            }
            DrawingViolation::CoincidentVertices { a, b } => write!(f, "v{a} and v{b} coincide"),
            DrawingViolation::OuterOrientation => write!(f, "outer boundary is drawn mirrored"),
        }
    }
}

fn cross(o: &Point, a: &Point, b: &Point) -> BigRational {
    (&a.0 - &o.0) * (&b.1 - &o.1) - (&a.1 - &o.1) * (&b.0 - &o.0)
}

/// Sign of `cross(o, a, b)`, using only integer products of numerators and (positive) denominators.
fn cross_sign(o: &Point, a: &Point, b: &Point) -> i8 {
    let diff = |u: &BigRational, v: &BigRational| (u.numer() * v.denom() - v.numer() * u.denom(), u.denom() * v.denom());
    let (n1, d1) = diff(&a.0, &o.0);
    let (n2, d2) = diff(&b.1, &o.1);
    let (n3, d3) = diff(&a.1, &o.1);
    let (n4, d4) = diff(&b.0, &o.0);
    let lhs = n1 * n2 * &d3 * &d4;
    let rhs = n3 * n4 * d1 * d2;
    match lhs.cmp(&rhs) {
        Ordering::Greater => 1,
        Ordering::Less => -1,
        Ordering::Equal => 0,
    }
}

/// `p` on the closed segment `ab`, given that the three are collinear.
fn within(a: &Point, b: &Point, p: &Point) -> bool {
    let (lox, hix) = if a.0 <= b.0 { (&a.0, &b.0) } else { (&b.0, &a.0) };
    let (loy, hiy) = if a.1 <= b.1 { (&a.1, &b.1) } else { (&b.1, &a.1) };
    lox <= &p.0 && &p.0 <= hix && loy <= &p.1 && &p.1 <= hiy
}

/// Angular order of direction vectors, counterclockwise starting from the positive x-axis.
fn angle_cmp(u: &Point, v: &Point) -> Ordering {
    let half = |p: &Point| if p.1.is_negative() || (p.1.is_zero() && p.0.is_negative()) { 1 } else { 0 };
    half(u).cmp(&half(v)).then_with(|| {
        let c = &u.0 * &v.1 - &u.1 * &v.0;
        if c.is_positive() {
            Ordering::Less
        } else if c.is_negative() {
            Ordering::Greater
        } else {
            Ordering::Equal
        }
    })
}

/// Every violation of: edges point strictly upward, segments meet only at shared
/// endpoints, and the counterclockwise order of edges at each vertex is the map's rotation.
pub fn check_drawing(map: &PlanarMap, pts: &[Point]) -> Vec<DrawingViolation> {
    let mut out = Vec::new();
    let edges = map.edges();
    for (e, &[t, h]) in edges.iter().enumerate() {
        if pts[t].1 >= pts[h].1 {
            out.push(DrawingViolation::NotUpward { edge: e });
        }
    }
    for a in 0..pts.len() {
        for b in a + 1..pts.len() {
            if pts[a] == pts[b] {
                out.push(DrawingViolation::CoincidentVertices { a, b });
            }
        }
    }
    // closed bounding boxes; segments whose boxes are disjoint cannot meet
    let boxes: Vec<[&BigRational; 4]> = edges
        .iter()
        .map(|&[t, h]| {
            let (a, b) = (&pts[t], &pts[h]);
            let (x0, x1) = if a.0 <= b.0 { (&a.0, &b.0) } else { (&b.0, &a.0) };
            let (y0, y1) = if a.1 <= b.1 { (&a.1, &b.1) } else { (&b.1, &a.1) };
            [x0, x1, y0, y1]
        })
        .collect();
    let in_box = |bx: &[&BigRational; 4], p: &Point| bx[0] <= &p.0 && &p.0 <= bx[1] && bx[2] <= &p.1 && &p.1 <= bx[3];
    let boxes_meet = |a: &[&BigRational; 4], b: &[&BigRational; 4]| a[0] <= b[1] && b[0] <= a[1] && a[2] <= b[3] && b[2] <= a[3];
    for (e, &[t, h]) in edges.iter().enumerate() {
        for (v, p) in pts.iter().enumerate() {
            if v != t && v != h && in_box(&boxes[e], p) && cross_sign(&pts[t], &pts[h], p) == 0 && within(&pts[t], &pts[h], p) {
                out.push(DrawingViolation::VertexOnEdge { vertex: v, edge: e });
            }
        }
    }
    let mut by_low: Vec<usize> = (0..edges.len()).collect();
    by_low.sort_by(|&a, &b| boxes[a][2].cmp(boxes[b][2]));
    for (i, &ea) in by_low.iter().enumerate() {
        for &eb in &by_low[i + 1..] {
            if boxes[eb][2] > boxes[ea][3] {
                break;
            }
            if !boxes_meet(&boxes[ea], &boxes[eb]) {
                continue;
            }
            let (a, b) = (ea.min(eb), ea.max(eb));
            let ([p, q], [r, s]) = (edges[a], edges[b]);
            let shared = [p, q].iter().filter(|x| **x == r || **x == s).count();
            if shared == 2 {
                out.push(DrawingViolation::Overlap { a, b });
                continue;
            }
            if shared == 1 {
                let c = if p == r || p == s { p } else { q };
                let x = if p == c { q } else { p };
                let y = if r == c { s } else { r };
                let o = cross(&pts[c], &pts[x], &pts[y]);
                let dot = (&pts[x].0 - &pts[c].0) * (&pts[y].0 - &pts[c].0) + (&pts[x].1 - &pts[c].1) * (&pts[y].1 - &pts[c].1);
                if o.is_zero() && dot.is_positive() {
                    out.push(DrawingViolation::Overlap { a, b });
                }
                continue;
            }
            let d1 = cross_sign(&pts[p], &pts[q], &pts[r]);
            let d2 = cross_sign(&pts[p], &pts[q], &pts[s]);
            let d3 = cross_sign(&pts[r], &pts[s], &pts[p]);
            let d4 = cross_sign(&pts[r], &pts[s], &pts[q]);
            if d1 * d2 < 0 && d3 * d4 < 0 {
                out.push(DrawingViolation::Crossing { a, b });
            } else if (d1 == 0 && within(&pts[p], &pts[q], &pts[r]))
                || (d2 == 0 && within(&pts[p], &pts[q], &pts[s]))
                || (d3 == 0 && within(&pts[r], &pts[s], &pts[p]))
                || (d4 == 0 && within(&pts[r], &pts[s], &pts[q]))
            {
                out.push(DrawingViolation::Overlap { a, b });
            }
        }
    }
    if map.west_boundary() != map.east_boundary() {
        // up the west side, down the east side: clockwise, so negative area
        let mut ring: Vec<usize> = map.west_boundary().iter().map(|&e| map.tail(e)).collect();
        ring.extend(map.east_boundary().iter().rev().map(|&e| map.head(e)));
        let mut area = BigRational::zero();
        for i in 0..ring.len() {
            let (a, b) = (&pts[ring[i]], &pts[ring[(i + 1) % ring.len()]]);
            area += &a.0 * &b.1 - &b.0 * &a.1;
        }
        if !area.is_negative() {
            out.push(DrawingViolation::OuterOrientation);
        }
    }
    for v in 0..map.num_vertices() {
        let rot = map.rotation(v);
        if rot.len() < 3 {
            continue;
        }
        let dir = |d: &Dart| {
            let u = map.other_end(d.edge(), v);
            (&pts[u].0 - &pts[v].0, &pts[u].1 - &pts[v].1)
        };
        let mut drawn: Vec<Dart> = rot.to_vec();
        drawn.sort_by(|a, b| angle_cmp(&dir(a), &dir(b)));
        let k = drawn.iter().position(|d| *d == rot[0]).unwrap_or(0);
        if (0..rot.len()).any(|i| drawn[(k + i) % rot.len()] != rot[i]) {
            out.push(DrawingViolation::RotationMismatch { vertex: v });
        }
    }
    out
}
