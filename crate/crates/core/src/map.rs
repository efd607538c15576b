//! Planar maps carrying a bipolar orientation.
//!
//! A map is stored as a rotation system: every edge owns two darts, one
//! sitting at its tail and one at its head, and each vertex lists its darts
//! in counterclockwise order. Edges are stored tail→head in the north-going
//! direction. The outer face is pinned by the explicit west and east boundary
//! paths, both listed from the south pole to the north pole.
//!
//! Faces are derived on demand from the rotation system: the face to the
//! left of a dart `d` continues with `prev_ccw(twin(d))`, which walks every
//! face counterclockwise. Under that convention the west side of an interior
//! face is traversed southward and its east side northward.

use std::collections::VecDeque;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type VertexId = usize;
pub type EdgeId = usize;

/// A half-edge. `2e` sits at the tail of edge `e`, `2e + 1` at its head.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Dart(pub usize);

impl Dart {
    pub fn at_tail(edge: EdgeId) -> Dart {
        Dart(2 * edge)
    }

    pub fn at_head(edge: EdgeId) -> Dart {
        Dart(2 * edge + 1)
    }

    pub fn edge(self) -> EdgeId {
        self.0 / 2
    }

    /// True when the dart leaves its origin along the north-going direction.
    pub fn is_outgoing(self) -> bool {
        self.0 % 2 == 0
    }

    pub fn twin(self) -> Dart {
        Dart(self.0 ^ 1)
    }
}

/// Face type `(i, j)`: `i + 1` edges on the west side, `j + 1` on the east.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FaceType {
    pub west_count: usize,
    pub east_count: usize,
}

impl FaceType {
    pub fn degree(&self) -> usize {
        self.west_count + self.east_count + 2
    }
}

/// An interior face split at its extreme vertices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Face {
    /// Counterclockwise dart cycle starting at the bottom east edge.
    pub darts: Vec<Dart>,
    /// West-side edges, bottom to top.
    pub west: Vec<EdgeId>,
    /// East-side edges, bottom to top.
    pub east: Vec<EdgeId>,
    pub bottom: VertexId,
    pub top: VertexId,
}

impl Face {
    pub fn face_type(&self) -> FaceType {
        FaceType {
            west_count: self.west.len() - 1,
            east_count: self.east.len() - 1,
        }
    }
}

/// A spanning tree given as one parent edge per non-root vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrientedTree {
    pub root: VertexId,
    pub parent: Vec<Option<EdgeId>>,
}

impl OrientedTree {
    /// Number of tree edges between `v` and the root.
    pub fn depths(&self, map: &PlanarMap) -> Vec<usize> {
        let n = self.parent.len();
        let mut depth = vec![usize::MAX; n];
        depth[self.root] = 0;
        for start in 0..n {
            let mut path = Vec::new();
            let mut v = start;
            while depth[v] == usize::MAX {
                path.push(v);
                let e = self.parent[v].expect("non-root vertex without parent");
                v = map.other_end(e, v);
            }
            let mut d = depth[v];
            for &u in path.iter().rev() {
                d += 1;
                depth[u] = d;
            }
        }
        depth
    }

    pub fn edges(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.parent.iter().filter_map(|p| *p)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    NoEdges,
    Disconnected,
    Euler { vertices: usize, edges: usize, faces: usize },
    Cycle { vertex: VertexId },
    InteriorSource { vertex: VertexId },
    InteriorSink { vertex: VertexId },
    SouthHasIncoming,
    NorthHasOutgoing,
    RotationNotBipolar { vertex: VertexId },
    FaceNotBipolar { face: usize },
    BoundaryNotPath { side: &'static str },
    OuterFaceMismatch,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NoEdges => write!(f, "map has no edges"),
            Violation::Disconnected => write!(f, "map is disconnected"),
            Violation::Euler { vertices, edges, faces } => {
                write!(f, "Euler relation fails: V={vertices} E={edges} F={faces}")
            }
            Violation::Cycle { vertex } => write!(f, "directed cycle through v{vertex}"),
            Violation::InteriorSource { vertex } => write!(f, "interior source at v{vertex}"),
            Violation::InteriorSink { vertex } => write!(f, "interior sink at v{vertex}"),
            Violation::SouthHasIncoming => write!(f, "south pole has an incoming edge"),
            Violation::NorthHasOutgoing => write!(f, "north pole has an outgoing edge"),
            Violation::RotationNotBipolar { vertex } => {
                write!(f, "edges around v{vertex} are not one outgoing block and one incoming block")
            }
            Violation::FaceNotBipolar { face } => {
                write!(f, "face {face} is not one clockwise block and one counterclockwise block")
            }
            Violation::BoundaryNotPath { side } => {
                write!(f, "{side} boundary is not a directed path from south to north")
            }
            Violation::OuterFaceMismatch => {
                write!(f, "west and east boundaries do not bound a face")
            }
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "valid");
        }
        let parts: Vec<String> = self.violations.iter().map(|v| v.to_string()).collect();
        write!(f, "{}", parts.join("; "))
    }
}

/// Per-vertex incident edges, each list ordered west to east.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Incidence {
    pub out: Vec<Vec<EdgeId>>,
    pub inc: Vec<Vec<EdgeId>>,
}

/// Rotation-system planar map with north-going edges and two poles.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlanarMap {
    edges: Vec<[VertexId; 2]>,
    rotations: Vec<Vec<Dart>>,
    south: VertexId,
    north: VertexId,
    west: Vec<EdgeId>,
    east: Vec<EdgeId>,
    // (origin vertex, index in its rotation) for every dart
    slot: Vec<(VertexId, usize)>,
}

impl PlanarMap {
    /// Builds a map after checking that twin and rotation tables agree.
    /// Orientation properties are *not* checked here, see [`PlanarMap::validate_bipolar`].
    pub fn new(
        edges: Vec<[VertexId; 2]>,
        rotations: Vec<Vec<Dart>>,
        south: VertexId,
        north: VertexId,
        west: Vec<EdgeId>,
        east: Vec<EdgeId>,
    ) -> Result<PlanarMap> {
        let nv = rotations.len();
        if south >= nv || north >= nv {
            return Err(Error::Structural("pole out of range".into()));
        }
        let mut slot = vec![(usize::MAX, usize::MAX); 2 * edges.len()];
        for (e, &[t, h]) in edges.iter().enumerate() {
            if t >= nv || h >= nv {
                return Err(Error::Structural(format!("edge {e} has an endpoint out of range")));
            }
            if t == h {
                return Err(Error::Structural(format!("edge {e} is a self-loop")));
            }
        }
        for (v, rot) in rotations.iter().enumerate() {
            for (i, &d) in rot.iter().enumerate() {
                let e = d.edge();
                if e >= edges.len() {
                    return Err(Error::Structural(format!("v{v} lists unknown edge {e}")));
                }
                let origin = if d.is_outgoing() { edges[e][0] } else { edges[e][1] };
                if origin != v {
                    return Err(Error::Structural(format!(
                        "dart of edge {e} listed at v{v} but belongs to v{origin}"
                    )));
                }
                if slot[d.0].0 != usize::MAX {
                    return Err(Error::Structural(format!("dart of edge {e} listed twice")));
                }
                slot[d.0] = (v, i);
            }
        }
        if let Some(d) = slot.iter().position(|s| s.0 == usize::MAX) {
            return Err(Error::Structural(format!("edge {} missing from a rotation", d / 2)));
        }
        for (side, list) in [("west", &west), ("east", &east)] {
            if list.is_empty() || list.iter().any(|&e| e >= edges.len()) {
                return Err(Error::Structural(format!("{side} boundary is empty or out of range")));
            }
        }
        Ok(PlanarMap { edges, rotations, south, north, west, east, slot })
    }

    /// Builds a map from west-to-east ordered outgoing and incoming edge lists.
    pub fn from_incidence(
        edges: Vec<[VertexId; 2]>,
        incidence: &Incidence,
        south: VertexId,
        north: VertexId,
        west: Vec<EdgeId>,
        east: Vec<EdgeId>,
    ) -> Result<PlanarMap> {
        let rotations = incidence
            .out
            .iter()
            .zip(&incidence.inc)
            .map(|(out, inc)| {
                out.iter()
                    .rev()
                    .map(|&e| Dart::at_tail(e))
                    .chain(inc.iter().map(|&e| Dart::at_head(e)))
                    .collect()
            })
            .collect();
        PlanarMap::new(edges, rotations, south, north, west, east)
    }

    /// The one-edge map S→N.
    pub fn single_edge() -> PlanarMap {
        PlanarMap::new(
            vec![[0, 1]],
            vec![vec![Dart::at_tail(0)], vec![Dart::at_head(0)]],
            0,
            1,
            vec![0],
            vec![0],
        )
        .expect("single edge map is well formed")
    }

    pub fn num_vertices(&self) -> usize {
        self.rotations.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[[VertexId; 2]] {
        &self.edges
    }

    pub fn edge(&self, e: EdgeId) -> [VertexId; 2] {
        self.edges[e]
    }

    pub fn tail(&self, e: EdgeId) -> VertexId {
        self.edges[e][0]
    }

    pub fn head(&self, e: EdgeId) -> VertexId {
        self.edges[e][1]
    }

    pub fn other_end(&self, e: EdgeId, v: VertexId) -> VertexId {
        let [t, h] = self.edges[e];
        if t == v {
            h
        } else {
            t
        }
    }

    pub fn rotation(&self, v: VertexId) -> &[Dart] {
        &self.rotations[v]
    }

    pub fn rotations(&self) -> &[Vec<Dart>] {
        &self.rotations
    }

    pub fn south(&self) -> VertexId {
        self.south
    }

    pub fn north(&self) -> VertexId {
        self.north
    }

    /// West boundary edges from south to north.
    pub fn west_boundary(&self) -> &[EdgeId] {
        &self.west
    }

    /// East boundary edges from south to north.
    pub fn east_boundary(&self) -> &[EdgeId] {
        &self.east
    }

    pub fn origin(&self, d: Dart) -> VertexId {
        self.slot[d.0].0
    }

    pub fn next_ccw(&self, d: Dart) -> Dart {
        let (v, i) = self.slot[d.0];
        let rot = &self.rotations[v];
        rot[(i + 1) % rot.len()]
    }

    pub fn prev_ccw(&self, d: Dart) -> Dart {
        let (v, i) = self.slot[d.0];
        let rot = &self.rotations[v];
        rot[(i + rot.len() - 1) % rot.len()]
    }

    /// Next dart along the face to the left of `d`.
    pub fn face_next(&self, d: Dart) -> Dart {
        self.prev_ccw(d.twin())
    }

    /// All face cycles, in order of their smallest dart.
    pub fn face_cycles(&self) -> Vec<Vec<Dart>> {
        let mut seen = vec![false; self.slot.len()];
        let mut faces = Vec::new();
        for start in 0..self.slot.len() {
            if seen[start] {
                continue;
            }
            let mut cycle = Vec::new();
            let mut d = Dart(start);
            while !seen[d.0] {
                seen[d.0] = true;
                cycle.push(d);
                d = self.face_next(d);
            }
            faces.push(cycle);
        }
        faces
    }

    fn outer_dart(&self) -> Dart {
        Dart::at_tail(self.west[0])
    }

    pub fn out_degree(&self, v: VertexId) -> usize {
        self.rotations[v].iter().filter(|d| d.is_outgoing()).count()
    }

    pub fn in_degree(&self, v: VertexId) -> usize {
        self.rotations[v].len() - self.out_degree(v)
    }

    /// Lists every violated bipolar-map invariant.
    pub fn validate_bipolar(&self) -> ValidationReport {
        let mut violations = Vec::new();
        let nv = self.num_vertices();
        let ne = self.num_edges();
        if ne == 0 {
            return ValidationReport { violations: vec![Violation::NoEdges] };
        }

        // connectivity
        let mut seen = vec![false; nv];
        let mut queue = VecDeque::from([self.south]);
        seen[self.south] = true;
        while let Some(v) = queue.pop_front() {
            for d in &self.rotations[v] {
                let u = self.other_end(d.edge(), v);
                if !seen[u] {
                    seen[u] = true;
                    queue.push_back(u);
                }
            }
        }
        if seen.iter().any(|s| !s) {
            violations.push(Violation::Disconnected);
        }

        let cycles = self.face_cycles();
        if nv + cycles.len() != ne + 2 {
            violations.push(Violation::Euler { vertices: nv, edges: ne, faces: cycles.len() });
        }

        // acyclicity via Kahn
        let mut indeg: Vec<usize> = (0..nv).map(|v| self.in_degree(v)).collect();
        let mut stack: Vec<VertexId> = (0..nv).filter(|&v| indeg[v] == 0).collect();
        let mut removed = 0;
        while let Some(v) = stack.pop() {
            removed += 1;
            for d in self.rotations[v].iter().filter(|d| d.is_outgoing()) {
                let h = self.head(d.edge());
                indeg[h] -= 1;
                if indeg[h] == 0 {
                    stack.push(h);
                }
            }
        }
        if removed < nv {
            let vertex = (0..nv).find(|&v| indeg[v] > 0).unwrap_or(0);
            violations.push(Violation::Cycle { vertex });
        }

        if self.in_degree(self.south) > 0 {
            violations.push(Violation::SouthHasIncoming);
        }
        if self.out_degree(self.north) > 0 {
            violations.push(Violation::NorthHasOutgoing);
        }
        for v in 0..nv {
            if v == self.south || v == self.north {
                continue;
            }
            if self.in_degree(v) == 0 {
                violations.push(Violation::InteriorSource { vertex: v });
            } else if self.out_degree(v) == 0 {
                violations.push(Violation::InteriorSink { vertex: v });
            } else if direction_changes(self.rotations[v].iter().map(|d| d.is_outgoing())) != 2 {
                violations.push(Violation::RotationNotBipolar { vertex: v });
            }
        }

        for (side, list) in [("west", &self.west), ("east", &self.east)] {
            let mut ok = self.tail(list[0]) == self.south && self.head(*list.last().unwrap()) == self.north;
            ok &= list.windows(2).all(|w| self.head(w[0]) == self.tail(w[1]));
            if !ok {
                violations.push(Violation::BoundaryNotPath { side });
            }
        }
        let expected: Vec<Dart> = self
            .west
            .iter()
            .map(|&e| Dart::at_tail(e))
            .chain(self.east.iter().rev().map(|&e| Dart::at_head(e)))
            .collect();
        let outer = cycles.iter().position(|c| c.contains(&self.outer_dart()));
        match outer {
            Some(k) if cyclic_eq(&cycles[k], &expected) => {
                for (f, cycle) in cycles.iter().enumerate() {
                    if f != k && direction_changes(cycle.iter().map(|d| d.is_outgoing())) != 2 {
                        violations.push(Violation::FaceNotBipolar { face: f });
                    }
                }
            }
            _ => violations.push(Violation::OuterFaceMismatch),
        }

        ValidationReport { violations }
    }

    pub fn ensure_valid(&self) -> Result<()> {
        let report = self.validate_bipolar();
        if report.is_valid() {
            Ok(())
        } else {
            Err(Error::Invalid(report))
        }
    }

    /// West-to-east incident edge lists. Requires a valid map.
    pub fn incidence(&self) -> Incidence {
        let nv = self.num_vertices();
        let mut out = vec![Vec::new(); nv];
        let mut inc = vec![Vec::new(); nv];
        for v in 0..nv {
            let rot = &self.rotations[v];
            let k = rot.len();
            let start = if v == self.south {
                // counterclockwise from the east-most outgoing edge
                self.slot[Dart::at_tail(self.east[0]).0].1
            } else if v == self.north {
                self.slot[Dart::at_head(*self.west.last().unwrap()).0].1
            } else {
                (0..k)
                    .find(|&i| rot[i].is_outgoing() && !rot[(i + k - 1) % k].is_outgoing())
                    .unwrap_or(0)
            };
            for step in 0..k {
                let d = rot[(start + step) % k];
                if d.is_outgoing() {
                    out[v].push(d.edge());
                } else {
                    inc[v].push(d.edge());
                }
            }
            out[v].reverse();
        }
        Incidence { out, inc }
    }

    /// Interior faces, in order of their smallest dart.
    pub fn interior_faces(&self) -> Vec<Face> {
        let outer = self.outer_dart();
        self.face_cycles()
            .into_iter()
            .filter(|c| !c.contains(&outer))
            .map(|c| self.split_face(c))
            .collect()
    }

    fn split_face(&self, cycle: Vec<Dart>) -> Face {
        let k = cycle.len();
        let start = (0..k)
            .find(|&i| cycle[i].is_outgoing() && !cycle[(i + k - 1) % k].is_outgoing())
            .unwrap_or(0);
        let darts: Vec<Dart> = (0..k).map(|s| cycle[(start + s) % k]).collect();
        let east: Vec<EdgeId> = darts.iter().take_while(|d| d.is_outgoing()).map(|d| d.edge()).collect();
        let mut west: Vec<EdgeId> = darts[east.len()..].iter().map(|d| d.edge()).collect();
        west.reverse();
        let bottom = self.tail(east[0]);
        let top = self.head(*east.last().unwrap());
        Face { darts, west, east, bottom, top }
    }

    pub fn face_types(&self) -> Result<Vec<FaceType>> {
        self.ensure_valid()?;
        Ok(self.interior_faces().iter().map(Face::face_type).collect())
    }

    /// Each non-north vertex points to its west-most north-going edge.
    pub fn nw_tree(&self) -> Result<OrientedTree> {
        self.ensure_valid()?;
        let inc = self.incidence();
        let parent = (0..self.num_vertices())
            .map(|v| if v == self.north { None } else { inc.out[v].first().copied() })
            .collect();
        Ok(OrientedTree { root: self.north, parent })
    }

    /// Each non-south vertex points to its east-most south-going edge.
    pub fn se_tree(&self) -> Result<OrientedTree> {
        self.ensure_valid()?;
        let inc = self.incidence();
        let parent = (0..self.num_vertices())
            .map(|v| if v == self.south { None } else { inc.inc[v].last().copied() })
            .collect();
        Ok(OrientedTree { root: self.south, parent })
    }

    /// Dual map. Interior faces become vertices `0..F` (in [`PlanarMap::interior_faces`]
    /// order), followed by the west pole face `F` and the east pole face `F + 1`.
    /// Dual edge `e` crosses primal edge `e`, pointing from its east face to its west face.
    pub fn dual_map(&self) -> Result<PlanarMap> {
        self.ensure_valid()?;
        let faces = self.interior_faces();
        let nf = faces.len();
        let (w_pole, e_pole) = (nf, nf + 1);
        let mut west_face = vec![w_pole; self.num_edges()];
        let mut east_face = vec![e_pole; self.num_edges()];
        let mut out = vec![Vec::new(); nf + 2];
        let mut inc = vec![Vec::new(); nf + 2];
        for (f, face) in faces.iter().enumerate() {
            for &e in &face.west {
                east_face[e] = f;
            }
            for &e in &face.east {
                west_face[e] = f;
            }
            out[f] = face.west.clone();
            inc[f] = face.east.clone();
        }
        out[e_pole] = self.east.clone();
        inc[w_pole] = self.west.clone();
        let edges = (0..self.num_edges()).map(|e| [east_face[e], west_face[e]]).collect();
        let incidence = self.incidence();
        let mut dual_west = incidence.out[self.south].clone();
        dual_west.reverse();
        let mut dual_east = incidence.inc[self.north].clone();
        dual_east.reverse();
        PlanarMap::from_incidence(edges, &Incidence { out, inc }, e_pole, w_pole, dual_west, dual_east)
    }

    /// The same map turned by 180°: every edge reversed, poles and sides swapped.
    pub fn reversed(&self) -> PlanarMap {
        let edges = self.edges.iter().map(|&[t, h]| [h, t]).collect();
        let rotations = self
            .rotations
            .iter()
            .map(|rot| rot.iter().map(|d| d.twin()).collect())
            .collect();
        let west = self.east.iter().rev().copied().collect();
        let east = self.west.iter().rev().copied().collect();
        PlanarMap::new(edges, rotations, self.north, self.south, west, east)
            .expect("reversal preserves structure")
    }

    /// Breadth-first labels of vertices and edges from the root dart at the south pole.
    /// Isomorphic maps get identical labels on corresponding elements.
    pub fn canonical_labeling(&self) -> (Vec<usize>, Vec<usize>) {
        self.bfs_labels(None)
    }

    fn bfs_labels(&self, mut code: Option<&mut Vec<u64>>) -> (Vec<usize>, Vec<usize>) {
        let nv = self.num_vertices();
        let mut vlabel = vec![usize::MAX; nv];
        let mut elabel = vec![usize::MAX; self.num_edges()];
        let mut entry = vec![Dart(0); nv];
        let mut queue = VecDeque::new();
        let mut next_v = 1;
        let mut next_e = 0;
        vlabel[self.south] = 0;
        entry[self.south] = self.outer_dart();
        queue.push_back(self.south);
        while let Some(v) = queue.pop_front() {
            let rot = &self.rotations[v];
            let start = self.slot[entry[v].0].1;
            if let Some(c) = code.as_deref_mut() {
                c.push(rot.len() as u64);
            }
            for s in 0..rot.len() {
                let d = rot[(start + s) % rot.len()];
                let e = d.edge();
                if elabel[e] == usize::MAX {
                    elabel[e] = next_e;
                    next_e += 1;
                }
                let u = self.other_end(e, v);
                if vlabel[u] == usize::MAX {
                    vlabel[u] = next_v;
                    next_v += 1;
                    entry[u] = d.twin();
                    queue.push_back(u);
                }
                if let Some(c) = code.as_deref_mut() {
                    c.push((2 * elabel[e] + usize::from(!d.is_outgoing())) as u64);
                    c.push(vlabel[u] as u64);
                }
            }
        }
        (vlabel, elabel)
    }

    /// Relabeling-invariant code of the rooted map. Two maps are isomorphic
    /// (preserving poles, sides and orientation) iff their codes are equal.
    pub fn canonical_form(&self) -> CanonicalForm {
        let mut code = vec![self.num_vertices() as u64, self.num_edges() as u64];
        let (vlabel, elabel) = self.bfs_labels(Some(&mut code));
        code.push(u64::MAX);
        code.push(vlabel[self.north] as u64);
        for list in [&self.west, &self.east] {
            code.push(list.len() as u64);
            code.extend(list.iter().map(|&e| elabel[e] as u64));
        }
        CanonicalForm(code)
    }

    /// True when no two vertices are joined by more than one edge.
    pub fn is_simple(&self) -> bool {
        let mut pairs: Vec<(VertexId, VertexId)> = self.edges.iter().map(|&[t, h]| (t.min(h), t.max(h))).collect();
        pairs.sort_unstable();
        pairs.windows(2).all(|w| w[0] != w[1])
    }

    pub fn is_triangulation(&self) -> bool {
        self.interior_faces().iter().all(|f| f.darts.len() == 3)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalForm(pub Vec<u64>);

/// On-disk form. In `rotations` an outgoing dart of edge `e` is written `e`
/// and an incoming one `-(e + 1)`, listed counterclockwise.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MapJson {
    pub vertices: usize,
    pub south: VertexId,
    pub north: VertexId,
    pub edges: Vec<[VertexId; 2]>,
    pub rotations: Vec<Vec<i64>>,
    pub west: Vec<EdgeId>,
    pub east: Vec<EdgeId>,
}

impl From<&PlanarMap> for MapJson {
    fn from(m: &PlanarMap) -> MapJson {
        let rotations = m
            .rotations
            .iter()
            .map(|rot| {
                rot.iter()
                    .map(|d| if d.is_outgoing() { d.edge() as i64 } else { -(d.edge() as i64) - 1 })
                    .collect()
            })
            .collect();
        MapJson {
            vertices: m.num_vertices(),
            south: m.south,
            north: m.north,
            edges: m.edges.clone(),
            rotations,
            west: m.west.clone(),
            east: m.east.clone(),
        }
    }
}

impl TryFrom<MapJson> for PlanarMap {
    type Error = Error;

    fn try_from(j: MapJson) -> Result<PlanarMap> {
        if j.rotations.len() != j.vertices {
            return Err(Error::Structural(format!(
                "{} rotations listed for {} vertices",
                j.rotations.len(),
                j.vertices
            )));
        }
        let rotations = j
            .rotations
            .iter()
            .map(|rot| {
                rot.iter()
                    .map(|&x| if x >= 0 { Dart::at_tail(x as usize) } else { Dart::at_head((-x - 1) as usize) })
                    .collect()
            })
            .collect();
        PlanarMap::new(j.edges, rotations, j.south, j.north, j.west, j.east)
    }
}

impl PlanarMap {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&MapJson::from(self)).expect("map serializes")
    }

    pub fn from_json(text: &str) -> Result<PlanarMap> {
        let j: MapJson = serde_json::from_str(text)?;
        PlanarMap::try_from(j)
    }
}

fn direction_changes(dirs: impl Iterator<Item = bool>) -> usize {
    let dirs: Vec<bool> = dirs.collect();
    let k = dirs.len();
    (0..k).filter(|&i| dirs[i] != dirs[(i + 1) % k]).count()
}

fn cyclic_eq(a: &[Dart], b: &[Dart]) -> bool {
    if a.len() != b.len() {
        return false;
    }
    match a.iter().position(|&d| d == b[0]) {
        Some(off) => (0..a.len()).all(|i| a[(off + i) % a.len()] == b[i]),
        None => false,
    }
}
