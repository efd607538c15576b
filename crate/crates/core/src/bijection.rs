//! Sewing move sequences into marked bipolar maps and reading walks off maps.
//!
//! A marked map is built bottom-up. Its eastern boundary is split at the
//! *active* vertex: edges below it are present, edges above it are missing
//! (already created as the east side of an open face, waiting for an edge
//! move). Its western boundary is split at the *start* vertex: edges below it
//! are missing (created when a face move reached below the bottom of the map).
//!
//! Vertex and edge ids are handed out in creation order. An `m_{i,j}` move
//! creates the missing west edges first (bottom up), then the face's east
//! side (bottom up).

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::map::{CanonicalForm, EdgeId, Incidence, PlanarMap, VertexId};

/// One step of a walk: `Edge` is `(1, -1)`, `Face(i, j)` is `(-i, j)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Move {
    Edge,
    Face(usize, usize),
}

impl Move {
    pub fn increment(self) -> (i64, i64) {
        match self {
            Move::Edge => (1, -1),
            Move::Face(i, j) => (-(i as i64), j as i64),
        }
    }

    /// Inverse of [`Move::increment`]; `None` for steps that are not moves.
    pub fn from_increment(dx: i64, dy: i64) -> Option<Move> {
        match (dx, dy) {
            (1, -1) => Some(Move::Edge),
            (dx, dy) if dx <= 0 && dy >= 0 => Some(Move::Face((-dx) as usize, dy as usize)),
            _ => None,
        }
    }
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Move::Edge => write!(f, "E"),
            Move::Face(i, j) => write!(f, "F {i} {j}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LatticeWalk {
    pub start: (i64, i64),
    pub moves: Vec<Move>,
}

impl LatticeWalk {
    pub fn new(start: (i64, i64), moves: Vec<Move>) -> LatticeWalk {
        LatticeWalk { start, moves }
    }

    pub fn len(&self) -> usize {
        self.moves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.moves.is_empty()
    }

    /// All `T + 1` visited points.
    pub fn points(&self) -> Vec<(i64, i64)> {
        let mut p = self.start;
        let mut pts = Vec::with_capacity(self.moves.len() + 1);
        pts.push(p);
        for m in &self.moves {
            let (dx, dy) = m.increment();
            p = (p.0 + dx, p.1 + dy);
            pts.push(p);
        }
        pts
    }

    pub fn end(&self) -> (i64, i64) {
        self.moves.iter().fold(self.start, |p, m| {
            let (dx, dy) = m.increment();
            (p.0 + dx, p.1 + dy)
        })
    }

    pub fn is_quadrant_valid(&self) -> bool {
        self.points().iter().all(|&(x, y)| x >= 0 && y >= 0)
    }

    /// True when the walk encodes an unmarked map: it stays in the quadrant,
    /// starts on the y-axis and ends on the x-axis.
    pub fn is_closed_code(&self) -> bool {
        let (ex, ey) = self.end();
        self.start.0 == 0 && self.start.1 >= 0 && ey == 0 && ex >= 0 && self.is_quadrant_valid()
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("{} {}\n", self.start.0, self.start.1);
        for m in &self.moves {
            s.push_str(&m.to_string());
            s.push('\n');
        }
        s
    }

    pub fn parse(text: &str) -> Result<LatticeWalk> {
        let mut start = None;
        let mut moves = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let parse_err = |msg: String| Error::Parse { line: idx + 1, msg };
            let toks: Vec<&str> = line.split_whitespace().collect();
            if start.is_none() {
                let nums: Vec<i64> = toks
                    .iter()
                    .map(|t| t.parse::<i64>().map_err(|e| parse_err(format!("bad start coordinate {t:?}: {e}"))))
                    .collect::<Result<_>>()?;
                if nums.len() != 2 {
                    return Err(parse_err("start line must be \"x0 y0\"".into()));
                }
                start = Some((nums[0], nums[1]));
                continue;
            }
            let mv = match toks.as_slice() {
                ["E"] => Move::Edge,
                ["F", i, j] => {
                    let i = i.parse::<usize>().map_err(|e| parse_err(format!("bad i {i:?}: {e}")))?;
                    let j = j.parse::<usize>().map_err(|e| parse_err(format!("bad j {j:?}: {e}")))?;
                    Move::Face(i, j)
                }
                _ => return Err(parse_err(format!("expected \"E\" or \"F i j\", got {line:?}"))),
            };
            moves.push(mv);
        }
        let start = start.ok_or(Error::Parse { line: 0, msg: "missing start line".into() })?;
        Ok(LatticeWalk { start, moves })
    }
}

impl FromStr for LatticeWalk {
    type Err = Error;

    fn from_str(s: &str) -> Result<LatticeWalk> {
        LatticeWalk::parse(s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct FaceRec {
    west: Vec<EdgeId>,
    east: Vec<EdgeId>,
}

/// A partially sewn map.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MarkedBipolarState {
    edges: Vec<[VertexId; 2]>,
    out: Vec<Vec<EdgeId>>,
    inc: Vec<Vec<EdgeId>>,
    west_face: Vec<Option<usize>>,
    faces: Vec<FaceRec>,
    east_below: Vec<EdgeId>,
    // missing east edges, top to bottom
    east_above: Vec<EdgeId>,
    // missing west edges, top to bottom
    west_missing: Vec<EdgeId>,
    west_present: Vec<EdgeId>,
    // accumulated walk increment
    delta: (i64, i64),
    steps: usize,
}

impl Default for MarkedBipolarState {
    fn default() -> Self {
        MarkedBipolarState::initial()
    }
}

impl MarkedBipolarState {
    /// One edge, start vertex at its bottom, active vertex at its top.
    pub fn initial() -> MarkedBipolarState {
        MarkedBipolarState {
            edges: vec![[0, 1]],
            out: vec![vec![0], vec![]],
            inc: vec![vec![], vec![0]],
            west_face: vec![None],
            faces: Vec::new(),
            east_below: vec![0],
            east_above: Vec::new(),
            west_missing: Vec::new(),
            west_present: vec![0],
            delta: (0, 0),
            steps: 0,
        }
    }

    pub fn num_vertices(&self) -> usize {
        self.out.len()
    }

    /// Number of edges that are not missing.
    pub fn num_present_edges(&self) -> usize {
        self.edges.len() - self.east_above.len() - self.west_missing.len()
    }

    pub fn num_faces(&self) -> usize {
        self.faces.len()
    }

    pub fn num_moves(&self) -> usize {
        self.steps
    }

    pub fn missing_east(&self) -> usize {
        self.east_above.len()
    }

    pub fn missing_west(&self) -> usize {
        self.west_missing.len()
    }

    pub fn present_east(&self) -> usize {
        self.east_below.len()
    }

    pub fn present_west(&self) -> usize {
        self.west_present.len()
    }

    pub fn active_vertex(&self) -> VertexId {
        self.edges[*self.east_below.last().expect("active edge")][1]
    }

    pub fn start_vertex(&self) -> VertexId {
        self.edges[self.west_present[0]][0]
    }

    /// Sum of the increments of all moves applied so far.
    pub fn displacement(&self) -> (i64, i64) {
        self.delta
    }

    pub fn is_unmarked(&self) -> bool {
        self.east_above.is_empty() && self.west_missing.is_empty()
    }

    fn west_list(&self) -> Vec<EdgeId> {
        self.west_missing.iter().rev().chain(&self.west_present).copied().collect()
    }

    fn east_list(&self) -> Vec<EdgeId> {
        self.east_below.iter().chain(self.east_above.iter().rev()).copied().collect()
    }

    fn check_bookkeeping(&self) {
        let a = self.east_below.len() as i64;
        let s = self.west_missing.len() as i64;
        debug_assert_eq!(self.delta.0, -1 + a - s);
        debug_assert_eq!(
            self.delta.1,
            1 + self.east_above.len() as i64 - self.west_present.len() as i64
        );
        debug_assert_eq!(self.num_present_edges(), 1 + self.steps);
    }

    fn new_vertex(&mut self) -> VertexId {
        self.out.push(Vec::new());
        self.inc.push(Vec::new());
        self.out.len() - 1
    }

    fn new_edge(&mut self, tail: VertexId, head: VertexId) -> EdgeId {
        self.edges.push([tail, head]);
        self.west_face.push(None);
        self.edges.len() - 1
    }

    fn edge_move(&mut self) {
        if let Some(e) = self.east_above.pop() {
            self.east_below.push(e);
        } else {
            let top = self.active_vertex();
            let w = self.new_vertex();
            let e = self.new_edge(top, w);
            self.out[top].push(e);
            self.inc[w].push(e);
            self.east_below.push(e);
            self.west_present.push(e);
        }
    }

    /// Adds one edge; `Face(i, j)` also closes a face with `i + 1` west and `j + 1` east edges.
    pub fn apply_move(&mut self, mv: Move) {
        if let Move::Face(i, j) = mv {
            let a = self.east_below.len();
            let k = (i + 1).min(a);
            let mut west: Vec<EdgeId> = self.east_below.split_off(a - k);
            let mut bottom = self.edges[west[0]][0];
            let top = self.edges[*west.last().unwrap()][1];
            let d = i + 1 - k;
            if d > 0 {
                let verts: Vec<VertexId> = (0..d).map(|_| self.new_vertex()).collect();
                let mut chain = verts.clone();
                chain.push(bottom);
                let mut below = Vec::with_capacity(d);
                for w in chain.windows(2) {
                    let e = self.new_edge(w[0], w[1]);
                    self.out[w[0]].push(e);
                    self.inc[w[1]].push(e);
                    below.push(e);
                }
                self.west_missing.extend(below.iter().rev());
                below.append(&mut west);
                west = below;
                bottom = verts[0];
            }
            let mut chain = vec![bottom];
            chain.extend((0..j).map(|_| self.new_vertex()));
            chain.push(top);
            let face = self.faces.len();
            let mut east = Vec::with_capacity(j + 1);
            for w in chain.windows(2) {
                let e = self.new_edge(w[0], w[1]);
                self.out[w[0]].push(e);
                self.inc[w[1]].push(e);
                self.west_face[e] = Some(face);
                east.push(e);
            }
            self.east_below.push(east[0]);
            self.east_above.extend(east[1..].iter().rev());
            self.faces.push(FaceRec { west, east });
        } else {
            self.edge_move();
        }
        let (dx, dy) = mv.increment();
        self.delta = (self.delta.0 + dx, self.delta.1 + dy);
        self.steps += 1;
        self.check_bookkeeping();
    }

    /// Undoes the last move and returns it.
    fn pop_move(&mut self) -> Result<Move> {
        let step = self.steps;
        let fail = |reason: &str| Error::Unsew { step, reason: reason.to_string() };
        if self.steps == 0 {
            return Err(fail("no move left"));
        }
        let e = *self.east_below.last().ok_or_else(|| fail("no active edge"))?;
        let face = self.west_face[e].filter(|&f| self.faces[f].east[0] == e);
        let mv = match face {
            None => {
                self.east_below.pop();
                if self.west_present.last() == Some(&e) {
                    let [tail, head] = self.edges[e];
                    if e + 1 != self.edges.len() || head + 1 != self.out.len() || self.west_present.len() < 2 {
                        return Err(fail("top edge was not adjoined last"));
                    }
                    self.west_present.pop();
                    self.edges.pop();
                    self.west_face.pop();
                    self.out.pop();
                    self.inc.pop();
                    if self.out[tail].pop() != Some(e) {
                        return Err(fail("top edge is not east-most at its tail"));
                    }
                } else {
                    self.east_above.push(e);
                }
                Move::Edge
            }
            Some(f) => {
                if f + 1 != self.faces.len() {
                    return Err(fail("face was not closed last"));
                }
                let FaceRec { west, east } = self.faces.pop().unwrap();
                let (i, j) = (west.len() - 1, east.len() - 1);
                self.east_below.pop();
                for &x in &east[1..] {
                    if self.east_above.pop() != Some(x) {
                        return Err(fail("open face edges are not above the active vertex"));
                    }
                }
                let d = west.iter().take_while(|&&x| self.west_missing.contains(&x)).count();
                for &x in &west[..d] {
                    if self.west_missing.pop() != Some(x) {
                        return Err(fail("missing west edges out of order"));
                    }
                }
                self.east_below.extend_from_slice(&west[d..]);
                let ne = self.edges.len() - d - east.len();
                let nv = self.out.len() - d - j;
                if west[..d].iter().chain(&east).any(|&x| x < ne) {
                    return Err(fail("face edges were not adjoined last"));
                }
                for x in (ne..self.edges.len()).rev() {
                    let [t, h] = self.edges[x];
                    if t < nv {
                        self.out[t].retain(|&y| y != x);
                    }
                    if h < nv {
                        self.inc[h].retain(|&y| y != x);
                    }
                }
                self.edges.truncate(ne);
                self.west_face.truncate(ne);
                self.out.truncate(nv);
                self.inc.truncate(nv);
                if self.edges.iter().flatten().any(|&v| v >= nv) {
                    return Err(fail("face vertices were not created last"));
                }
                Move::Face(i, j)
            }
        };
        let (dx, dy) = mv.increment();
        self.delta = (self.delta.0 - dx, self.delta.1 - dy);
        self.steps -= 1;
        Ok(mv)
    }

    /// The underlying map including missing edges.
    pub fn full_map(&self) -> PlanarMap {
        let west = self.west_list();
        let east = self.east_list();
        let south = self.edges[west[0]][0];
        let north = self.edges[*west.last().unwrap()][1];
        let incidence = Incidence { out: self.out.clone(), inc: self.inc.clone() };
        PlanarMap::from_incidence(self.edges.clone(), &incidence, south, north, west, east)
            .expect("sewn state is a well-formed map")
    }

    /// The finished map, available once no edge is missing.
    pub fn to_map(&self) -> Result<PlanarMap> {
        if !self.is_unmarked() {
            return Err(Error::NotClosedCode(format!(
                "{} missing west edges and {} missing east edges remain",
                self.west_missing.len(),
                self.east_above.len()
            )));
        }
        Ok(self.full_map())
    }

    /// Code of the marked map up to relabeling; the markers are part of it.
    pub fn canonical_form(&self) -> CanonicalForm {
        let mut code = self.full_map().canonical_form().0;
        code.push(self.east_below.len() as u64);
        code.push(self.west_missing.len() as u64);
        CanonicalForm(code)
    }

    /// Canonical form of this state turned by 180°: start and active vertex swap roles.
    pub fn rotated_canonical_form(&self) -> CanonicalForm {
        let mut code = self.full_map().reversed().canonical_form().0;
        code.push(self.west_present.len() as u64);
        code.push(self.east_above.len() as u64);
        CanonicalForm(code)
    }
}

pub fn sew(moves: &[Move]) -> MarkedBipolarState {
    let mut st = MarkedBipolarState::initial();
    for &m in moves {
        st.apply_move(m);
    }
    st
}

/// Recovers the move sequence by peeling off the last adjoined edge until one edge is left.
pub fn unsew(state: &MarkedBipolarState) -> Result<Vec<Move>> {
    let mut st = state.clone();
    let mut moves = Vec::with_capacity(st.steps);
    while st.steps > 0 {
        moves.push(st.pop_move()?);
    }
    if st != MarkedBipolarState::initial() {
        return Err(Error::Unsew { step: 0, reason: "did not return to the one-edge map".into() });
    }
    moves.reverse();
    Ok(moves)
}

pub fn walk_to_map(walk: &LatticeWalk) -> Result<PlanarMap> {
    if !walk.is_closed_code() {
        return Err(Error::NotClosedCode(format!(
            "walk from {:?} to {:?} must start on the y-axis, end on the x-axis and stay in the quadrant",
            walk.start,
            walk.end()
        )));
    }
    let st = sew(&walk.moves);
    st.to_map()
        .map_err(|e| Error::Internal(format!("closed walk sewed into a marked map: {e}")))
}

/// Reads the walk off a map along the interface path between the two trees.
pub fn map_to_walk(map: &PlanarMap) -> Result<LatticeWalk> {
    let se = map.se_tree()?;
    let nw = map.nw_tree()?;
    let x_depth = se.depths(map);
    let y_depth = nw.depths(map);
    let incidence = map.incidence();
    let faces = map.interior_faces();
    let mut east_face = vec![usize::MAX; map.num_edges()];
    for (f, face) in faces.iter().enumerate() {
        for &e in &face.west {
            east_face[e] = f;
        }
    }

    let ne = map.num_edges();
    let mut order = Vec::with_capacity(ne);
    let mut moves = Vec::with_capacity(ne.saturating_sub(1));
    let mut e = map.west_boundary()[0];
    order.push(e);
    while order.len() < ne {
        let h = map.head(e);
        let (next, mv) = if incidence.inc[h].last() != Some(&e) {
            let face = &faces[east_face[e]];
            let t = face.face_type();
            (face.east[0], Move::Face(t.west_count, t.east_count))
        } else {
            let nxt = *incidence.out[h]
                .first()
                .ok_or_else(|| Error::Internal(format!("interface path stopped early at v{h}")))?;
            (nxt, Move::Edge)
        };
        order.push(next);
        moves.push(mv);
        e = next;
    }

    let point = |e: EdgeId| (x_depth[map.tail(e)] as i64, y_depth[map.head(e)] as i64);
    let walk = LatticeWalk::new(point(order[0]), moves);
    let pts = walk.points();
    if let Some(t) = (0..ne).find(|&t| pts[t] != point(order[t])) {
        return Err(Error::Internal(format!(
            "tree distances at step {t} give {:?}, path structure gives {:?}",
            point(order[t]),
            pts[t]
        )));
    }
    Ok(walk)
}

/// Moves of the same map turned by 180°.
pub fn reverse_moves(moves: &[Move]) -> Vec<Move> {
    moves
        .iter()
        .rev()
        .map(|m| match *m {
            Move::Edge => Move::Edge,
            Move::Face(i, j) => Move::Face(j, i),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::map::FaceType;
    use Move::{Edge as E, Face as F};

    pub(crate) fn fig4() -> Vec<Move> {
        vec![
            E,
            F(0, 2),
            F(1, 0),
            F(0, 1),
            E,
            E,
            F(1, 1),
            F(0, 1),
            E,
            E,
            E,
            E,
            F(1, 0),
            F(2, 1),
            E,
        ]
    }

    #[test]
    fn initial_plus_edge() {
        let st = sew(&[E]);
        assert_eq!(st.num_present_edges(), 2);
        assert_eq!(st.active_vertex(), 2);
        assert!(st.is_unmarked());
    }

    #[test]
    fn face_below_quadrant() {
        let st = sew(&[F(2, 0)]);
        assert_eq!(st.missing_west(), 2);
        assert_eq!(st.displacement().0, -2);
        assert_eq!(st.num_present_edges(), 2);
    }

    #[test]
    fn fig4_sizes_and_round_trip() {
        let st = sew(&fig4());
        assert_eq!(st.num_present_edges(), 16);
        assert_eq!(st.num_faces(), 7);
        assert!(st.is_unmarked());
        assert_eq!(unsew(&st).unwrap(), fig4());
        let walk = LatticeWalk::new((0, 2), fig4());
        assert_eq!(walk.end(), (3, 0));
        assert!(walk.is_quadrant_valid());
        let map = walk_to_map(&walk).unwrap();
        assert!(map.validate_bipolar().is_valid());
        assert_eq!(map.west_boundary().len(), 3);
        assert_eq!(map.east_boundary().len(), 4);
        assert_eq!(map_to_walk(&map).unwrap(), walk);
    }

    #[test]
    fn empty_and_triangle() {
        let m = walk_to_map(&LatticeWalk::new((0, 0), vec![])).unwrap();
        assert_eq!(m.num_edges(), 1);
        assert_eq!(map_to_walk(&m).unwrap(), LatticeWalk::new((0, 0), vec![]));
        let w = LatticeWalk::new((0, 0), vec![F(0, 1), E]);
        let m = walk_to_map(&w).unwrap();
        assert_eq!(m.num_edges(), 3);
        assert_eq!(m.face_types().unwrap(), vec![FaceType { west_count: 0, east_count: 1 }]);
        assert_eq!(map_to_walk(&m).unwrap(), w);
    }

    #[test]
    fn unclosed_walks_rejected() {
        let w = LatticeWalk::new((0, 0), vec![F(1, 0)]);
        assert!(matches!(walk_to_map(&w), Err(Error::NotClosedCode(_))));
        let w = LatticeWalk::new((0, 0), vec![F(0, 1)]);
        assert!(matches!(walk_to_map(&w), Err(Error::NotClosedCode(_))));
    }

    #[test]
    fn nine_marked_states() {
        let steps = [E, F(0, 1), F(1, 0)];
        let mut codes = std::collections::HashSet::new();
        for &a in &steps {
            for &b in &steps {
                codes.insert(sew(&[a, b]).canonical_form());
            }
        }
        assert_eq!(codes.len(), 9);
    }

    #[test]
    fn reversal_rotates() {
        let ms = fig4();
        let rev = reverse_moves(&ms);
        assert_eq!(reverse_moves(&rev), ms);
        assert_eq!(sew(&rev).canonical_form(), sew(&ms).rotated_canonical_form());
    }

    #[test]
    fn text_format() {
        let w = LatticeWalk::new((0, 2), fig4());
        let text = w.to_text();
        assert!(text.starts_with("0 2\nE\nF 0 2\n"));
        assert_eq!(LatticeWalk::parse(&text).unwrap(), w);
        let noisy = "# header\n0 0\n\nF 0 1  # face\nE\n";
        assert_eq!(LatticeWalk::parse(noisy).unwrap(), LatticeWalk::new((0, 0), vec![F(0, 1), E]));
        assert!(matches!(LatticeWalk::parse("0 0\nX\n"), Err(Error::Parse { line: 2, .. })));
    }
}
