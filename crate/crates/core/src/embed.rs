//! Upward straight-line drawings of simple triangulations, and SVG output.
//!
//! The map is framed by three extra vertices so that every face is a triangle,
//! then shrunk to the frame by contracting edges that lie on no separating
//! triangle and have no parallel directed path. Vertices are put back in
//! reverse order, each at a simple rational point of the open polygon where
//! all of its triangles stay counterclockwise and all of its edges point up.

use std::collections::{BTreeSet, HashSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::bijection::{map_to_walk, Move};
use crate::error::{Error, Result};
use crate::geometry::{check_drawing, Point};
use crate::map::PlanarMap;

type Q = BigRational;

fn q(v: i64) -> Q {
    Q::from_integer(BigInt::from(v))
}

#[derive(Clone, Debug, PartialEq)]
pub struct Embedding {
    /// Exact coordinates, present for drawings made by [`upward_embed`].
    pub exact: Option<Vec<Point>>,
    pub points: Vec<(f64, f64)>,
    /// Set when planarity is not guaranteed.
    pub warning: Option<String>,
}

impl Embedding {
    /// Largest bit length of any numerator or denominator.
    pub fn max_coordinate_bits(&self) -> u64 {
        self.exact.as_ref().map_or(0, |pts| {
            pts.iter()
                .flat_map(|(x, y)| [x, y])
                .flat_map(|c| [c.numer().bits(), c.denom().bits()])
                .max()
                .unwrap_or(0)
        })
    }
}

/// Open half-plane `a·x + b·y + c > 0`.
struct HalfPlane {
    a: Q,
    b: Q,
    c: Q,
}

impl HalfPlane {
    /// Points `u` with `orient(p, q, u) > 0`, i.e. left of the line from `p` to `q`.
    fn left_of(p: &Point, q: &Point) -> HalfPlane {
        let a = &p.1 - &q.1;
        let b = &q.0 - &p.0;
        let c = -(&a * &p.0 + &b * &p.1);
        HalfPlane { a, b, c }
    }

    fn eval(&self, u: &Point) -> Q {
        &self.a * &u.0 + &self.b * &u.1 + &self.c
    }
}

/// Convex polygon `poly` clipped to the closure of `h`.
fn clip(poly: Vec<Point>, h: &HalfPlane) -> Vec<Point> {
    let n = poly.len();
    let vals: Vec<Q> = poly.iter().map(|p| h.eval(p)).collect();
    let mut out = Vec::with_capacity(n + 1);
    for i in 0..n {
        let j = (i + 1) % n;
        let (p, fp) = (&poly[i], &vals[i]);
        let (r, fr) = (&poly[j], &vals[j]);
        if !fp.is_negative() {
            out.push(p.clone());
        }
        if (fp.is_positive() && fr.is_negative()) || (fp.is_negative() && fr.is_positive()) {
            let s = fp / (fp - fr);
            out.push((&p.0 + &s * (&r.0 - &p.0), &p.1 + &s * (&r.1 - &p.1)));
        }
    }
    out
}

/// Rational with the smallest denominator strictly between `lo` and `hi`.
fn simplest_between(lo: &Q, hi: &Q) -> Q {
    debug_assert!(lo < hi);
    let fl = lo.floor();
    let next = &fl + Q::one();
    if &next < hi {
        // the integer closest to zero in range
        if lo.is_negative() && hi.is_positive() {
            return Q::zero();
        }
        if hi.is_negative() || hi.is_zero() {
            let c = hi.ceil() - Q::one();
            return if &c > lo { c } else { next };
        }
        return next;
    }
    let lo_frac = lo - &fl;
    let hi_frac = hi - &fl;
    // both in [fl, fl + 1]: recurse on reciprocals
    let inner = if lo_frac.is_zero() {
        (hi_frac.recip()).floor() + Q::one()
    } else {
        simplest_between(&hi_frac.recip(), &lo_frac.recip())
    };
    fl + inner.recip()
}

/// A simple point well inside the open convex region bounded by `poly`.
fn interior_point(poly: &[Point]) -> Option<Point> {
    if poly.len() < 3 {
        return None;
    }
    let ylo = poly.iter().map(|p| &p.1).min()?.clone();
    let yhi = poly.iter().map(|p| &p.1).max()?.clone();
    if ylo >= yhi {
        return None;
    }
    let third = |lo: &Q, hi: &Q| {
        let w = (hi - lo) / q(3);
        simplest_between(&(lo + &w), &(hi - &w))
    };
    let y = third(&ylo, &yhi);
    let mut xs = Vec::new();
    for i in 0..poly.len() {
        let (p, r) = (&poly[i], &poly[(i + 1) % poly.len()]);
        if (p.1 <= y && y <= r.1) || (r.1 <= y && y <= p.1) {
            if p.1 == r.1 {
                xs.push(p.0.clone());
                xs.push(r.0.clone());
            } else {
                xs.push(&p.0 + (&y - &p.1) * (&r.0 - &p.0) / (&r.1 - &p.1));
            }
        }
    }
    let xlo = xs.iter().min()?.clone();
    let xhi = xs.iter().max()?.clone();
    if xlo >= xhi {
        return None;
    }
    Some((third(&xlo, &xhi), y))
}

/// A triangulated disk with an oriented edge set, kept up to date under edge contraction.
struct Contractor {
    faces: Vec<[usize; 3]>,
    face_alive: Vec<bool>,
    vfaces: Vec<BTreeSet<usize>>,
    out: Vec<BTreeSet<usize>>,
    inn: Vec<BTreeSet<usize>>,
}

/// What is needed to put a contracted vertex back: its faces and its neighbours by direction.
struct Expansion {
    u: usize,
    faces: Vec<[usize; 3]>,
    ins: Vec<usize>,
    outs: Vec<usize>,
}

impl Contractor {
    fn new(nv: usize, edges: &[[usize; 2]], faces: Vec<[usize; 3]>) -> Contractor {
        let mut c = Contractor {
            face_alive: vec![true; faces.len()],
            vfaces: vec![BTreeSet::new(); nv],
            out: vec![BTreeSet::new(); nv],
            inn: vec![BTreeSet::new(); nv],
            faces,
        };
        for (f, tri) in c.faces.iter().enumerate() {
            for &v in tri {
                c.vfaces[v].insert(f);
            }
        }
        for &[t, h] in edges {
            c.out[t].insert(h);
            c.inn[h].insert(t);
        }
        c
    }

    fn neighbours(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.out[v].iter().chain(self.inn[v].iter()).copied()
    }

    /// A directed path from `a` to `b` other than the edge `a -> b`.
    fn has_detour(&self, a: usize, b: usize) -> bool {
        let mut seen = HashSet::from([a]);
        let mut stack: Vec<usize> = self.out[a].iter().copied().filter(|&z| z != b).collect();
        while let Some(z) = stack.pop() {
            if z == b {
                return true;
            }
            if seen.insert(z) {
                stack.extend(self.out[z].iter().copied());
            }
        }
        false
    }

    /// Contracting `u` into `v` keeps a simple acyclic triangulation.
    fn contractible(&self, u: usize, v: usize) -> bool {
        let shared = self.vfaces[u].intersection(&self.vfaces[v]).count();
        let common = self.neighbours(u).filter(|z| self.out[v].contains(z) || self.inn[v].contains(z)).count();
        if shared != 2 || common != 2 {
            return false;
        }
        if self.out[u].contains(&v) {
            !self.has_detour(u, v)
        } else {
            !self.has_detour(v, u)
        }
    }

    fn contract(&mut self, u: usize, v: usize) -> Expansion {
        let fs: Vec<usize> = self.vfaces[u].iter().copied().collect();
        let exp = Expansion {
            u,
            faces: fs.iter().map(|&f| self.faces[f]).collect(),
            ins: self.inn[u].iter().copied().collect(),
            outs: self.out[u].iter().copied().collect(),
        };
        for f in fs {
            if self.faces[f].contains(&v) {
                self.face_alive[f] = false;
                for z in self.faces[f] {
                    self.vfaces[z].remove(&f);
                }
            } else {
                for z in self.faces[f].iter_mut() {
                    if *z == u {
                        *z = v;
                    }
                }
                self.vfaces[v].insert(f);
            }
        }
        self.vfaces[u].clear();
        for z in std::mem::take(&mut self.out[u]) {
            self.inn[z].remove(&u);
            if z != v {
                self.out[v].insert(z);
                self.inn[z].insert(v);
            }
        }
        for z in std::mem::take(&mut self.inn[u]) {
            self.out[z].remove(&u);
            if z != v {
                self.inn[v].insert(z);
                self.out[z].insert(v);
            }
        }
        exp
    }
}

/// Where `u` may go: every triangle at `u` counterclockwise, every edge at `u` upward.
fn placement_region(exp: &Expansion, pts: &[Option<Point>]) -> Vec<HalfPlane> {
    let at = |z: usize| pts[z].as_ref().expect("neighbours are placed before the vertex");
    let mut cons = Vec::new();
    for tri in &exp.faces {
        let k = tri.iter().position(|&z| z == exp.u).unwrap();
        let (p, r) = (at(tri[(k + 1) % 3]), at(tri[(k + 2) % 3]));
        cons.push(HalfPlane::left_of(p, r));
    }
    for &z in &exp.ins {
        let y = &at(z).1;
        cons.push(HalfPlane::left_of(&(q(0), y.clone()), &(q(1), y.clone())));
    }
    for &z in &exp.outs {
        let y = &at(z).1;
        cons.push(HalfPlane::left_of(&(q(1), y.clone()), &(q(0), y.clone())));
    }
    cons
}

/// Triangles of the map plus a frame `S* < Z < N*` around it, all counterclockwise.
/// `Z` sits west of the map and is joined to its whole west boundary; `S*` fans over the east boundary.
fn framed(map: &PlanarMap) -> (usize, Vec<[usize; 2]>, Vec<[usize; 3]>) {
    let nv = map.num_vertices();
    let (s_star, z, n_star) = (nv, nv + 1, nv + 2);
    let (s, n) = (map.south(), map.north());
    let mut edges: Vec<[usize; 2]> = map.edges().to_vec();
    let mut faces = Vec::new();
    for f in map.interior_faces() {
        if f.west.len() == 2 {
            faces.push([f.bottom, f.top, map.head(f.west[0])]);
        } else {
            faces.push([f.bottom, map.head(f.east[0]), f.top]);
        }
    }
    let west: Vec<usize> = map.west_boundary().iter().map(|&e| map.tail(e)).chain([n]).collect();
    let east: Vec<usize> = map.east_boundary().iter().map(|&e| map.tail(e)).chain([n]).collect();
    for w in west.windows(2) {
        faces.push([w[0], w[1], z]);
    }
    for e in east.windows(2) {
        faces.push([s_star, e[1], e[0]]);
    }
    faces.extend([[s_star, s, z], [n, n_star, z], [s_star, n_star, n]]);
    edges.extend(west.iter().map(|&w| [w, z]));
    edges.extend(east.iter().map(|&e| [s_star, e]));
    edges.extend([[n, n_star], [s_star, z], [z, n_star], [s_star, n_star]]);
    (nv + 3, edges, faces)
}

/// Exact coordinates for every vertex of a simple triangulation, by contracting
/// it down to its frame and re-inserting vertices one at a time.
pub fn contraction_drawing(map: &PlanarMap) -> Result<Vec<Point>> {
    let nv = map.num_vertices();
    let (total, edges, faces) = framed(map);
    let mut g = Contractor::new(total, &edges, faces);
    let mut history = Vec::with_capacity(nv);
    let mut alive: BTreeSet<usize> = (0..nv).collect();
    while !alive.is_empty() {
        let pick = alive.iter().find_map(|&u| {
            let nbrs: Vec<usize> = g.neighbours(u).collect();
            nbrs.into_iter().find(|&v| g.contractible(u, v)).map(|v| (u, v))
        });
        let (u, v) = pick.ok_or_else(|| Error::Internal("no contractible edge left".into()))?;
        history.push(g.contract(u, v));
        alive.remove(&u);
    }
    let mut pts: Vec<Option<Point>> = vec![None; total];
    pts[nv] = Some((q(0), q(0)));
    pts[nv + 1] = Some((q(-1), q(1)));
    pts[nv + 2] = Some((q(0), q(2)));
    for exp in history.iter().rev() {
        let cons = placement_region(exp, &pts);
        let placed = pts.iter().flatten();
        let xmin = placed.clone().map(|p| &p.0).min().unwrap() - q(1);
        let xmax = placed.clone().map(|p| &p.0).max().unwrap() + q(1);
        let ymin = placed.clone().map(|p| &p.1).min().unwrap() - q(1);
        let ymax = placed.map(|p| &p.1).max().unwrap() + q(1);
        let mut poly = vec![(xmin.clone(), ymin.clone()), (xmax.clone(), ymin), (xmax, ymax.clone()), (xmin, ymax)];
        for h in &cons {
            poly = clip(poly, h);
        }
        let p = interior_point(&poly).ok_or_else(|| Error::Internal(format!("no room to re-insert v{}", exp.u)))?;
        pts[exp.u] = Some(p);
    }
    Ok(pts.into_iter().take(nv).map(|p| p.expect("every vertex is re-inserted")).collect())
}

/// Upward straight-line drawing of a simple triangulation, verified before it is returned.
pub fn upward_embed(map: &PlanarMap) -> Result<Embedding> {
    map.ensure_valid()?;
    if !map.is_triangulation() {
        return Err(Error::Unsupported("unsupported for embedding: some face is not a triangle".into()));
    }
    if !map.is_simple() {
        return Err(Error::Unsupported("unsupported for embedding: map has a multiple edge".into()));
    }
    let exact = contraction_drawing(map)?;
    let violations = check_drawing(map, &exact);
    if !violations.is_empty() {
        let list: Vec<String> = violations.iter().take(5).map(|v| v.to_string()).collect();
        return Err(Error::Internal(format!(
            "embedding failed its post-check ({}); replay walk:\n{}",
            list.join("; "),
            map_to_walk(map)?.to_text()
        )));
    }
    let points = exact.iter().map(|(x, y)| (x.to_f64().unwrap_or(f64::NAN), y.to_f64().unwrap_or(f64::NAN))).collect();
    Ok(Embedding { exact: Some(exact), points, warning: None })
}

/// Longest-path layers for `y`, then repeated neighbour averaging for `x`. Not necessarily planar.
pub fn layered_layout(map: &PlanarMap) -> Result<Embedding> {
    map.ensure_valid()?;
    let nv = map.num_vertices();
    let inc = map.incidence();
    let mut layer = vec![0usize; nv];
    let mut indeg: Vec<usize> = (0..nv).map(|v| inc.inc[v].len()).collect();
    let mut order = Vec::with_capacity(nv);
    let mut stack = vec![map.south()];
    while let Some(v) = stack.pop() {
        order.push(v);
        for &e in &inc.out[v] {
            let h = map.head(e);
            layer[h] = layer[h].max(layer[v] + 1);
            indeg[h] -= 1;
            if indeg[h] == 0 {
                stack.push(h);
            }
        }
    }
    // initial x from the west-to-east position among out-edges of the parent
    let mut x = vec![0f64; nv];
    for &v in &order {
        let k = inc.out[v].len() as f64;
        for (idx, &e) in inc.out[v].iter().enumerate() {
            let h = map.head(e);
            if inc.inc[h].last() == Some(&e) {
                x[h] = x[v] + idx as f64 - (k - 1.0) / 2.0;
            }
        }
    }
    for _ in 0..50 {
        let prev = x.clone();
        for v in 0..nv {
            if v == map.south() || v == map.north() {
                continue;
            }
            let nbrs: Vec<f64> = inc.out[v].iter().map(|&e| prev[map.head(e)]).chain(inc.inc[v].iter().map(|&e| prev[map.tail(e)])).collect();
            x[v] = 0.5 * prev[v] + 0.5 * nbrs.iter().sum::<f64>() / nbrs.len() as f64;
        }
    }
    let points = (0..nv).map(|v| (x[v], layer[v] as f64)).collect();
    Ok(Embedding { exact: None, points, warning: Some("layered fallback layout: planarity not guaranteed".into()) })
}

/// `x` with six significant digits, trailing zeros removed.
pub fn fmt_sig(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return "0".into();
    }
    let mag = x.abs().log10().floor() as i32;
    let decimals = (5 - mag).max(0) as usize;
    let s = format!("{x:.decimals$}");
    let s = if s.contains('.') { s.trim_end_matches('0').trim_end_matches('.').to_string() } else { s };
    if s == "-0" {
        "0".into()
    } else {
        s
    }
}

pub struct SvgOptions {
    pub size: f64,
    pub margin: f64,
}

impl Default for SvgOptions {
    fn default() -> Self {
        SvgOptions { size: 1000.0, margin: 40.0 }
    }
}

/// SVG with the NW tree in red, the SE tree in blue and the interface path in green.
pub fn render_svg(map: &PlanarMap, emb: &Embedding, opts: &SvgOptions) -> Result<String> {
    let nw = map.nw_tree()?;
    let se = map.se_tree()?;
    let walk = map_to_walk(map)?;
    let pts = &emb.points;
    let (minx, maxx) = pts.iter().fold((f64::MAX, f64::MIN), |(a, b), p| (a.min(p.0), b.max(p.0)));
    let (miny, maxy) = pts.iter().fold((f64::MAX, f64::MIN), |(a, b), p| (a.min(p.1), b.max(p.1)));
    let span = |lo: f64, hi: f64| if hi > lo { hi - lo } else { 1.0 };
    let inner = opts.size - 2.0 * opts.margin;
    let to_svg = |p: (f64, f64)| {
        let sx = opts.margin + (p.0 - minx) / span(minx, maxx) * inner;
        // north at the top
        let sy = opts.margin + (maxy - p.1) / span(miny, maxy) * inner;
        (sx, sy)
    };
    let s: Vec<(f64, f64)> = pts.iter().map(|&p| to_svg(p)).collect();
    let f = fmt_sig;
    let mut out = String::new();
    let size = f(opts.size);
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {size} {size}\" width=\"{size}\" height=\"{size}\""
    ));
    if let Some(w) = &emb.warning {
        out.push_str(&format!(" data-warning=\"{w}\""));
    }
    out.push_str(">\n<style>.edge{stroke:#999;stroke-width:2}.nw-tree{stroke:#d62728;stroke-width:3}.se-tree{stroke:#1f77b4;stroke-width:3;stroke-dasharray:6 4}.interface{fill:none;stroke:#2ca02c;stroke-width:2}.vertex{fill:#000}</style>\n");
    let line = |class: &str, e: usize| {
        let [t, h] = map.edge(e);
        format!(
            "<line class=\"{class}\" data-edge=\"{e}\" x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\"/>\n",
            f(s[t].0),
            f(s[t].1),
            f(s[h].0),
            f(s[h].1)
        )
    };
    for e in 0..map.num_edges() {
        out.push_str(&line("edge", e));
    }
    let mut nw_edges: Vec<usize> = nw.edges().collect();
    nw_edges.sort_unstable();
    for e in nw_edges {
        out.push_str(&line("nw-tree", e));
    }
    let mut se_edges: Vec<usize> = se.edges().collect();
    se_edges.sort_unstable();
    for e in se_edges {
        out.push_str(&line("se-tree", e));
    }

    // interface: edge midpoints in walk order, passing through each crossed face's centroid
    let inc = map.incidence();
    let faces = map.interior_faces();
    let mut east_face = vec![usize::MAX; map.num_edges()];
    for (fi, face) in faces.iter().enumerate() {
        for &e in &face.west {
            east_face[e] = fi;
        }
    }
    let mid = |e: usize| {
        let [t, h] = map.edge(e);
        ((s[t].0 + s[h].0) / 2.0, (s[t].1 + s[h].1) / 2.0)
    };
    let mut e = map.west_boundary()[0];
    let mut poly = vec![mid(e)];
    let mut visited_edges = vec![e];
    let mut visited_faces = Vec::new();
    for mv in &walk.moves {
        let next = match mv {
            Move::Face(..) => {
                let fi = east_face[e];
                let face = &faces[fi];
                let verts: Vec<usize> = face.darts.iter().map(|d| map.origin(*d)).collect();
                let cx = verts.iter().map(|&v| s[v].0).sum::<f64>() / verts.len() as f64;
                let cy = verts.iter().map(|&v| s[v].1).sum::<f64>() / verts.len() as f64;
                poly.push((cx, cy));
                visited_faces.push(fi);
                face.east[0]
            }
            Move::Edge => inc.out[map.head(e)][0],
        };
        poly.push(mid(next));
        visited_edges.push(next);
        e = next;
    }
    let pts_attr: Vec<String> = poly.iter().map(|p| format!("{},{}", f(p.0), f(p.1))).collect();
    let join = |v: &[usize]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
    out.push_str(&format!(
        "<polyline class=\"interface\" data-edges=\"{}\" data-faces=\"{}\" points=\"{}\"/>\n",
        join(&visited_edges),
        join(&visited_faces),
        pts_attr.join(" ")
    ));
    for (v, p) in s.iter().enumerate() {
        out.push_str(&format!("<circle class=\"vertex\" data-vertex=\"{v}\" cx=\"{}\" cy=\"{}\" r=\"4\"/>\n", f(p.0), f(p.1)));
    }
    for (v, name) in [(map.south(), "S"), (map.north(), "N")] {
        out.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-size=\"16\">{name}</text>\n",
            f(s[v].0 + 8.0),
            f(s[v].1 + 5.0)
        ));
    }
    out.push_str("</svg>\n");
    Ok(out)
}

/// Exact drawing when supported, otherwise the layered layout if `fallback` is set.
pub fn auto_embed(map: &PlanarMap, fallback: bool) -> Result<Embedding> {
    match upward_embed(map) {
        Err(Error::Unsupported(_)) if fallback => layered_layout(map),
        other => other,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bijection::{walk_to_map, LatticeWalk};

    #[test]
    fn single_edge_and_triangle() {
        let m = walk_to_map(&LatticeWalk::new((0, 0), vec![])).unwrap();
        let e = upward_embed(&m).unwrap();
        assert_eq!(e.points.len(), 2);
        let m = walk_to_map(&LatticeWalk::new((0, 0), vec![Move::Face(0, 1), Move::Edge])).unwrap();
        let e = upward_embed(&m).unwrap();
        let p = &e.points;
        let mid = (0..3).find(|&v| v != m.south() && v != m.north()).unwrap();
        assert!(p[m.south()].1 < p[mid].1 && p[mid].1 < p[m.north()].1);
        let svg = render_svg(&m, &e, &SvgOptions::default()).unwrap();
        assert_eq!(svg.matches("class=\"edge\"").count(), 3);
        assert_eq!(svg.matches("class=\"interface\"").count(), 1);
        assert!(svg.contains("data-edges=\"0 1 2\""));
    }

    #[test]
    fn quadrangle_needs_fallback() {
        let quad = walk_to_map(&LatticeWalk::new((0, 0), vec![Move::Face(0, 2), Move::Edge, Move::Edge])).unwrap();
        assert!(!quad.is_triangulation());
        assert!(matches!(upward_embed(&quad), Err(Error::Unsupported(_))));
        let emb = auto_embed(&quad, true).unwrap();
        assert!(emb.warning.is_some());
        assert!(render_svg(&quad, &emb, &SvgOptions::default()).unwrap().contains("data-warning"));
    }

    #[test]
    fn sig_digits() {
        assert_eq!(fmt_sig(123.456789), "123.457");
        assert_eq!(fmt_sig(0.000123456789), "0.000123457");
        assert_eq!(fmt_sig(1000.0), "1000");
        assert_eq!(fmt_sig(-2.5), "-2.5");
    }
}
