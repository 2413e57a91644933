//! Convex dissection of a simple polygon by cuts between original vertices.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{
    orient_with, point_in_convex_with, seg_intersect_with, signed_area, vertex_average, Aabb, Point2, PointClass,
    Segment, SegmentIndex, SegIntersection, Tolerance,
};
use crate::map_ingest::SimplePolygon;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DecompositionError {
    #[error("input polygon is not simple")]
    NotSimple,
    #[error("vertex {0} is not reflex")]
    NotReflex(usize),
    #[error("no visible vertex from reflex vertex {0}")]
    NoViewablePoint(usize),
    #[error("bridge twins {0} and {1} ended up in the same cell")]
    BridgeInsideCell(usize, usize),
    #[error("dissection invariant violated: {0}")]
    Invariant(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeKind {
    Boundary,
    Cut(usize),
}

/// Shared edge of two cells. The directed segment `a → b` has `left_poly`
/// on its left.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cutline {
    pub id: usize,
    pub a: Point2,
    pub b: Point2,
    pub left_poly: usize,
    pub right_poly: usize,
    /// Whether the cutline replaces a hole bridge.
    pub bridge: bool,
}

impl Cutline {
    pub fn segment(&self) -> Segment {
        Segment { a: self.a, b: self.b }
    }

    pub fn at(&self, t: f64) -> Point2 {
        self.a.lerp(self.b, t)
    }

    pub fn midpoint(&self) -> Point2 {
        self.a.midpoint(self.b)
    }

    pub fn length(&self) -> f64 {
        self.a.dist(self.b)
    }

    /// The cell across this cutline from `cell`.
    pub fn other(&self, cell: usize) -> usize {
        if cell == self.left_poly {
            self.right_poly
        } else {
            self.left_poly
        }
    }

    pub fn borders(&self, cell: usize) -> bool {
        self.left_poly == cell || self.right_poly == cell
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvexCell {
    pub id: usize,
    /// Counter-clockwise.
    pub vertices: Vec<Point2>,
    /// Kind of edge `k`, from vertex `k` to vertex `k + 1`.
    pub edges: Vec<EdgeKind>,
    pub cutline_ids: Vec<usize>,
    pub centroid: Point2,
    pub component: usize,
}

impl ConvexCell {
    pub fn area(&self) -> f64 {
        signed_area(&self.vertices)
    }

    pub fn edge(&self, k: usize) -> Segment {
        Segment {
            a: self.vertices[k],
            b: self.vertices[(k + 1) % self.vertices.len()],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentInfo {
    pub id: usize,
    pub area: f64,
    pub holes: usize,
    pub vertex_count: usize,
    pub first_cell: usize,
    pub cell_count: usize,
}

/// Cells and cutlines of one or more components, with lookup structures for
/// point location.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(from = "DissectionData", into = "DissectionData")]
pub struct DissectionMap {
    pub cells: Vec<ConvexCell>,
    pub cutlines: Vec<Cutline>,
    pub components: Vec<ComponentInfo>,
    tol: Tolerance,
    bbox: Aabb,
    locator: CellLocator,
    at_vertex: HashMap<(u64, u64), Vec<usize>>,
}

#[derive(Serialize, Deserialize)]
struct DissectionData {
    cells: Vec<ConvexCell>,
    cutlines: Vec<Cutline>,
    components: Vec<ComponentInfo>,
}

impl From<DissectionData> for DissectionMap {
    fn from(d: DissectionData) -> Self {
        DissectionMap::new(d.cells, d.cutlines, d.components)
    }
}

impl From<DissectionMap> for DissectionData {
    fn from(m: DissectionMap) -> Self {
        DissectionData {
            cells: m.cells,
            cutlines: m.cutlines,
            components: m.components,
        }
    }
}

pub(crate) fn vkey(p: Point2) -> (u64, u64) {
    // normalise -0.0 so equal coordinates hash equally
    ((p.x + 0.0).to_bits(), (p.y + 0.0).to_bits())
}

impl DissectionMap {
    pub fn new(cells: Vec<ConvexCell>, cutlines: Vec<Cutline>, components: Vec<ComponentInfo>) -> Self {
        let bbox = Aabb::from_points(cells.iter().flat_map(|c| c.vertices.iter())).unwrap_or(Aabb {
            min: Point2::default(),
            max: Point2::new(1.0, 1.0),
        });
        let tol = Tolerance::from_diagonal(bbox.diagonal());
        let locator = CellLocator::new(&cells, bbox, tol.eps);
        let mut at_vertex: HashMap<(u64, u64), Vec<usize>> = HashMap::new();
        for c in &cells {
            for v in &c.vertices {
                let e = at_vertex.entry(vkey(*v)).or_default();
                if e.last() != Some(&c.id) {
                    e.push(c.id);
                }
            }
        }
        for list in at_vertex.values_mut() {
            list.sort_unstable();
            list.dedup();
        }
        DissectionMap {
            cells,
            cutlines,
            components,
            tol,
            bbox,
            locator,
            at_vertex,
        }
    }

    /// Concatenates per-component dissections, renumbering cells and
    /// cutlines.
    pub fn combine(parts: Vec<DissectionMap>) -> DissectionMap {
        let mut cells = Vec::new();
        let mut cutlines = Vec::new();
        let mut components = Vec::new();
        for part in parts {
            let (co, lo) = (cells.len(), cutlines.len());
            for mut c in part.cells {
                c.id += co;
                for e in &mut c.edges {
                    if let EdgeKind::Cut(id) = e {
                        *id += lo;
                    }
                }
                for id in &mut c.cutline_ids {
                    *id += lo;
                }
                cells.push(c);
            }
            for mut l in part.cutlines {
                l.id += lo;
                l.left_poly += co;
                l.right_poly += co;
                cutlines.push(l);
            }
            for mut info in part.components {
                info.first_cell += co;
                components.push(info);
            }
        }
        DissectionMap::new(cells, cutlines, components)
    }

    pub fn tolerance(&self) -> Tolerance {
        self.tol
    }

    pub fn bbox(&self) -> Aabb {
        self.bbox
    }

    pub fn cell(&self, id: usize) -> &ConvexCell {
        &self.cells[id]
    }

    pub fn cutline(&self, id: usize) -> &Cutline {
        &self.cutlines[id]
    }

    /// Cells having a vertex at exactly `p`.
    pub fn cells_at_vertex(&self, p: Point2) -> &[usize] {
        self.at_vertex.get(&vkey(p)).map_or(&[], |v| v.as_slice())
    }

    pub fn classify(&self, cell: usize, p: Point2) -> PointClass {
        point_in_convex_with(&self.cells[cell].vertices, p, self.tol)
    }

    /// Candidate cells whose bounding boxes contain `p`, ascending.
    pub fn cells_near(&self, p: Point2) -> &[u32] {
        self.locator.bucket(p)
    }

    pub fn total_area(&self) -> f64 {
        self.cells.iter().map(|c| c.area()).sum()
    }

    pub fn component_of_cell(&self, cell: usize) -> usize {
        self.cells[cell].component
    }

    /// Checks convexity, area conservation and cutline bookkeeping.
    pub fn validate(&self) -> Result<(), DecompositionError> {
        let err = |s: String| Err(DecompositionError::Invariant(s));
        for c in &self.cells {
            let n = c.vertices.len();
            if n < 3 || c.area() <= 0.0 {
                return err(format!("cell {} degenerate", c.id));
            }
            for i in 0..n {
                if orient_with(c.vertices[(i + n - 1) % n], c.vertices[i], c.vertices[(i + 1) % n], self.tol) < 0 {
                    return err(format!("cell {} reflex at vertex {i}", c.id));
                }
            }
            if self.classify(c.id, c.centroid) != PointClass::Interior {
                return err(format!("cell {} centroid not interior", c.id));
            }
        }
        let mut seen = vec![0usize; self.cutlines.len()];
        for c in &self.cells {
            for (k, e) in c.edges.iter().enumerate() {
                if let EdgeKind::Cut(id) = *e {
                    let l = &self.cutlines[id];
                    if !l.borders(c.id) {
                        return err(format!("cell {} edge {k} names foreign cutline {id}", c.id));
                    }
                    seen[id] += 1;
                }
            }
        }
        for l in &self.cutlines {
            if l.left_poly == l.right_poly {
                return err(format!("cutline {} borders one cell twice", l.id));
            }
            if seen[l.id] < 2 {
                return err(format!("cutline {} used by {} cell edges", l.id, seen[l.id]));
            }
        }
        for info in &self.components {
            let sum: f64 = self.cells[info.first_cell..info.first_cell + info.cell_count]
                .iter()
                .map(|c| c.area())
                .sum();
            if (sum - info.area).abs() > 1e-6 * info.area.max(1.0) {
                return err(format!("component {} area {sum} != {}", info.id, info.area));
            }
        }
        Ok(())
    }
}

/// Uniform buckets of cell ids by bounding box.
#[derive(Debug, Clone)]
struct CellLocator {
    origin: Point2,
    cell: f64,
    cols: usize,
    rows: usize,
    buckets: Vec<Vec<u32>>,
}

impl CellLocator {
    fn new(cells: &[ConvexCell], bbox: Aabb, pad: f64) -> Self {
        let w = bbox.width().max(1e-9);
        let h = bbox.height().max(1e-9);
        let n = cells.len().max(1) as f64;
        let size = ((w * h) / (4.0 * n)).sqrt().max(w.max(h) / 1024.0);
        let cols = ((w / size).ceil() as usize).max(1);
        let rows = ((h / size).ceil() as usize).max(1);
        let mut loc = CellLocator {
            origin: bbox.min,
            cell: size,
            cols,
            rows,
            buckets: vec![Vec::new(); cols * rows],
        };
        for c in cells {
            let b = Aabb::from_points(&c.vertices).unwrap();
            let (c0, r0) = loc.idx(Point2::new(b.min.x - pad, b.min.y - pad));
            let (c1, r1) = loc.idx(Point2::new(b.max.x + pad, b.max.y + pad));
            for r in r0..=r1 {
                for col in c0..=c1 {
                    loc.buckets[r * cols + col].push(c.id as u32);
                }
            }
        }
        loc
    }

    fn idx(&self, p: Point2) -> (usize, usize) {
        let f = |v: f64, o: f64, n: usize| {
            let k = ((v - o) / self.cell).floor();
            if k <= 0.0 {
                0
            } else {
                (k as usize).min(n - 1)
            }
        };
        (f(p.x, self.origin.x, self.cols), f(p.y, self.origin.y, self.rows))
    }

    fn bucket(&self, p: Point2) -> &[u32] {
        let (c, r) = self.idx(p);
        &self.buckets[r * self.cols + c]
    }
}

/// Reflex vertex indices in processing-stack order: ordinary vertices
/// ascending, then vertices touching a bridge (popped first).
pub fn find_concave(poly: &SimplePolygon) -> Vec<usize> {
    let tol = poly.tolerance();
    let v = &poly.vertices;
    let n = v.len();
    let bridge = poly.bridge_vertices();
    let reflex = |i: usize| orient_with(v[(i + n - 1) % n], v[i], v[(i + 1) % n], tol) < 0;
    let mut plain: Vec<usize> = (0..n).filter(|&i| reflex(i) && bridge.binary_search(&i).is_err()).collect();
    plain.extend(bridge.iter().copied().filter(|&i| reflex(i)));
    plain
}

fn ccw_angle(u: Point2, v: Point2) -> f64 {
    let a = u.cross(v).atan2(u.dot(v));
    if a < 0.0 {
        a + std::f64::consts::TAU
    } else {
        a
    }
}

/// Sub-angles a cut towards `d` creates at a vertex with outgoing edge
/// direction `next` and incoming edge reversed `prev`.
fn split_angles(next: Point2, prev: Point2, d: Point2) -> (f64, f64) {
    let theta = ccw_angle(next, prev);
    let a1 = ccw_angle(next, d);
    (a1, theta - a1)
}

fn balance(a1: f64, a2: f64) -> f64 {
    let (lo, hi) = (a1.min(a2), a1.max(a2));
    if hi <= 0.0 {
        0.0
    } else {
        lo / hi
    }
}

struct Decomposer<'a> {
    pts: &'a [Point2],
    tol: Tolerance,
    index: SegmentIndex,
    subs: Vec<Option<Vec<usize>>>,
    owners: Vec<Vec<usize>>,
    cands: Vec<usize>,
}

impl<'a> Decomposer<'a> {
    fn new(poly: &'a SimplePolygon) -> Self {
        let pts = &poly.vertices;
        let n = pts.len();
        let tol = poly.tolerance();
        let bbox = Aabb::from_points(pts).unwrap();
        let mut index = SegmentIndex::new(bbox, 2 * n, tol.eps);
        for i in 0..n {
            index.insert(poly.edge(i));
        }
        Decomposer {
            pts,
            tol,
            index,
            subs: vec![Some((0..n).collect())],
            owners: vec![vec![0]; n],
            cands: Vec::new(),
        }
    }

    fn around(&self, sub: &[usize], pos: usize) -> (Point2, Point2, Point2) {
        let m = sub.len();
        (
            self.pts[sub[(pos + m - 1) % m]],
            self.pts[sub[pos]],
            self.pts[sub[(pos + 1) % m]],
        )
    }

    fn is_reflex(&self, sub: &[usize], pos: usize) -> bool {
        let (p, v, n) = self.around(sub, pos);
        orient_with(p, v, n, self.tol) < 0
    }

    /// Whether the open segment between sub positions `i` and `j` lies in
    /// the interior of the sub-polygon.
    fn visible(&mut self, sub: &[usize], i: usize, j: usize) -> bool {
        let m = sub.len();
        if i == j || (i + 1) % m == j || (j + 1) % m == i {
            return false;
        }
        let (ap, a, an) = self.around(sub, i);
        let (wp, w, wn) = self.around(sub, j);
        if a == w {
            return false;
        }
        if !crate::map_ingest::in_cone(ap, a, an, w - a, self.tol)
            || !crate::map_ingest::in_cone(wp, w, wn, a - w, self.tol)
        {
            return false;
        }
        let seg = Segment { a, b: w };
        let mut cands = std::mem::take(&mut self.cands);
        self.index.candidates(&seg, &mut cands);
        let ok = cands.iter().all(|&c| match seg_intersect_with(&seg, self.index.segment(c), self.tol) {
            SegIntersection::None => true,
            SegIntersection::Touch(p) => p == a || p == w,
            _ => false,
        });
        self.cands = cands;
        ok
    }

    /// Picks the cut for the reflex vertex at sub position `i`. Candidates
    /// inside the reflex cone win; otherwise any visible vertex is used.
    fn weight_cut(&mut self, sub: &[usize], i: usize) -> Option<(usize, bool)> {
        let (p, a, n) = self.around(sub, i);
        let (dn, dp) = (n - a, p - a);
        let o = Point2::default();
        let mut ranked: Vec<(bool, i64, f64, usize, usize)> = Vec::with_capacity(sub.len());
        for (j, &w) in sub.iter().enumerate() {
            let d = self.pts[w] - a;
            if d == o {
                continue;
            }
            let in_cone = orient_with(o, dn, d, self.tol) >= 0 && orient_with(o, d, dp, self.tol) >= 0;
            let (a1, a2) = split_angles(dn, dp, d);
            let q = (balance(a1, a2) * 1e9).round() as i64;
            ranked.push((in_cone, q, d.norm(), w, j));
        }
        ranked.sort_by(|x, y| {
            y.0.cmp(&x.0)
                .then(y.1.cmp(&x.1))
                .then(x.2.total_cmp(&y.2))
                .then(x.3.cmp(&y.3))
        });
        ranked
            .into_iter()
            .find(|&(_, _, _, _, j)| self.visible(sub, i, j))
            .map(|(c, _, _, _, j)| (j, c))
    }

    fn split(&mut self, sid: usize, i: usize, j: usize) -> (usize, usize) {
        let sub = self.subs[sid].take().unwrap();
        let (lo, hi) = (i.min(j), i.max(j));
        let p1: Vec<usize> = sub[lo..=hi].to_vec();
        let mut p2: Vec<usize> = sub[hi..].to_vec();
        p2.extend_from_slice(&sub[..=lo]);
        for &v in &sub {
            self.owners[v].retain(|&s| s != sid);
        }
        let id1 = self.subs.len();
        let id2 = id1 + 1;
        for &v in &p1 {
            self.owners[v].push(id1);
        }
        for &v in &p2 {
            self.owners[v].push(id2);
        }
        self.subs.push(Some(p1));
        self.subs.push(Some(p2));
        self.index.insert(Segment {
            a: self.pts[sub[i]],
            b: self.pts[sub[j]],
        });
        (id1, id2)
    }

    /// Sub-polygon and position where vertex `v` is reflex.
    fn reflex_home(&self, v: usize) -> Option<(usize, usize)> {
        self.owners[v].iter().find_map(|&s| {
            let sub = self.subs[s].as_ref()?;
            let pos = sub.iter().position(|&x| x == v)?;
            self.is_reflex(sub, pos).then_some((s, pos))
        })
    }
}

/// Vertices visible from reflex vertex `v` whose cut resolves the reflex
/// angle.
pub fn viewable_points(poly: &SimplePolygon, v: usize) -> Result<Vec<usize>, DecompositionError> {
    let mut d = Decomposer::new(poly);
    let sub: Vec<usize> = (0..poly.vertices.len()).collect();
    if !d.is_reflex(&sub, v) {
        return Err(DecompositionError::NotReflex(v));
    }
    let (p, a, n) = d.around(&sub, v);
    let o = Point2::default();
    let tol = d.tol;
    let out: Vec<usize> = (0..sub.len())
        .filter(|&j| {
            let dir = d.pts[j] - a;
            orient_with(o, n - a, dir, tol) >= 0 && orient_with(o, dir, p - a, tol) >= 0 && d.visible(&sub, v, j)
        })
        .collect();
    if out.is_empty() {
        return Err(DecompositionError::NoViewablePoint(v));
    }
    Ok(out)
}

/// Balanced-angle choice among `candidates` for reflex vertex `v`. Returns
/// the chosen vertex and the cut's endpoints that are reflex in either
/// resulting piece.
pub fn weight_cut(poly: &SimplePolygon, v: usize, candidates: &[usize]) -> Option<(usize, Vec<usize>)> {
    let pts = &poly.vertices;
    let n = pts.len();
    let (p, a, nx) = (pts[(v + n - 1) % n], pts[v], pts[(v + 1) % n]);
    let best = candidates.iter().copied().max_by(|&x, &y| {
        let bx = split_angles(nx - a, p - a, pts[x] - a);
        let by = split_angles(nx - a, p - a, pts[y] - a);
        let qx = (balance(bx.0, bx.1) * 1e9).round() as i64;
        let qy = (balance(by.0, by.1) * 1e9).round() as i64;
        qx.cmp(&qy)
            .then(a.dist(pts[y]).total_cmp(&a.dist(pts[x])))
            .then(y.cmp(&x))
    })?;
    let tol = poly.tolerance();
    let (lo, hi) = (v.min(best), v.max(best));
    let p1: Vec<usize> = (lo..=hi).collect();
    let p2: Vec<usize> = (hi..n).chain(0..=lo).collect();
    let mut new_reflex = Vec::new();
    for sub in [&p1, &p2] {
        let m = sub.len();
        for (pos, &x) in sub.iter().enumerate() {
            if x != v && x != best {
                continue;
            }
            let r = orient_with(pts[sub[(pos + m - 1) % m]], pts[x], pts[sub[(pos + 1) % m]], tol) < 0;
            if r && !new_reflex.contains(&x) {
                new_reflex.push(x);
            }
        }
    }
    Some((best, new_reflex))
}

/// Convex dissection of one simple polygon.
pub fn decompose(poly: &SimplePolygon) -> Result<DissectionMap, DecompositionError> {
    poly.check_simple().map_err(|_| DecompositionError::NotSimple)?;
    let mut d = Decomposer::new(poly);
    let mut stack = find_concave(poly);
    while let Some(v) = stack.pop() {
        let Some((sid, pos)) = d.reflex_home(v) else { continue };
        let sub = d.subs[sid].clone().unwrap();
        let (j, in_cone) = d.weight_cut(&sub, pos).ok_or(DecompositionError::NoViewablePoint(v))?;
        let w = sub[j];
        let (s1, s2) = d.split(sid, pos, j);
        if !in_cone {
            stack.push(v);
        }
        for x in [w, v] {
            let still = [s1, s2].iter().any(|&s| {
                let sub = d.subs[s].as_ref().unwrap();
                sub.iter().position(|&y| y == x).is_some_and(|p| d.is_reflex(sub, p))
            });
            if still && stack.last() != Some(&x) {
                stack.push(x);
            }
        }
    }
    let subs: Vec<Vec<usize>> = d.subs.into_iter().flatten().collect();
    assemble(poly, subs)
}

fn assemble(poly: &SimplePolygon, subs: Vec<Vec<usize>>) -> Result<DissectionMap, DecompositionError> {
    let pts = &poly.vertices;
    let n = pts.len();
    let tol = poly.tolerance();
    let mut bridge_twin: HashMap<usize, usize> = HashMap::new();
    for &(i, j) in &poly.bridges {
        bridge_twin.insert(i, j);
        bridge_twin.insert(j, i);
    }
    // (cell, edge position) of every polygon edge and every cut
    let mut edge_home: HashMap<usize, (usize, usize)> = HashMap::new();
    let mut cut_sides: HashMap<(usize, usize), Vec<(usize, usize)>> = HashMap::new();
    for (c, sub) in subs.iter().enumerate() {
        let m = sub.len();
        for k in 0..m {
            let (u, v) = (sub[k], sub[(k + 1) % m]);
            if v == (u + 1) % n {
                edge_home.insert(u, (c, k));
            } else {
                cut_sides.entry((u.min(v), u.max(v))).or_default().push((c, k));
            }
        }
    }

    let mut cells: Vec<ConvexCell> = subs
        .iter()
        .enumerate()
        .map(|(c, sub)| {
            let vertices: Vec<Point2> = sub.iter().map(|&i| pts[i]).collect();
            ConvexCell {
                id: c,
                centroid: vertex_average(&vertices),
                edges: vec![EdgeKind::Boundary; vertices.len()],
                vertices,
                cutline_ids: Vec::new(),
                component: poly.component,
            }
        })
        .collect();
    let mut cutlines: Vec<Cutline> = Vec::new();

    let mut keys: Vec<(usize, usize)> = cut_sides.keys().copied().collect();
    keys.sort_unstable();
    for key in keys {
        let sides = &cut_sides[&key];
        if sides.len() != 2 {
            return Err(DecompositionError::Invariant(format!(
                "cut {key:?} bordered by {} cells",
                sides.len()
            )));
        }
        let (c1, k1) = sides[0];
        let (c2, k2) = sides[1];
        let id = cutlines.len();
        cutlines.push(Cutline {
            id,
            a: cells[c1].vertices[k1],
            b: cells[c1].vertices[(k1 + 1) % cells[c1].vertices.len()],
            left_poly: c1,
            right_poly: c2,
            bridge: false,
        });
        cells[c1].edges[k1] = EdgeKind::Cut(id);
        cells[c2].edges[k2] = EdgeKind::Cut(id);
    }
    for &(i, j) in &poly.bridges {
        let (c1, k1) = edge_home[&i];
        let (c2, k2) = edge_home[&j];
        if c1 == c2 {
            return Err(DecompositionError::BridgeInsideCell(i, j));
        }
        let id = cutlines.len();
        cutlines.push(Cutline {
            id,
            a: pts[i],
            b: pts[(i + 1) % n],
            left_poly: c1,
            right_poly: c2,
            bridge: true,
        });
        cells[c1].edges[k1] = EdgeKind::Cut(id);
        cells[c2].edges[k2] = EdgeKind::Cut(id);
    }
    let cutlines = merge_collinear(&mut cells, cutlines, tol);
    for c in &mut cells {
        let mut ids: Vec<usize> = c
            .edges
            .iter()
            .filter_map(|e| match e {
                EdgeKind::Cut(id) => Some(*id),
                EdgeKind::Boundary => None,
            })
            .collect();
        ids.sort_unstable();
        ids.dedup();
        c.cutline_ids = ids;
    }
    let info = ComponentInfo {
        id: poly.component,
        area: poly.area(),
        holes: poly.holes,
        vertex_count: n,
        first_cell: 0,
        cell_count: cells.len(),
    };
    Ok(DissectionMap::new(cells, cutlines, vec![info]))
}

/// Joins collinear cutlines that share an endpoint and the same cell pair.
fn merge_collinear(cells: &mut [ConvexCell], mut cutlines: Vec<Cutline>, tol: Tolerance) -> Vec<Cutline> {
    let mut alias: Vec<usize> = (0..cutlines.len()).collect();
    let find = |alias: &Vec<usize>, mut x: usize| {
        while alias[x] != x {
            x = alias[x];
        }
        x
    };
    let mut by_pair: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
    for l in &cutlines {
        let pair = (l.left_poly.min(l.right_poly), l.left_poly.max(l.right_poly));
        by_pair.entry(pair).or_default().push(l.id);
    }
    let mut pairs: Vec<_> = by_pair.into_iter().filter(|(_, v)| v.len() > 1).collect();
    pairs.sort();
    for (_, ids) in pairs {
        let mut changed = true;
        while changed {
            changed = false;
            for x in 0..ids.len() {
                for y in x + 1..ids.len() {
                    let (rx, ry) = (find(&alias, ids[x]), find(&alias, ids[y]));
                    if rx == ry {
                        continue;
                    }
                    let (s, t) = (cutlines[rx].clone(), cutlines[ry].clone());
                    let shared = [s.a, s.b].into_iter().find(|p| *p == t.a || *p == t.b);
                    let Some(mid) = shared else { continue };
                    let s_far = if s.a == mid { s.b } else { s.a };
                    let t_far = if t.a == mid { t.b } else { t.a };
                    if orient_with(s_far, mid, t_far, tol) != 0 {
                        continue;
                    }
                    // keep the lower id, spanning both far endpoints with
                    // the original left/right orientation
                    let (keep, gone) = (rx.min(ry), rx.max(ry));
                    let k = &cutlines[keep];
                    let dir = k.b - k.a;
                    let (mut a, mut b) = (s_far, t_far);
                    if (b - a).dot(dir) < 0.0 {
                        std::mem::swap(&mut a, &mut b);
                    }
                    cutlines[keep].a = a;
                    cutlines[keep].b = b;
                    alias[gone] = keep;
                    changed = true;
                }
            }
        }
    }
    let mut remap = vec![usize::MAX; cutlines.len()];
    let mut out = Vec::new();
    for (i, l) in cutlines.iter().enumerate() {
        if find(&alias, i) == i {
            remap[i] = out.len();
            let mut l = l.clone();
            l.id = out.len();
            out.push(l);
        }
    }
    for c in cells.iter_mut() {
        for e in &mut c.edges {
            if let EdgeKind::Cut(id) = e {
                *id = remap[find(&alias, *id)];
            }
        }
    }
    out
}
