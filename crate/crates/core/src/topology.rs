//! Topology graph over cells, path encoding and reduction.

use std::collections::VecDeque;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::decomposition::{DissectionMap, EdgeKind};
use crate::geometry::{point_segment_distance, Point2, PointClass, Polyline};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TopologyError {
    #[error("point ({0}, {1}) is not in free space")]
    NotInFreeSpace(f64, f64),
    #[error("polyline leaves free space on segment {segment}")]
    LeavesFreeSpace { segment: usize },
    #[error("nodes {0} and {1} are not adjacent")]
    NotAdjacent(usize, usize),
    #[error("node {0} does not exist")]
    UnknownNode(usize),
    #[error("paths do not share endpoints")]
    EndpointMismatch,
    #[error("product junction mismatch: {0} vs {1}")]
    JunctionMismatch(usize, usize),
    #[error("empty path")]
    Empty,
    #[error("malformed code: {0}")]
    Malformed(String),
}

/// One node per cell, one edge per cutline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(from = "GraphData", into = "GraphData")]
pub struct TopologyGraph {
    pub nodes: usize,
    /// Endpoints of cutline `i`.
    pub edges: Vec<(usize, usize)>,
    adj: Vec<Vec<(usize, usize)>>,
}

#[derive(Serialize, Deserialize)]
struct GraphData {
    nodes: usize,
    edges: Vec<(usize, usize)>,
}

impl From<GraphData> for TopologyGraph {
    fn from(d: GraphData) -> Self {
        TopologyGraph::from_edges(d.nodes, d.edges)
    }
}

impl From<TopologyGraph> for GraphData {
    fn from(g: TopologyGraph) -> Self {
        GraphData {
            nodes: g.nodes,
            edges: g.edges,
        }
    }
}

impl TopologyGraph {
    pub fn from_edges(nodes: usize, edges: Vec<(usize, usize)>) -> Self {
        let mut adj = vec![Vec::new(); nodes];
        for (id, &(a, b)) in edges.iter().enumerate() {
            adj[a].push((b, id));
            adj[b].push((a, id));
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        TopologyGraph { nodes, edges, adj }
    }

    /// `(neighbour, cutline)` pairs sorted by neighbour.
    pub fn neighbors(&self, n: usize) -> &[(usize, usize)] {
        &self.adj[n]
    }

    /// Number of distinct neighbours.
    pub fn degree(&self, n: usize) -> usize {
        let mut d = 0;
        let mut last = usize::MAX;
        for &(m, _) in &self.adj[n] {
            if m != last {
                d += 1;
                last = m;
            }
        }
        d
    }

    /// Lowest cutline id joining `a` and `b`.
    pub fn edge_between(&self, a: usize, b: usize) -> Option<usize> {
        self.adj
            .get(a)?
            .iter()
            .filter(|&&(m, _)| m == b)
            .map(|&(_, e)| e)
            .min()
    }

    pub fn is_adjacent(&self, a: usize, b: usize) -> bool {
        self.edge_between(a, b).is_some()
    }
}

pub fn build_graph(dm: &DissectionMap) -> TopologyGraph {
    let edges = dm.cutlines.iter().map(|l| (l.left_poly, l.right_poly)).collect();
    TopologyGraph::from_edges(dm.cells.len(), edges)
}

/// Node sequence with the cutline crossed at each step (`None` for a
/// stutter step `(x, x)` or when unknown).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TopoPath {
    pub nodes: Vec<usize>,
    pub edges: Vec<Option<usize>>,
}

impl TopoPath {
    pub fn single(n: usize) -> Self {
        TopoPath {
            nodes: vec![n],
            edges: Vec::new(),
        }
    }

    /// Path over `nodes`, filling in the lowest cutline id for each step.
    pub fn from_nodes(g: &TopologyGraph, nodes: &[usize]) -> Result<Self, TopologyError> {
        if nodes.is_empty() {
            return Err(TopologyError::Empty);
        }
        let mut edges = Vec::with_capacity(nodes.len() - 1);
        for w in nodes.windows(2) {
            if w[0] >= g.nodes || w[1] >= g.nodes {
                return Err(TopologyError::UnknownNode(w[0].max(w[1])));
            }
            if w[0] == w[1] {
                edges.push(None);
            } else {
                edges.push(Some(g.edge_between(w[0], w[1]).ok_or(TopologyError::NotAdjacent(w[0], w[1]))?));
            }
        }
        Ok(TopoPath {
            nodes: nodes.to_vec(),
            edges,
        })
    }

    pub fn start(&self) -> usize {
        self.nodes[0]
    }

    pub fn end(&self) -> usize {
        *self.nodes.last().unwrap()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn validate(&self, g: &TopologyGraph) -> Result<(), TopologyError> {
        if self.nodes.is_empty() {
            return Err(TopologyError::Empty);
        }
        if self.edges.len() + 1 != self.nodes.len() {
            return Err(TopologyError::Malformed("edge count".into()));
        }
        for (k, w) in self.nodes.windows(2).enumerate() {
            if w[0] >= g.nodes || w[1] >= g.nodes {
                return Err(TopologyError::UnknownNode(w[0].max(w[1])));
            }
            match self.edges[k] {
                None if w[0] == w[1] => {}
                None if g.is_adjacent(w[0], w[1]) => {}
                Some(e) if g.edges.get(e).is_some_and(|&(a, b)| (a, b) == (w[0], w[1]) || (b, a) == (w[0], w[1])) => {}
                _ => return Err(TopologyError::NotAdjacent(w[0], w[1])),
            }
        }
        Ok(())
    }

    /// Positions `i` where a contraction applies: `(x, x)` at `i, i+1` or
    /// `(x, y, x)` at `i, i+1, i+2`.
    pub fn contraction_sites(&self) -> Vec<usize> {
        let n = &self.nodes;
        (0..n.len().saturating_sub(1))
            .filter(|&i| n[i] == n[i + 1] || (i + 2 < n.len() && n[i] == n[i + 2]))
            .collect()
    }

    /// Applies one contraction at `i`; returns false if none applies there.
    pub fn contract_at(&mut self, i: usize) -> bool {
        let n = &self.nodes;
        if i + 1 < n.len() && n[i] == n[i + 1] {
            self.nodes.remove(i + 1);
            self.edges.remove(i);
            true
        } else if i + 2 < n.len() && n[i] == n[i + 2] {
            self.nodes.drain(i + 1..i + 3);
            self.edges.drain(i..i + 2);
            true
        } else {
            false
        }
    }

    /// Replaces node `i` by `(x, y, x)`, or by `(x, x)` when `y` is `None`.
    pub fn extend_at(&mut self, g: &TopologyGraph, i: usize, y: Option<usize>) -> Result<(), TopologyError> {
        let x = self.nodes[i];
        match y {
            None => {
                self.nodes.insert(i + 1, x);
                self.edges.insert(i, None);
            }
            Some(y) => {
                let e = g.edge_between(x, y).ok_or(TopologyError::NotAdjacent(x, y))?;
                self.nodes.splice(i + 1..i + 1, [y, x]);
                self.edges.splice(i..i, [Some(e), Some(e)]);
            }
        }
        Ok(())
    }

    pub fn has_repeated_node(&self) -> bool {
        let mut seen: Vec<usize> = self.nodes.clone();
        seen.sort_unstable();
        seen.windows(2).any(|w| w[0] == w[1])
    }

    pub fn is_no_rollback(&self) -> bool {
        self.contraction_sites().is_empty()
    }
}

/// Fully reduced path; the homotopy-class key. Equality and hashing look at
/// the node sequence only.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CdtCode(TopoPath);

impl CdtCode {
    pub fn path(&self) -> &TopoPath {
        &self.0
    }

    pub fn nodes(&self) -> &[usize] {
        &self.0.nodes
    }

    pub fn start(&self) -> usize {
        self.0.start()
    }

    pub fn end(&self) -> usize {
        self.0.end()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Cutline crossed at each step, filling gaps from `g`.
    pub fn cutlines(&self, g: &TopologyGraph) -> Vec<usize> {
        self.0
            .nodes
            .windows(2)
            .zip(&self.0.edges)
            .map(|(w, e)| e.unwrap_or_else(|| g.edge_between(w[0], w[1]).expect("adjacent")))
            .collect()
    }

    /// Reads the text form and checks it against `g`.
    pub fn parse_in(s: &str, g: &TopologyGraph) -> Result<CdtCode, TopologyError> {
        let raw: CdtCode = s.parse()?;
        let path = TopoPath::from_nodes(g, raw.nodes())?;
        if !path.is_no_rollback() {
            return Err(TopologyError::Malformed(format!("{s} is not reduced")));
        }
        Ok(CdtCode(path))
    }
}

impl PartialEq for CdtCode {
    fn eq(&self, other: &Self) -> bool {
        self.0.nodes == other.0.nodes
    }
}

impl Eq for CdtCode {}

impl Hash for CdtCode {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.0.nodes.hash(state)
    }
}

impl fmt::Display for CdtCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, n) in self.0.nodes.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{n}")?;
        }
        Ok(())
    }
}

/// Parses `"7,3,12"`. Edge ids are left unknown; use
/// [`CdtCode::parse_in`] to validate against a graph.
impl FromStr for CdtCode {
    type Err = TopologyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let nodes: Vec<usize> = s
            .split(',')
            .map(|t| t.trim().parse::<usize>())
            .collect::<Result<_, _>>()
            .map_err(|e| TopologyError::Malformed(format!("{s:?}: {e}")))?;
        if nodes.is_empty() {
            return Err(TopologyError::Empty);
        }
        let edges = vec![None; nodes.len() - 1];
        let path = TopoPath { nodes, edges };
        if !path.is_no_rollback() {
            return Err(TopologyError::Malformed(format!("{s} is not reduced")));
        }
        Ok(CdtCode(path))
    }
}

/// Stack pass removing `(x, x)` and `(x, y, x)` windows.
pub fn reduce(t: &TopoPath) -> CdtCode {
    let mut nodes: Vec<usize> = Vec::with_capacity(t.nodes.len());
    let mut edges: Vec<Option<usize>> = Vec::with_capacity(t.edges.len());
    for (k, &y) in t.nodes.iter().enumerate() {
        let top = nodes.len();
        if top > 0 && nodes[top - 1] == y {
            continue;
        }
        if top > 1 && nodes[top - 2] == y {
            nodes.pop();
            edges.pop();
            continue;
        }
        if top > 0 {
            edges.push(t.edges[k - 1]);
        }
        nodes.push(y);
    }
    CdtCode(TopoPath { nodes, edges })
}

/// Concatenation dropping the shared junction node.
pub fn product(f: &TopoPath, g: &TopoPath) -> Result<TopoPath, TopologyError> {
    if f.end() != g.start() {
        return Err(TopologyError::JunctionMismatch(f.end(), g.start()));
    }
    let mut out = f.clone();
    out.nodes.extend_from_slice(&g.nodes[1..]);
    out.edges.extend_from_slice(&g.edges);
    Ok(out)
}

pub fn inverse(f: &TopoPath) -> TopoPath {
    let mut out = f.clone();
    out.nodes.reverse();
    out.edges.reverse();
    out
}

pub fn homotopic(c1: &CdtCode, c2: &CdtCode) -> Result<bool, TopologyError> {
    if c1.start() != c2.start() || c1.end() != c2.end() {
        return Err(TopologyError::EndpointMismatch);
    }
    Ok(c1 == c2)
}

/// Lowest-id cell that does not classify `p` as exterior.
pub fn locate(dm: &DissectionMap, p: Point2) -> Result<usize, TopologyError> {
    dm.cells_near(p)
        .iter()
        .map(|&c| c as usize)
        .find(|&c| dm.classify(c, p) != PointClass::Exterior)
        .ok_or(TopologyError::NotInFreeSpace(p.x, p.y))
}

/// Decoder: centroid to cutline midpoint to next centroid per step.
pub fn gamma_g(dm: &DissectionMap, g: &TopologyGraph, t: &TopoPath) -> Polyline {
    let mut pts = vec![dm.cell(t.start()).centroid];
    for (k, w) in t.nodes.windows(2).enumerate() {
        if w[0] == w[1] {
            continue;
        }
        let e = t.edges[k].unwrap_or_else(|| g.edge_between(w[0], w[1]).expect("adjacent"));
        pts.push(dm.cutline(e).midpoint());
        pts.push(dm.cell(w[1]).centroid);
    }
    Polyline::from_points_dedup(pts).expect("non-empty")
}

/// Encoder walk: cells visited by `f` in parameter order with the cutlines
/// crossed.
pub fn gamma(dm: &DissectionMap, f: &Polyline) -> Result<TopoPath, TopologyError> {
    let pts = f.points();
    let mut cur = locate(dm, pts[0])?;
    let mut path = TopoPath::single(cur);
    let snap = dm.tolerance().eps * 100.0;
    for (si, w) in pts.windows(2).enumerate() {
        let (mut p, q) = (w[0], w[1]);
        let d = q - p;
        let mut skip_edge: Option<usize> = None;
        let mut skip_vertex: Option<Point2> = None;
        let mut guard = 4 * dm.cells.len() + 64;
        loop {
            guard -= 1;
            if guard == 0 {
                return Err(TopologyError::LeavesFreeSpace { segment: si });
            }
            if dm.classify(cur, q) != PointClass::Exterior {
                break;
            }
            let Some((x, k)) = exit_point(dm, cur, p, d, skip_edge, skip_vertex) else {
                return Err(TopologyError::LeavesFreeSpace { segment: si });
            };
            let cell = dm.cell(cur);
            let edge = cell.edge(k);
            let vertex = [edge.a, edge.b].into_iter().find(|v| v.dist(x) <= snap);
            if let Some(v) = vertex {
                let steps = fan_walk(dm, cur, v, d).ok_or(TopologyError::LeavesFreeSpace { segment: si })?;
                if steps.is_empty() {
                    if skip_vertex == Some(v) {
                        return Err(TopologyError::LeavesFreeSpace { segment: si });
                    }
                } else {
                    for (e, n) in steps {
                        path.nodes.push(n);
                        path.edges.push(Some(e));
                        cur = n;
                    }
                }
                p = v;
                skip_vertex = Some(v);
                skip_edge = None;
            } else {
                match cell.edges[k] {
                    EdgeKind::Boundary => return Err(TopologyError::LeavesFreeSpace { segment: si }),
                    EdgeKind::Cut(id) => {
                        cur = dm.cutline(id).other(cur);
                        path.nodes.push(cur);
                        path.edges.push(Some(id));
                        p = x;
                        skip_edge = Some(id);
                        skip_vertex = None;
                    }
                }
            }
        }
    }
    Ok(path)
}

/// Cyrus–Beck exit of the ray `p + t d` from convex cell `c`: the exit
/// point and edge index with smallest positive parameter.
fn exit_point(
    dm: &DissectionMap,
    c: usize,
    p: Point2,
    d: Point2,
    skip_edge: Option<usize>,
    skip_vertex: Option<Point2>,
) -> Option<(Point2, usize)> {
    let cell = dm.cell(c);
    let dn = d.norm();
    let mut hits: Vec<(f64, usize)> = Vec::new();
    for k in 0..cell.vertices.len() {
        if let (Some(s), EdgeKind::Cut(id)) = (skip_edge, cell.edges[k]) {
            if s == id {
                continue;
            }
        }
        let e = cell.edge(k);
        if skip_vertex.is_some_and(|v| v == e.a || v == e.b) {
            continue;
        }
        let u = e.b - e.a;
        let ul = u.norm();
        let den = u.cross(d);
        if den >= -1e-12 * ul * dn {
            continue;
        }
        let num = u.cross(p - e.a);
        hits.push(((num / -den).max(0.0), k));
    }
    let t = hits.iter().map(|h| h.0).reduce(f64::min)?;
    let x = p + d * t.min(1.0);
    // collinear edges share a supporting line; take the one holding x
    let band = dm.tolerance().eps / dn.max(f64::MIN_POSITIVE);
    hits.into_iter()
        .filter(|h| h.0 <= t + band)
        .map(|(_, k)| (point_segment_distance(x, &cell.edge(k)), k))
        .min_by(|a, b| a.0.total_cmp(&b.0))
        .map(|(_, k)| (x, k))
}

/// Steps from cell `from` around vertex `v` to the cell whose corner at `v`
/// contains direction `d`, crossing only cutlines through `v`.
fn fan_walk(dm: &DissectionMap, from: usize, v: Point2, d: Point2) -> Option<Vec<(usize, usize)>> {
    let around = dm.cells_at_vertex(v);
    let tol = dm.tolerance();
    let contains_dir = |c: usize| {
        let cell = dm.cell(c);
        let n = cell.vertices.len();
        cell.vertices.iter().enumerate().any(|(i, &x)| {
            if x != v {
                return false;
            }
            let (prev, next) = (cell.vertices[(i + n - 1) % n], cell.vertices[(i + 1) % n]);
            let o = Point2::default();
            crate::geometry::orient_with(o, next - v, d, tol) >= 0 && crate::geometry::orient_with(o, d, prev - v, tol) >= 0
        })
    };
    let mut prev: Vec<Option<(usize, usize)>> = vec![None; around.len()];
    let mut seen = vec![false; around.len()];
    let start = around.iter().position(|&c| c == from)?;
    seen[start] = true;
    let mut queue = VecDeque::from([start]);
    let mut hit = None;
    while let Some(i) = queue.pop_front() {
        if contains_dir(around[i]) {
            hit = Some(i);
            break;
        }
        for &id in &dm.cell(around[i]).cutline_ids {
            let l = dm.cutline(id);
            if point_segment_distance(v, &l.segment()) > tol.eps {
                continue;
            }
            let other = l.other(around[i]);
            if let Some(j) = around.iter().position(|&c| c == other) {
                if !seen[j] {
                    seen[j] = true;
                    prev[j] = Some((i, id));
                    queue.push_back(j);
                }
            }
        }
    }
    let mut i = hit?;
    let mut steps = Vec::new();
    while let Some((pi, id)) = prev[i] {
        steps.push((id, around[i]));
        i = pi;
    }
    steps.reverse();
    Some(steps)
}

/// Reduced code of a polyline.
pub fn encode(dm: &DissectionMap, f: &Polyline) -> Result<CdtCode, TopologyError> {
    Ok(reduce(&gamma(dm, f)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ring(n: usize) -> TopologyGraph {
        TopologyGraph::from_edges(n, (0..n).map(|i| (i, (i + 1) % n)).collect())
    }

    fn nodes(c: &CdtCode) -> Vec<usize> {
        c.nodes().to_vec()
    }

    #[test]
    fn reduce_examples() {
        let g = TopologyGraph::from_edges(3, vec![(0, 1), (0, 2)]);
        assert_eq!(nodes(&reduce(&TopoPath::single(0))), vec![0]);
        let t = TopoPath::from_nodes(&g, &[0, 1, 0, 2]).unwrap();
        assert_eq!(nodes(&reduce(&t)), vec![0, 2]);
        let t = TopoPath::from_nodes(&g, &[0, 0, 1, 1, 0]).unwrap();
        assert_eq!(nodes(&reduce(&t)), vec![0]);
    }

    #[test]
    fn product_and_inverse() {
        let g = ring(5);
        let f = TopoPath::from_nodes(&g, &[0, 1]).unwrap();
        let h = TopoPath::from_nodes(&g, &[1, 2]).unwrap();
        assert_eq!(product(&f, &h).unwrap().nodes, vec![0, 1, 2]);
        assert!(product(&h, &f).is_err());
        let fi = product(&f, &inverse(&f)).unwrap();
        assert_eq!(nodes(&reduce(&fi)), vec![0]);
        let e = TopoPath::single(1);
        assert_eq!(reduce(&product(&f, &e).unwrap()), reduce(&f));
    }

    #[test]
    fn code_text_form() {
        let c: CdtCode = "7,3,12".parse().unwrap();
        assert_eq!(c.to_string(), "7,3,12");
        assert!("7,3,7".parse::<CdtCode>().is_err());
        assert!("".parse::<CdtCode>().is_err());
        assert!("1,x".parse::<CdtCode>().is_err());
        let g = ring(4);
        assert!(CdtCode::parse_in("0,2", &g).is_err());
        assert_eq!(CdtCode::parse_in("0,1,2", &g).unwrap().cutlines(&g), vec![0, 1]);
    }

    #[test]
    fn homotopic_needs_shared_endpoints() {
        let a: CdtCode = "0,1,2".parse().unwrap();
        let b: CdtCode = "0,3,2".parse().unwrap();
        assert_eq!(homotopic(&a, &a), Ok(true));
        assert_eq!(homotopic(&a, &b), Ok(false));
        let c: CdtCode = "0,1".parse().unwrap();
        assert_eq!(homotopic(&a, &c), Err(TopologyError::EndpointMismatch));
    }

    fn walk(n: usize) -> impl Strategy<Value = Vec<usize>> {
        prop::collection::vec(prop::bool::ANY, 0..30).prop_map(move |steps| {
            let mut v = vec![0usize];
            for s in steps {
                let x = *v.last().unwrap();
                v.push(if s { (x + 1) % n } else { (x + n - 1) % n });
            }
            v
        })
    }

    proptest! {
        #[test]
        fn reduction_is_confluent(w in walk(6), seed in 0u64..1000) {
            use rand::{Rng, SeedableRng};
            let g = ring(6);
            let t = TopoPath::from_nodes(&g, &w).unwrap();
            let c = reduce(&t);
            prop_assert!(c.path().is_no_rollback());
            prop_assert_eq!(reduce(c.path()), c.clone());
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let mut r = t.clone();
            loop {
                let sites = r.contraction_sites();
                if sites.is_empty() {
                    break;
                }
                let i = sites[rng.gen_range(0..sites.len())];
                prop_assert!(r.contract_at(i));
            }
            prop_assert_eq!(r.nodes, c.nodes().to_vec());
        }
    }
}
