//! Reference oracles that share no search code with the planner: grid
//! Dijkstra, class-restricted grid Dijkstra and a ray-crossing homotopy
//! invariant.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};
use std::fmt;

use cdt_core::decomposition::DissectionMap;
use cdt_core::geometry::{Point2, Polyline};
use cdt_core::map_ingest::OccupancyGrid;
use cdt_core::topology::{gamma, locate, reduce, CdtCode};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq)]
struct Entry(f64, usize);

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, o: &Self) -> Ordering {
        o.0.total_cmp(&self.0).then(o.1.cmp(&self.1))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridPath {
    pub length: f64,
    pub path: Vec<Point2>,
    /// Oracle cells per map cell along each axis.
    pub subdivision: usize,
}

const DIRS: [(i64, i64); 8] = [(1, 0), (-1, 0), (0, 1), (0, -1), (1, 1), (1, -1), (-1, 1), (-1, -1)];

/// 8-connected Dijkstra between two oracle cells; diagonal steps need both
/// side neighbours free. Costs are in oracle cells.
pub fn dijkstra_cells(
    w: usize,
    h: usize,
    free: impl Fn(usize, usize) -> bool,
    start: (usize, usize),
    goal: (usize, usize),
) -> Option<(f64, Vec<(usize, usize)>)> {
    if !free(start.0, start.1) || !free(goal.0, goal.1) {
        return None;
    }
    let idx = |x: usize, y: usize| y * w + x;
    let mut dist = vec![f64::INFINITY; w * h];
    let mut prev = vec![usize::MAX; w * h];
    let mut heap = BinaryHeap::new();
    dist[idx(start.0, start.1)] = 0.0;
    heap.push(Entry(0.0, idx(start.0, start.1)));
    let target = idx(goal.0, goal.1);
    while let Some(Entry(d, i)) = heap.pop() {
        if d > dist[i] {
            continue;
        }
        if i == target {
            break;
        }
        let (x, y) = ((i % w) as i64, (i / w) as i64);
        for (dx, dy) in DIRS {
            let (nx, ny) = (x + dx, y + dy);
            if nx < 0 || ny < 0 || nx >= w as i64 || ny >= h as i64 {
                continue;
            }
            let (ux, uy) = (nx as usize, ny as usize);
            if !free(ux, uy) {
                continue;
            }
            let diag = dx != 0 && dy != 0;
            if diag && !(free(ux, y as usize) && free(x as usize, uy)) {
                continue;
            }
            let nd = d + if diag { std::f64::consts::SQRT_2 } else { 1.0 };
            let j = idx(ux, uy);
            if nd < dist[j] {
                dist[j] = nd;
                prev[j] = i;
                heap.push(Entry(nd, j));
            }
        }
    }
    if !dist[target].is_finite() {
        return None;
    }
    let mut cells = vec![goal];
    let mut i = target;
    while prev[i] != usize::MAX {
        i = prev[i];
        cells.push((i % w, i / w));
    }
    cells.reverse();
    Some((dist[target], cells))
}

/// Grid oracle between two map points: each map cell is split into
/// `subdivision`² oracle cells, the endpoints join their own cell centres.
pub fn grid_dijkstra(grid: &OccupancyGrid, xs: Point2, xe: Point2, subdivision: usize) -> Option<GridPath> {
    let s = subdivision.max(1);
    let (w, h) = (grid.width * s, grid.height * s);
    let step = grid.resolution / s as f64;
    // oracle rows run upward from y = 0
    let free = |x: usize, y: usize| !grid.occupied(x / s, grid.height - 1 - y / s);
    let cell_of = |p: Point2| {
        let x = (p.x / step).floor();
        let y = (p.y / step).floor();
        (x >= 0.0 && y >= 0.0 && (x as usize) < w && (y as usize) < h).then_some((x as usize, y as usize))
    };
    let centre = |(x, y): (usize, usize)| Point2::new((x as f64 + 0.5) * step, (y as f64 + 0.5) * step);
    let (a, b) = (cell_of(xs)?, cell_of(xe)?);
    let (len, cells) = dijkstra_cells(w, h, free, a, b)?;
    let mut path = vec![xs];
    path.extend(cells.iter().map(|&c| centre(c)));
    path.push(xe);
    Some(GridPath {
        length: len * step + xs.dist(centre(a)) + xe.dist(centre(b)),
        path,
        subdivision: s,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassOracle {
    pub length: f64,
    pub path: Polyline,
    pub states: usize,
    pub raster: usize,
}

/// Deepest excursion off the code allowed in a lattice state.
pub const MAX_EXCURSION: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct Lift {
    pixel: u32,
    k: u32,
    /// Cells entered after `code[k]` that do not follow the code.
    exc: [u32; MAX_EXCURSION],
    depth: u8,
}

impl Lift {
    fn top(&self, code: &[usize]) -> usize {
        match self.depth {
            0 => code[self.k as usize],
            d => self.exc[d as usize - 1] as usize,
        }
    }

    fn second(&self, code: &[usize]) -> Option<usize> {
        match self.depth {
            0 => (self.k as usize).checked_sub(1).map(|i| code[i]),
            1 => Some(code[self.k as usize]),
            d => Some(self.exc[d as usize - 2] as usize),
        }
    }

    /// Position after appending the cell walk `w`, which must start in
    /// the current cell. `None` when the excursion grows too deep.
    fn follow(mut self, code: &[usize], w: &[usize]) -> Option<Lift> {
        if w.first() != Some(&self.top(code)) {
            return None;
        }
        for &y in &w[1..] {
            if self.second(code) == Some(y) {
                if self.depth > 0 {
                    self.depth -= 1;
                    self.exc[self.depth as usize] = 0;
                } else {
                    self.k -= 1;
                }
            } else if self.depth == 0 && (self.k as usize) + 1 < code.len() && code[self.k as usize + 1] == y {
                self.k += 1;
            } else {
                if self.depth as usize == MAX_EXCURSION {
                    return None;
                }
                self.exc[self.depth as usize] = y as u32;
                self.depth += 1;
            }
        }
        Some(self)
    }
}

#[derive(Default)]
struct Search {
    ids: HashMap<Lift, usize>,
    states: Vec<Lift>,
    dist: Vec<f64>,
    prev: Vec<usize>,
    heap: BinaryHeap<Entry>,
}

impl Search {
    fn push(&mut self, s: Lift, d: f64, from: usize) {
        let id = *self.ids.entry(s).or_insert_with(|| {
            self.states.push(s);
            self.dist.push(f64::INFINITY);
            self.prev.push(usize::MAX);
            self.states.len() - 1
        });
        if d < self.dist[id] {
            self.dist[id] = d;
            self.prev[id] = from;
            self.heap.push(Entry(d, id));
        }
    }
}

/// Lattice over a dissection for class-restricted searches. Pixel labels
/// and cell walks between neighbouring pixels are cached across queries.
pub struct LatticeOracle<'a> {
    dm: &'a DissectionMap,
    raster: usize,
    origin: Point2,
    step: (f64, f64),
    label: Vec<Option<u32>>,
    walks: HashMap<(u32, u8), Option<Vec<usize>>>,
}

impl<'a> LatticeOracle<'a> {
    pub fn new(dm: &'a DissectionMap, raster: usize) -> Self {
        let bb = dm.bbox();
        let mut o = LatticeOracle {
            dm,
            raster,
            origin: bb.min,
            step: (bb.width() / raster as f64, bb.height() / raster as f64),
            label: Vec::new(),
            walks: HashMap::new(),
        };
        o.label = (0..raster * raster)
            .map(|i| locate(dm, o.centre(i)).ok().map(|c| c as u32))
            .collect();
        o
    }

    /// Pixel centres carry a small irrational offset so they avoid
    /// lattice-aligned map vertices.
    fn centre(&self, i: usize) -> Point2 {
        let (ox, oy) = (1e-3 * std::f64::consts::SQRT_2, 1e-3 * 3f64.sqrt());
        let (x, y) = (i % self.raster, i / self.raster);
        Point2::new(
            self.origin.x + (x as f64 + 0.5 + ox) * self.step.0,
            self.origin.y + (y as f64 + 0.5 + oy) * self.step.1,
        )
    }

    fn walk(&self, a: Point2, b: Point2) -> Option<Vec<usize>> {
        let f = Polyline::from_points_dedup(vec![a, b]).ok()?;
        gamma(self.dm, &f).ok().map(|t| reduce(&t).nodes().to_vec())
    }

    fn near(&self, p: Point2) -> Vec<usize> {
        let reach = 1.5 * self.step.0.max(self.step.1);
        let cx = ((p.x - self.origin.x) / self.step.0) as i64;
        let cy = ((p.y - self.origin.y) / self.step.1) as i64;
        let mut out = Vec::new();
        for dy in -2..=2 {
            for dx in -2..=2 {
                let (x, y) = (cx + dx, cy + dy);
                if x >= 0 && y >= 0 && (x as usize) < self.raster && (y as usize) < self.raster {
                    let i = y as usize * self.raster + x as usize;
                    if self.label[i].is_some() && self.centre(i).dist(p) <= reach {
                        out.push(i);
                    }
                }
            }
        }
        out
    }

    /// Shortest 8-connected lattice path from `xs` to `xe` in the class of
    /// `code`.
    ///
    /// The search runs in the covering space: a state is a pixel plus the
    /// reduced cell walk so far, written as a code prefix and a short
    /// excursion. Every accepted path is a feasible member of the class,
    /// so the result bounds the class optimum from above.
    pub fn class_path(&mut self, code: &CdtCode, xs: Point2, xe: Point2) -> Option<ClassOracle> {
        let c = code.nodes();
        let m = c.len();
        let root = Lift {
            pixel: 0,
            k: 0,
            exc: [0; MAX_EXCURSION],
            depth: 0,
        };
        let done = |s: Option<Lift>| matches!(s, Some(s) if s.k as usize == m - 1 && s.depth == 0);
        if let Some(w) = self.walk(xs, xe) {
            if done(root.follow(c, &w)) {
                let path = Polyline::from_points_dedup(vec![xs, xe]).ok()?;
                return Some(ClassOracle {
                    length: path.length(),
                    path,
                    states: 0,
                    raster: self.raster,
                });
            }
        }
        const GOAL: u32 = u32::MAX;
        let mut sr = Search::default();
        for q in self.near(xs) {
            let Some(w) = self.walk(xs, self.centre(q)) else { continue };
            if let Some(s) = root.follow(c, &w) {
                sr.push(Lift { pixel: q as u32, ..s }, xs.dist(self.centre(q)), usize::MAX);
            }
        }
        let goal_pixels: std::collections::HashSet<usize> = self.near(xe).into_iter().collect();
        let r = self.raster as i64;
        let mut popped = 0;
        let mut found = None;
        while let Some(Entry(d, id)) = sr.heap.pop() {
            if d > sr.dist[id] {
                continue;
            }
            popped += 1;
            let s = sr.states[id];
            if s.pixel == GOAL {
                found = Some(id);
                break;
            }
            let p = s.pixel as usize;
            let pc = self.centre(p);
            if goal_pixels.contains(&p) {
                if let Some(w) = self.walk(pc, xe) {
                    if done(s.follow(c, &w)) {
                        sr.push(Lift { pixel: GOAL, ..root }, d + pc.dist(xe), id);
                    }
                }
            }
            let (x, y) = ((p % self.raster) as i64, (p / self.raster) as i64);
            for (di, (dx, dy)) in DIRS.iter().enumerate() {
                let (nx, ny) = (x + dx, y + dy);
                if nx < 0 || ny < 0 || nx >= r || ny >= r {
                    continue;
                }
                let q = (ny * r + nx) as usize;
                let Some(lq) = self.label[q] else { continue };
                let next = if self.label[p] == Some(lq) {
                    // both centres in one convex cell
                    Some(s)
                } else {
                    let qc = self.centre(q);
                    if !self.walks.contains_key(&(p as u32, di as u8)) {
                        let w = self.walk(pc, qc);
                        self.walks.insert((p as u32, di as u8), w);
                    }
                    self.walks[&(p as u32, di as u8)].as_ref().and_then(|w| s.follow(c, w))
                };
                if let Some(ns) = next {
                    sr.push(Lift { pixel: q as u32, ..ns }, d + pc.dist(self.centre(q)), id);
                }
            }
        }
        let mut id = found?;
        let length = sr.dist[id];
        let mut pts = vec![xe];
        while sr.prev[id] != usize::MAX {
            id = sr.prev[id];
            pts.push(self.centre(sr.states[id].pixel as usize));
        }
        pts.push(xs);
        pts.reverse();
        Some(ClassOracle {
            length,
            path: Polyline::from_points_dedup(pts).ok()?,
            states: popped,
            raster: self.raster,
        })
    }
}

/// One-shot form of [`LatticeOracle::class_path`].
pub fn class_dijkstra(dm: &DissectionMap, code: &CdtCode, xs: Point2, xe: Point2, raster: usize) -> Option<ClassOracle> {
    LatticeOracle::new(dm, raster).class_path(code, xs, xe)
}

/// One crossing of a ray piece: obstacle, piece along its ray, direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Letter {
    pub obstacle: u32,
    pub piece: u32,
    pub sign: i8,
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = if self.sign > 0 { '+' } else { '-' };
        write!(f, "{s}{}.{}", self.obstacle, self.piece)
    }
}

pub fn word_string(w: &[Letter]) -> String {
    w.iter().map(|l| l.to_string()).collect::<Vec<_>>().join(" ")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OnRay;

/// Homotopy invariant for one free-space component. Each hole gets an
/// upward vertical ray from a point inside it; the free stretches of the
/// ray are separate generators, so the crossing word reduced by
/// cancellation identifies the class of a path between fixed endpoints.
#[derive(Debug, Clone)]
pub struct HSignature {
    loops: Vec<Vec<Point2>>,
    reps: Vec<Point2>,
    /// Free intervals `(lo, hi)` of each ray above its representative.
    pieces: Vec<Vec<(f64, f64)>>,
    eps: f64,
}

impl HSignature {
    /// `loops[0]` is the outer boundary, the rest are holes.
    pub fn new(loops: Vec<Vec<Point2>>, eps: f64) -> Self {
        let reps: Vec<Point2> = loops[1..].iter().map(|h| inside(h)).collect();
        let mut s = HSignature {
            loops,
            reps,
            pieces: Vec::new(),
            eps,
        };
        s.rebuild();
        s
    }

    pub fn obstacles(&self) -> usize {
        self.reps.len()
    }

    fn rebuild(&mut self) {
        let loops = &self.loops;
        let eps = self.eps;
        for h in 0..self.reps.len() {
            // keep the ray off loop vertices and earlier rays, staying inside the hole
            let (done, rest) = self.reps.split_at_mut(h);
            let rep = &mut rest[0];
            let clash = |x: f64| {
                loops.iter().flatten().any(|v| (v.x - x).abs() <= eps) || done.iter().any(|r| (r.x - x).abs() <= 2.0 * eps)
            };
            let mut k = 0;
            while clash(rep.x) && k < 64 {
                k += 1;
                let cand = Point2::new(rep.x + eps * 3.0 * k as f64, rep.y);
                if point_in_ring(&loops[h + 1], cand) && !clash(cand.x) {
                    *rep = cand;
                }
            }
        }
        self.pieces = self.reps.iter().map(|&r| ray_pieces(loops, r)).collect();
    }

    fn perturbed(&self, k: usize) -> HSignature {
        let mut s = self.clone();
        for (h, r) in s.reps.iter_mut().enumerate() {
            let cand = Point2::new(r.x + self.eps * (7.0 * k as f64 + 1.5), r.y);
            if point_in_ring(&self.loops[h + 1], cand) {
                *r = cand;
            }
        }
        s.rebuild();
        s
    }

    /// Reduced crossing word of `f`.
    pub fn word(&self, f: &Polyline) -> Result<Vec<Letter>, OnRay> {
        let pts = f.points();
        for p in pts {
            if self.reps.iter().any(|r| (p.x - r.x).abs() <= self.eps && p.y > r.y) {
                return Err(OnRay);
            }
        }
        let mut word: Vec<Letter> = Vec::new();
        for w in pts.windows(2) {
            let (a, b) = (w[0], w[1]);
            let mut hits: Vec<(f64, Letter)> = Vec::new();
            for (h, r) in self.reps.iter().enumerate() {
                if (a.x - r.x) * (b.x - r.x) >= 0.0 {
                    continue;
                }
                let t = (r.x - a.x) / (b.x - a.x);
                let y = a.y + t * (b.y - a.y);
                if y <= r.y {
                    continue;
                }
                let piece = self.pieces[h].iter().position(|&(lo, hi)| y >= lo && y <= hi).ok_or(OnRay)?;
                hits.push((
                    t,
                    Letter {
                        obstacle: h as u32,
                        piece: piece as u32,
                        sign: if a.x < r.x { 1 } else { -1 },
                    },
                ));
            }
            hits.sort_by(|x, y| x.0.total_cmp(&y.0));
            for (_, l) in hits {
                match word.last() {
                    Some(&top) if top.obstacle == l.obstacle && top.piece == l.piece && top.sign == -l.sign => {
                        word.pop();
                    }
                    _ => word.push(l),
                }
            }
        }
        Ok(word)
    }

    /// Word of `f`, shifting the rays if a vertex falls on one. Words from
    /// different shifts are not comparable.
    pub fn word_shifted(&self, f: &Polyline) -> Option<Vec<Letter>> {
        let mut s = self.clone();
        for k in 0..16 {
            if let Ok(w) = s.word(f) {
                return Some(w);
            }
            s = self.perturbed(k + 1);
        }
        None
    }

    /// Words of `a` and `b` agree, retrying with shifted rays when a vertex
    /// falls on one.
    pub fn same_class(&self, a: &Polyline, b: &Polyline) -> bool {
        let mut s = self.clone();
        for k in 0..16 {
            if let (Ok(wa), Ok(wb)) = (s.word(a), s.word(b)) {
                return wa == wb;
            }
            s = self.perturbed(k + 1);
        }
        panic!("no ray placement avoids both paths");
    }
}

fn point_in_ring(ring: &[Point2], p: Point2) -> bool {
    let mut inside = false;
    let n = ring.len();
    for i in 0..n {
        let (a, b) = (ring[i], ring[(i + 1) % n]);
        if (a.y > p.y) != (b.y > p.y) {
            let x = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
            if x > p.x {
                inside = !inside;
            }
        }
    }
    inside
}

/// A point strictly inside a ring.
fn inside(ring: &[Point2]) -> Point2 {
    let mut ys: Vec<f64> = ring.iter().map(|p| p.y).collect();
    ys.sort_by(f64::total_cmp);
    ys.dedup();
    let (mut best, mut gap) = (0, -1.0);
    for i in 0..ys.len().saturating_sub(1) {
        if ys[i + 1] - ys[i] > gap {
            gap = ys[i + 1] - ys[i];
            best = i;
        }
    }
    let y = 0.5 * (ys[best] + ys[best + 1]);
    let n = ring.len();
    let mut xs: Vec<f64> = (0..n)
        .filter_map(|i| {
            let (a, b) = (ring[i], ring[(i + 1) % n]);
            ((a.y > y) != (b.y > y)).then(|| a.x + (y - a.y) / (b.y - a.y) * (b.x - a.x))
        })
        .collect();
    xs.sort_by(f64::total_cmp);
    Point2::new(0.5 * (xs[0] + xs[1]), y)
}

/// Free intervals of the vertical line through `r`, above `r`.
fn ray_pieces(loops: &[Vec<Point2>], r: Point2) -> Vec<(f64, f64)> {
    let mut ys: Vec<f64> = Vec::new();
    for ring in loops {
        let n = ring.len();
        for i in 0..n {
            let (a, b) = (ring[i], ring[(i + 1) % n]);
            if (a.x > r.x) != (b.x > r.x) {
                ys.push(a.y + (r.x - a.x) / (b.x - a.x) * (b.y - a.y));
            }
        }
    }
    ys.sort_by(f64::total_cmp);
    // from the top: outside, free, blocked, free, ...
    let mut out: Vec<(f64, f64)> = ys
        .rchunks(2)
        .filter(|c| c.len() == 2)
        .map(|c| (c[0], c[1]))
        .filter(|&(_, hi)| hi > r.y)
        .map(|(lo, hi)| (lo.max(r.y), hi))
        .collect();
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(x: f64, y: f64) -> Point2 {
        Point2::new(x, y)
    }

    fn pl(v: &[(f64, f64)]) -> Polyline {
        Polyline::new(v.iter().map(|&(x, y)| p(x, y)).collect()).unwrap()
    }

    #[test]
    fn empty_grid_diagonal() {
        let g = OccupancyGrid::from_occupancy(10, 10, &[false; 100]).unwrap();
        let (len, cells) = dijkstra_cells(10, 10, |x, y| !g.occupied(x, y), (0, 0), (9, 9)).unwrap();
        assert!((len - 9.0 * std::f64::consts::SQRT_2).abs() < 1e-12);
        assert_eq!(cells.len(), 10);
    }

    #[test]
    fn wall_with_gap() {
        // wall at x = 5 with a gap at y = 8
        let free = |x: usize, y: usize| x != 5 || y == 8;
        let (len, _) = dijkstra_cells(11, 11, free, (0, 0), (10, 0)).unwrap();
        // by hand: 4 diagonals to (4,4), up to (4,8), through the gap to
        // (6,8), then the mirror image; the wall blocks corner cutting
        let hand = 8.0 * std::f64::consts::SQRT_2 + 10.0;
        assert!((len - hand).abs() < 1e-9, "{len} vs {hand}");
        assert!(dijkstra_cells(11, 11, |x, _| x != 5, (0, 0), (10, 0)).is_none());
    }

    #[test]
    fn signature_examples() {
        let outer = vec![p(0., 0.), p(10., 0.), p(10., 10.), p(0., 10.)];
        let hole = vec![p(4., 4.), p(4., 6.), p(6., 6.), p(6., 4.)];
        let hs = HSignature::new(vec![outer, hole], 1e-9);
        let below = pl(&[(1., 5.), (5., 1.), (9., 5.)]);
        let above = pl(&[(1., 5.), (5.3, 9.), (9., 5.)]);
        let wa = hs.word(&above).unwrap();
        assert_eq!(wa.len(), 1);
        assert!(hs.word(&below).unwrap().is_empty());
        assert!(!hs.same_class(&above, &below));
        // crossing forward then back cancels
        let back = pl(&[(1., 5.), (3., 8.), (7., 8.), (3., 9.), (1., 5.)]);
        assert!(hs.word(&back).unwrap().is_empty());
        // vertex on the ray is retried with a shifted ray
        let on = pl(&[(1., 5.), (hs.reps[0].x, 8.), (9., 5.)]);
        assert!(hs.same_class(&on, &above));
    }

    #[test]
    fn pieces_split_by_upper_obstacle() {
        let outer = vec![p(0., 0.), p(10., 0.), p(10., 10.), p(0., 10.)];
        let low = vec![p(4., 2.), p(4., 3.), p(6., 3.), p(6., 2.)];
        let high = vec![p(3., 6.), p(3., 7.), p(7., 7.), p(7., 6.)];
        let hs = HSignature::new(vec![outer, low, high], 1e-9);
        assert_eq!(hs.pieces[0].len(), 2);
        assert_eq!(hs.pieces[1].len(), 1);
    }

    #[test]
    fn stacked_holes_get_separate_rays() {
        let outer = vec![p(0., 0.), p(10., 0.), p(10., 10.), p(0., 10.)];
        let low = vec![p(4., 2.), p(4., 3.), p(6., 3.), p(6., 2.)];
        let high = vec![p(4., 6.), p(4., 7.), p(6., 7.), p(6., 6.)];
        let hs = HSignature::new(vec![outer, low, high], 1e-9);
        assert!((hs.reps[0].x - hs.reps[1].x).abs() > 1e-9);
        // over the top of both and back: no hole is enclosed
        let f = pl(&[(1., 8.), (1., 9.), (9., 9.), (1., 9.5), (2., 5.)]);
        let g = pl(&[(1., 8.), (2., 5.)]);
        assert!(hs.same_class(&f, &g));
    }
}
