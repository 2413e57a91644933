//! Occupancy grid to simple polygons, one per free-space component.

mod keyhole;
mod pgm;
mod simplify;
mod trace;

pub use pgm::{load_grid, write_pgm, GridFormat, MAX_CELLS};
pub use trace::Labels;
pub(crate) use keyhole::in_cone;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{
    perimeter, point_segment_distance, seg_intersect_with, signed_area, Aabb, Point2, Segment, SegmentIndex,
    SegIntersection, Tolerance,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IngestError {
    #[error("short read")]
    ShortRead,
    #[error("malformed map: {0}")]
    Malformed(String),
    #[error("dimension overflow: {width} x {height}")]
    DimensionOverflow { width: usize, height: usize },
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("invalid ingest config: {0}")]
    InvalidConfig(String),
    #[error("loop degenerates below three vertices")]
    DegenerateLoop,
    #[error("no visible bridge for hole {hole}")]
    NoBridge { hole: usize },
    #[error("polygon is not simple: edges {0} and {1} intersect")]
    NotSimple(usize, usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct OccupancyGrid {
    pub width: usize,
    pub height: usize,
    /// Map units per cell.
    pub resolution: f64,
    /// Row-major, row 0 at the top of the image.
    pub cells: Vec<u8>,
    pub occ_threshold: u8,
}

impl OccupancyGrid {
    pub fn new(
        width: usize,
        height: usize,
        resolution: f64,
        cells: Vec<u8>,
        occ_threshold: u8,
    ) -> Result<Self, IngestError> {
        if width.checked_mul(height) != Some(cells.len()) {
            return Err(IngestError::InvalidGrid(format!(
                "{width} x {height} does not match {} cells",
                cells.len()
            )));
        }
        if !(resolution > 0.0 && resolution.is_finite()) {
            return Err(IngestError::InvalidGrid(format!("resolution {resolution}")));
        }
        Ok(OccupancyGrid {
            width,
            height,
            resolution,
            cells,
            occ_threshold,
        })
    }

    /// Grid with byte 255 for occupied and 0 for free, threshold 128.
    pub fn from_occupancy(width: usize, height: usize, occ: &[bool]) -> Result<Self, IngestError> {
        let cells = occ.iter().map(|&o| if o { 255 } else { 0 }).collect();
        OccupancyGrid::new(width, height, 1.0, cells, 128)
    }

    pub fn with_resolution(mut self, resolution: f64) -> Result<Self, IngestError> {
        if !(resolution > 0.0 && resolution.is_finite()) {
            return Err(IngestError::InvalidGrid(format!("resolution {resolution}")));
        }
        self.resolution = resolution;
        Ok(self)
    }

    pub fn occupied(&self, col: usize, row: usize) -> bool {
        self.cells[row * self.width + col] >= self.occ_threshold
    }

    pub fn free_count(&self) -> usize {
        self.cells.iter().filter(|&&c| c < self.occ_threshold).count()
    }

    /// Occupancy of the cell containing map point `p`; points outside the
    /// grid count as occupied.
    pub fn occupied_at(&self, p: Point2) -> bool {
        let col = (p.x / self.resolution).floor();
        let y = (p.y / self.resolution).floor();
        if col < 0.0 || y < 0.0 || col >= self.width as f64 || y >= self.height as f64 {
            return true;
        }
        let row = self.height - 1 - y as usize;
        self.occupied(col as usize, row)
    }

    pub fn extent(&self) -> Aabb {
        Aabb {
            min: Point2::new(0.0, 0.0),
            max: Point2::new(
                self.width as f64 * self.resolution,
                self.height as f64 * self.resolution,
            ),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LoopKind {
    Outer,
    Hole,
}

/// Closed boundary loop with free space on its left.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryLoop {
    /// First point repeated at the end.
    pub points: Vec<Point2>,
    pub kind: LoopKind,
}

impl BoundaryLoop {
    pub fn from_ring(ring: &[Point2], kind: LoopKind) -> Self {
        let mut points = ring.to_vec();
        if let Some(&f) = ring.first() {
            points.push(f);
        }
        BoundaryLoop { points, kind }
    }

    /// Vertices without the closing repeat.
    pub fn ring(&self) -> &[Point2] {
        &self.points[..self.points.len().saturating_sub(1)]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Component {
    pub id: usize,
    pub outer: BoundaryLoop,
    pub holes: Vec<BoundaryLoop>,
    pub free_cells: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IngestConfig {
    /// Maximum boundary deviation in map units.
    pub epsilon_fit: f64,
    pub occ_threshold: u8,
}

impl Default for IngestConfig {
    fn default() -> Self {
        IngestConfig {
            epsilon_fit: 8.0,
            occ_threshold: 128,
        }
    }
}

impl IngestConfig {
    pub fn validate(&self) -> Result<(), IngestError> {
        if self.epsilon_fit > 0.0 && self.epsilon_fit.is_finite() {
            Ok(())
        } else {
            Err(IngestError::InvalidConfig(format!("epsilon_fit {}", self.epsilon_fit)))
        }
    }
}

/// One free-space component as a single boundary loop. Holes are joined by
/// bridges: twin edge pairs `(i, j)` where edge `i` (vertex `i` to `i+1`)
/// and edge `j` run along the same segment in opposite directions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimplePolygon {
    pub vertices: Vec<Point2>,
    pub component: usize,
    pub bridges: Vec<(usize, usize)>,
    pub holes: usize,
}

impl SimplePolygon {
    pub fn edge(&self, i: usize) -> Segment {
        let n = self.vertices.len();
        Segment {
            a: self.vertices[i],
            b: self.vertices[(i + 1) % n],
        }
    }

    pub fn area(&self) -> f64 {
        signed_area(&self.vertices)
    }

    pub fn tolerance(&self) -> Tolerance {
        Tolerance::for_points(&self.vertices)
    }

    /// Vertex indices that start or end a bridge edge.
    pub fn bridge_vertices(&self) -> Vec<usize> {
        let n = self.vertices.len();
        let mut v: Vec<usize> = self
            .bridges
            .iter()
            .flat_map(|&(i, j)| [i, (i + 1) % n, j, (j + 1) % n])
            .collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    /// Pairwise edge check. Bridge twins may overlap each other, and edges
    /// may touch only at a shared endpoint coordinate.
    pub fn check_simple(&self) -> Result<(), IngestError> {
        let n = self.vertices.len();
        if n < 3 || self.area() <= 0.0 {
            return Err(IngestError::DegenerateLoop);
        }
        let tol = self.tolerance();
        let bbox = Aabb::from_points(&self.vertices).unwrap();
        let segs: Vec<Segment> = (0..n).map(|i| self.edge(i)).collect();
        let index = SegmentIndex::from_segments(bbox, segs.iter().copied(), tol.eps);
        let mut cands = Vec::new();
        for i in 0..n {
            index.candidates(&segs[i], &mut cands);
            for &j in cands.iter().filter(|&&j| j > i) {
                if !self.pair_ok(&segs, i, j, tol) {
                    return Err(IngestError::NotSimple(i, j));
                }
            }
        }
        Ok(())
    }

    /// O(n²) variant of [`Self::check_simple`] without the spatial index.
    pub fn check_simple_brute(&self) -> Result<(), IngestError> {
        let n = self.vertices.len();
        let tol = self.tolerance();
        let segs: Vec<Segment> = (0..n).map(|i| self.edge(i)).collect();
        for i in 0..n {
            for j in i + 1..n {
                if !self.pair_ok(&segs, i, j, tol) {
                    return Err(IngestError::NotSimple(i, j));
                }
            }
        }
        Ok(())
    }

    fn pair_ok(&self, segs: &[Segment], i: usize, j: usize, tol: Tolerance) -> bool {
        let (s, t) = (&segs[i], &segs[j]);
        match seg_intersect_with(s, t, tol) {
            SegIntersection::None => true,
            SegIntersection::Touch(p) => (p == s.a || p == s.b) && (p == t.a || p == t.b),
            SegIntersection::Overlap(_) => self.bridges.iter().any(|&b| b == (i, j) || b == (j, i)),
            SegIntersection::Proper(_) => false,
        }
    }
}

/// Traced components with loops scaled to map units.
pub fn extract_components(grid: &OccupancyGrid) -> Vec<Component> {
    let (comps, _) = trace::trace(grid);
    let r = grid.resolution;
    let scale = |ring: &[Point2]| ring.iter().map(|p| *p * r).collect::<Vec<_>>();
    comps
        .into_iter()
        .map(|c| Component {
            id: c.id,
            outer: BoundaryLoop::from_ring(&scale(&c.outer), LoopKind::Outer),
            holes: c
                .holes
                .iter()
                .map(|h| BoundaryLoop::from_ring(&scale(h), LoopKind::Hole))
                .collect(),
            free_cells: c.free_cells,
        })
        .collect()
}

/// Plain closed-loop Douglas–Peucker. Loops that would drop below three
/// vertices keep their farthest remaining vertex.
pub fn simplify_loop(lp: &BoundaryLoop, epsilon_fit: f64) -> Result<BoundaryLoop, IngestError> {
    let mut ring = lp.ring().to_vec();
    ring.dedup();
    if ring.len() > 1 && ring.first() == ring.last() {
        ring.pop();
    }
    if ring.len() < 3 {
        return Err(IngestError::DegenerateLoop);
    }
    let mut kept = simplify::dp_closed(&ring, epsilon_fit);
    simplify::ensure_three(&ring, &mut kept)?;
    let out: Vec<Point2> = kept.iter().map(|&i| ring[i]).collect();
    Ok(BoundaryLoop::from_ring(&out, lp.kind))
}

/// Joins hole loops into the outer loop with bridges.
pub fn merge_holes(outer: &BoundaryLoop, holes: &[BoundaryLoop]) -> Result<SimplePolygon, IngestError> {
    let outer_ring = outer.ring();
    let hole_rings: Vec<Vec<Point2>> = holes.iter().map(|h| h.ring().to_vec()).collect();
    let tol = Tolerance::for_points(outer_ring.iter().chain(hole_rings.iter().flatten()));
    let (ring, bridges) = keyhole::merge(outer_ring, &hole_rings, tol)?;
    Ok(SimplePolygon {
        vertices: ring,
        component: 0,
        bridges,
        holes: holes.len(),
    })
}

/// Fitted polygon plus the data needed to audit the fit.
#[derive(Debug, Clone)]
pub struct FittedComponent {
    pub polygon: SimplePolygon,
    pub free_cells: usize,
    /// Traced loops in map units (outer first).
    pub traced: Vec<BoundaryLoop>,
    /// Simplified loops in map units (outer first).
    pub simplified: Vec<BoundaryLoop>,
}

impl FittedComponent {
    /// Largest distance from a traced vertex to its simplified loop.
    pub fn max_fit_error(&self) -> f64 {
        self.traced
            .iter()
            .zip(&self.simplified)
            .flat_map(|(t, s)| {
                let ring = s.ring();
                let segs: Vec<Segment> = (0..ring.len())
                    .map(|i| Segment {
                        a: ring[i],
                        b: ring[(i + 1) % ring.len()],
                    })
                    .collect();
                t.ring()
                    .iter()
                    .map(|p| {
                        segs.iter()
                            .map(|sg| point_segment_distance(*p, sg))
                            .fold(f64::INFINITY, f64::min)
                    })
                    .collect::<Vec<_>>()
            })
            .fold(0.0, f64::max)
    }

    pub fn traced_perimeter(&self) -> f64 {
        self.traced.iter().map(|l| perimeter(l.ring())).sum()
    }
}

/// Full fitting pipeline: trace, simplify conservatively, bridge holes.
pub fn fit_components(grid: &OccupancyGrid, cfg: &IngestConfig) -> Result<Vec<FittedComponent>, IngestError> {
    cfg.validate()?;
    let (comps, labels) = trace::trace(grid);
    let eps = cfg.epsilon_fit / grid.resolution;
    let r = grid.resolution;
    let mut out = Vec::with_capacity(comps.len());
    for c in comps {
        let mut rings = vec![c.outer.clone()];
        rings.extend(c.holes.iter().cloned());
        let mut kept: Vec<Vec<usize>> = rings.iter().map(|ring| simplify::dp_closed(ring, eps)).collect();
        for (ring, k) in rings.iter().zip(kept.iter_mut()) {
            simplify::ensure_three(ring, k)?;
        }
        loop {
            let before: usize = kept.iter().map(Vec::len).sum();
            for (ring, k) in rings.iter().zip(kept.iter_mut()) {
                simplify::fix_conservative(ring, k, &labels, c.id as u32);
            }
            simplify::fix_simplicity(&rings, &mut kept);
            if kept.iter().map(Vec::len).sum::<usize>() == before {
                break;
            }
        }
        let lattice: Vec<Vec<Point2>> = rings
            .iter()
            .zip(&kept)
            .map(|(ring, k)| k.iter().map(|&i| ring[i]).collect())
            .collect();
        if signed_area(&lattice[0]) <= 0.0 || lattice[1..].iter().any(|h| signed_area(h) >= 0.0) {
            return Err(IngestError::DegenerateLoop);
        }
        let tol = Tolerance::for_points(lattice.iter().flatten());
        let (ring, bridges) = keyhole::merge(&lattice[0], &lattice[1..], tol)?;
        let polygon = SimplePolygon {
            vertices: ring.iter().map(|p| *p * r).collect(),
            component: c.id,
            bridges,
            holes: c.holes.len(),
        };
        polygon.check_simple()?;
        let to_loop = |ring: &[Point2], kind| BoundaryLoop::from_ring(&ring.iter().map(|p| *p * r).collect::<Vec<_>>(), kind);
        let kind = |i: usize| if i == 0 { LoopKind::Outer } else { LoopKind::Hole };
        out.push(FittedComponent {
            polygon,
            free_cells: c.free_cells,
            traced: rings.iter().enumerate().map(|(i, x)| to_loop(x, kind(i))).collect(),
            simplified: lattice.iter().enumerate().map(|(i, x)| to_loop(x, kind(i))).collect(),
        });
    }
    Ok(out)
}

/// Polygons only; see [`fit_components`].
pub fn build_polygons(grid: &OccupancyGrid, cfg: &IngestConfig) -> Result<Vec<SimplePolygon>, IngestError> {
    Ok(fit_components(grid, cfg)?.into_iter().map(|f| f.polygon).collect())
}

/// Lattice labels after diagonal-pinch removal, for auditing.
pub fn component_labels(grid: &OccupancyGrid) -> Labels {
    trace::trace(grid).1
}
