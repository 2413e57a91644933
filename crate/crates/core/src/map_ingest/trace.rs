//! Flood fill and boundary tracing on the cell-edge lattice.
//!
//! Lattice coordinates are y-up: cell `(col, row)` of the image occupies
//! `[col, col+1] × [h-1-row, h-row]`.

use crate::geometry::{signed_area, Point2};

use super::OccupancyGrid;

pub(crate) const NO_LABEL: u32 = u32::MAX;

/// Free-space mask in lattice (y-up) order with component labels.
#[derive(Debug, Clone)]
pub struct Labels {
    pub width: usize,
    pub height: usize,
    labels: Vec<u32>,
}

impl Labels {
    /// Component of lattice cell `(x, y)`, `None` for occupied or
    /// out-of-range cells.
    pub fn get(&self, x: i64, y: i64) -> Option<u32> {
        if x < 0 || y < 0 || x >= self.width as i64 || y >= self.height as i64 {
            return None;
        }
        let l = self.labels[y as usize * self.width + x as usize];
        (l != NO_LABEL).then_some(l)
    }
}

#[derive(Debug, Clone)]
pub(crate) struct TracedComponent {
    pub id: usize,
    /// Open rings in lattice coordinates; outer is CCW, holes CW.
    pub outer: Vec<Point2>,
    pub holes: Vec<Vec<Point2>>,
    pub free_cells: usize,
}

/// Lattice-order free mask (`true` = free) of the grid.
fn free_mask(grid: &OccupancyGrid) -> Vec<bool> {
    let (w, h) = (grid.width, grid.height);
    let mut m = vec![false; w * h];
    for row in 0..h {
        let y = h - 1 - row;
        for x in 0..w {
            m[y * w + x] = !grid.occupied(x, row);
        }
    }
    m
}

/// Removes diagonal pinches (two free cells meeting only at a corner) by
/// occupying one of the free cells. Returns the number of cells changed.
pub(crate) fn remove_saddles(free: &mut [bool], w: usize, h: usize) -> usize {
    let mut changed = 0;
    loop {
        let before = changed;
        for y in 0..h.saturating_sub(1) {
            for x in 0..w.saturating_sub(1) {
                let i00 = y * w + x;
                let (i10, i01, i11) = (i00 + 1, i00 + w, i00 + w + 1);
                let (a, b, c, d) = (free[i00], free[i10], free[i01], free[i11]);
                let pick = if a && d && !b && !c {
                    Some((i00, i11))
                } else if b && c && !a && !d {
                    Some((i10, i01))
                } else {
                    None
                };
                if let Some((p, q)) = pick {
                    let deg = |i: usize| free_degree(free, w, h, i);
                    let victim = if deg(p) < deg(q) { p } else { q };
                    free[victim] = false;
                    changed += 1;
                }
            }
        }
        if changed == before {
            return changed;
        }
    }
}

fn free_degree(free: &[bool], w: usize, h: usize, i: usize) -> usize {
    let (x, y) = (i % w, i / w);
    let mut n = 0;
    if x > 0 && free[i - 1] {
        n += 1;
    }
    if x + 1 < w && free[i + 1] {
        n += 1;
    }
    if y > 0 && free[i - w] {
        n += 1;
    }
    if y + 1 < h && free[i + w] {
        n += 1;
    }
    n
}

fn label_components(free: &[bool], w: usize, h: usize) -> (Vec<u32>, Vec<usize>) {
    let mut labels = vec![NO_LABEL; w * h];
    let mut sizes = Vec::new();
    let mut stack = Vec::new();
    for start in 0..w * h {
        if !free[start] || labels[start] != NO_LABEL {
            continue;
        }
        let id = sizes.len() as u32;
        let mut size = 0;
        labels[start] = id;
        stack.push(start);
        while let Some(i) = stack.pop() {
            size += 1;
            let (x, y) = (i % w, i / w);
            let mut visit = |j: usize| {
                if free[j] && labels[j] == NO_LABEL {
                    labels[j] = id;
                    stack.push(j);
                }
            };
            if x > 0 {
                visit(i - 1);
            }
            if x + 1 < w {
                visit(i + 1);
            }
            if y > 0 {
                visit(i - w);
            }
            if y + 1 < h {
                visit(i + w);
            }
        }
        sizes.push(size);
    }
    (labels, sizes)
}

/// Labels free space and traces every boundary loop with free space on the
/// left. Components are numbered in row-major lattice order.
pub(crate) fn trace(grid: &OccupancyGrid) -> (Vec<TracedComponent>, Labels) {
    let (w, h) = (grid.width, grid.height);
    let mut free = free_mask(grid);
    remove_saddles(&mut free, w, h);
    let (labels, sizes) = label_components(&free, w, h);

    let vw = w + 1;
    let vid = |x: usize, y: usize| y * vw + x;
    let mut next = vec![u32::MAX; vw * (h + 1)];
    let mut owner = vec![NO_LABEL; vw * (h + 1)];
    let is_free = |x: i64, y: i64| x >= 0 && y >= 0 && (x as usize) < w && (y as usize) < h && free[y as usize * w + x as usize];

    for y in 0..h {
        for x in 0..w {
            let l = labels[y * w + x];
            if l == NO_LABEL {
                continue;
            }
            let (xi, yi) = (x as i64, y as i64);
            let mut link = |a: usize, b: usize| {
                debug_assert_eq!(next[a], u32::MAX, "lattice vertex with two exits");
                next[a] = b as u32;
                owner[a] = l;
            };
            if !is_free(xi, yi - 1) {
                link(vid(x, y), vid(x + 1, y));
            }
            if !is_free(xi + 1, yi) {
                link(vid(x + 1, y), vid(x + 1, y + 1));
            }
            if !is_free(xi, yi + 1) {
                link(vid(x + 1, y + 1), vid(x, y + 1));
            }
            if !is_free(xi - 1, yi) {
                link(vid(x, y + 1), vid(x, y));
            }
        }
    }

    let mut comps: Vec<TracedComponent> = sizes
        .iter()
        .enumerate()
        .map(|(id, &free_cells)| TracedComponent {
            id,
            outer: Vec::new(),
            holes: Vec::new(),
            free_cells,
        })
        .collect();
    let mut seen = vec![false; next.len()];
    for s in 0..next.len() {
        if next[s] == u32::MAX || seen[s] {
            continue;
        }
        let mut ring = Vec::new();
        let mut v = s;
        while !seen[v] {
            seen[v] = true;
            ring.push(Point2::new((v % vw) as f64, (v / vw) as f64));
            v = next[v] as usize;
        }
        debug_assert_eq!(v, s);
        let ring = drop_collinear(ring);
        let c = &mut comps[owner[s] as usize];
        if signed_area(&ring) > 0.0 {
            debug_assert!(c.outer.is_empty(), "component with two outer loops");
            c.outer = ring;
        } else {
            c.holes.push(ring);
        }
    }
    (
        comps,
        Labels {
            width: w,
            height: h,
            labels,
        },
    )
}

/// Drops lattice points in the middle of straight runs.
fn drop_collinear(ring: Vec<Point2>) -> Vec<Point2> {
    let n = ring.len();
    let keep: Vec<Point2> = (0..n)
        .filter(|&i| {
            let a = ring[(i + n - 1) % n];
            let b = ring[i];
            let c = ring[(i + 1) % n];
            (b - a).cross(c - b) != 0.0
        })
        .map(|i| ring[i])
        .collect();
    keep
}
