//! Seeded occupancy-grid generators for the benchmark corpus.

use std::fmt;
use std::str::FromStr;

use cdt_core::geometry::Point2;
use cdt_core::map_ingest::OccupancyGrid;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Archetype {
    Cluttered,
    Trap,
    Maze,
    MazeLoops,
    Floorplan,
}

impl Archetype {
    pub const ALL: [Archetype; 5] = [
        Archetype::Cluttered,
        Archetype::Trap,
        Archetype::Maze,
        Archetype::MazeLoops,
        Archetype::Floorplan,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Archetype::Cluttered => "cluttered",
            Archetype::Trap => "trap",
            Archetype::Maze => "maze",
            Archetype::MazeLoops => "maze-loops",
            Archetype::Floorplan => "floorplan",
        }
    }
}

impl fmt::Display for Archetype {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Archetype {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Archetype::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| format!("unknown archetype {s:?}"))
    }
}

/// Generator parameters. `obstacles` means rectangles for cluttered maps,
/// clutter blocks per side for traps and furniture per room for floorplans.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GenParams {
    pub archetype: Archetype,
    pub width: usize,
    pub height: usize,
    #[serde(default)]
    pub obstacles: usize,
    /// Extra wall openings in mazes.
    #[serde(default)]
    pub loops: usize,
    #[serde(default)]
    pub seed: u64,
}

impl GenParams {
    pub fn new(archetype: Archetype, width: usize, height: usize) -> Self {
        GenParams {
            archetype,
            width,
            height,
            obstacles: 0,
            loops: 0,
            seed: 0,
        }
    }

    pub fn obstacles(mut self, n: usize) -> Self {
        self.obstacles = n;
        self
    }

    pub fn loops(mut self, n: usize) -> Self {
        self.loops = n;
        self
    }

    pub fn seed(mut self, s: u64) -> Self {
        self.seed = s;
        self
    }

    pub fn validate(&self) -> Result<(), String> {
        let min = match self.archetype {
            Archetype::Trap => 160,
            Archetype::Floorplan => 60,
            _ => 16,
        };
        if self.width < min || self.height < min {
            return Err(format!("{} maps need at least {min}x{min} cells", self.archetype));
        }
        Ok(())
    }
}

/// One map per archetype at desk scale.
pub fn corpus() -> Vec<GenParams> {
    vec![
        GenParams::new(Archetype::Cluttered, 200, 200).obstacles(12).seed(1),
        GenParams::new(Archetype::Trap, 400, 400).seed(1),
        GenParams::new(Archetype::Maze, 120, 120).seed(1),
        GenParams::new(Archetype::MazeLoops, 120, 120).loops(4).seed(1),
        GenParams::new(Archetype::Floorplan, 120, 120).obstacles(1).seed(1),
    ]
}

/// Generated grid plus a start and goal that exercise it.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratedMap {
    pub params: GenParams,
    pub grid: OccupancyGrid,
    pub start: Point2,
    pub goal: Point2,
}

/// Boolean raster, row 0 at the bottom so that `(x, y)` indexes map units.
#[derive(Debug, Clone)]
pub struct Raster {
    pub w: usize,
    pub h: usize,
    occ: Vec<bool>,
}

impl Raster {
    pub fn new(w: usize, h: usize, fill: bool) -> Self {
        Raster {
            w,
            h,
            occ: vec![fill; w * h],
        }
    }

    pub fn get(&self, x: usize, y: usize) -> bool {
        self.occ[y * self.w + x]
    }

    /// Sets the clipped rectangle `[x0, x0+w) x [y0, y0+h)`.
    pub fn fill(&mut self, x0: usize, y0: usize, w: usize, h: usize, v: bool) {
        for y in y0.min(self.h)..(y0 + h).min(self.h) {
            for x in x0.min(self.w)..(x0 + w).min(self.w) {
                self.occ[y * self.w + x] = v;
            }
        }
    }

    pub fn border(&mut self, t: usize) {
        let (w, h) = (self.w, self.h);
        self.fill(0, 0, w, t, true);
        self.fill(0, h - t, w, t, true);
        self.fill(0, 0, t, h, true);
        self.fill(w - t, 0, t, h, true);
    }

    pub fn to_grid(&self) -> OccupancyGrid {
        let mut rows = Vec::with_capacity(self.w * self.h);
        for r in 0..self.h {
            let y = self.h - 1 - r;
            rows.extend((0..self.w).map(|x| self.get(x, y)));
        }
        OccupancyGrid::from_occupancy(self.w, self.h, &rows).expect("sized raster")
    }
}

fn centre(x: usize, y: usize) -> Point2 {
    Point2::new(x as f64 + 0.5, y as f64 + 0.5)
}

pub fn generate(p: &GenParams) -> Result<GeneratedMap, String> {
    p.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let (r, start, goal) = match p.archetype {
        Archetype::Cluttered => cluttered(p, &mut rng),
        Archetype::Trap => trap(p, &mut rng),
        Archetype::Maze => maze(p, 0, &mut rng),
        Archetype::MazeLoops => maze(p, p.loops.max(1), &mut rng),
        Archetype::Floorplan => floorplan(p, &mut rng),
    };
    Ok(GeneratedMap {
        params: *p,
        grid: r.to_grid(),
        start: clear_point(&r, start),
        goal: clear_point(&r, goal),
    })
}

/// Nearest pixel centre to `p` with a ring of free pixels around it, so that
/// outline fitting cannot swallow the point.
fn clear_point(r: &Raster, p: Point2) -> Point2 {
    const CLEAR: i64 = 1;
    let (px, py) = (p.x as i64, p.y as i64);
    let ok = |x: i64, y: i64| {
        (x - CLEAR..=x + CLEAR).all(|a| {
            (y - CLEAR..=y + CLEAR).all(|b| {
                a >= 0 && b >= 0 && (a as usize) < r.w && (b as usize) < r.h && !r.get(a as usize, b as usize)
            })
        })
    };
    let reach = r.w.max(r.h) as i64;
    for d in 0..reach {
        let mut best: Option<(i64, i64, i64)> = None;
        for y in py - d..=py + d {
            for x in px - d..=px + d {
                if (x - px).abs().max((y - py).abs()) != d || !ok(x, y) {
                    continue;
                }
                let n = (x - px).pow(2) + (y - py).pow(2);
                if best.is_none_or(|b| n < b.0) {
                    best = Some((n, x, y));
                }
            }
        }
        if let Some((_, x, y)) = best {
            return centre(x as usize, y as usize);
        }
    }
    p
}

/// Disjoint axis-aligned blocks with a free margin around each one, so the
/// obstacle count equals the number of occupied components.
fn cluttered(p: &GenParams, rng: &mut ChaCha8Rng) -> (Raster, Point2, Point2) {
    let (w, h) = (p.width, p.height);
    let mut r = Raster::new(w, h, false);
    let margin = (w.min(h) / 20).max(2);
    let (smin, smax) = ((w.min(h) / 25).max(2), (w.min(h) / 8).max(3));
    let reserved = [(margin, margin), (w - margin - 1, h - margin - 1)];
    let mut placed: Vec<(usize, usize, usize, usize)> = Vec::new();
    let mut tries = 0;
    while placed.len() < p.obstacles && tries < 200 * p.obstacles.max(1) {
        tries += 1;
        let bw = rng.gen_range(smin..=smax);
        let bh = rng.gen_range(smin..=smax);
        if bw + 2 * margin >= w || bh + 2 * margin >= h {
            continue;
        }
        let x0 = rng.gen_range(margin..w - margin - bw);
        let y0 = rng.gen_range(margin..h - margin - bh);
        let clear = |&(x, y, bw2, bh2): &(usize, usize, usize, usize)| {
            x0 + bw + margin <= x || x + bw2 + margin <= x0 || y0 + bh + margin <= y || y + bh2 + margin <= y0
        };
        let covers = reserved
            .iter()
            .any(|&(rx, ry)| rx + margin >= x0 && rx < x0 + bw + margin && ry + margin >= y0 && ry < y0 + bh + margin);
        if covers || !placed.iter().all(clear) {
            continue;
        }
        placed.push((x0, y0, bw, bh));
        r.fill(x0, y0, bw, bh, true);
    }
    (r, centre(reserved[0].0, reserved[0].1), centre(reserved[1].0, reserved[1].1))
}

/// Walled pocket full of small pillars whose only exit leads into a long
/// staircase corridor ending at the goal.
fn trap(p: &GenParams, rng: &mut ChaCha8Rng) -> (Raster, Point2, Point2) {
    let (w, h) = (p.width, p.height);
    let mut r = Raster::new(w, h, true);
    let side = (w.min(h) * 2 / 5).max(60);
    let (px, py) = (2, h - 2 - side);
    r.fill(px, py, side, side, false);
    let per = if p.obstacles == 0 { side / 9 } else { p.obstacles };
    let pitch = (side - 4) / per.max(1);
    for i in 0..per {
        for j in 0..per {
            if (i, j) == (0, per - 1) || (i, j) == (per - 1, 0) {
                continue;
            }
            let (jx, jy) = if pitch > 6 {
                (rng.gen_range(0..pitch - 5), rng.gen_range(0..pitch - 5))
            } else {
                (0, 0)
            };
            r.fill(px + 3 + i * pitch + jx, py + 3 + j * pitch + jy, 3, 3, true);
        }
    }
    // the staircase leaves the pocket's lower right corner
    let (step, cw) = (6, 4);
    let mut x = px + side;
    let mut y = py + 2;
    r.fill(x - 2, y, 3, cw, false);
    let mut last = (x, y);
    while x + step + cw + 2 < w && y >= step + 2 {
        r.fill(x, y, step + cw, cw, false);
        x += step;
        r.fill(x, y - step, cw, step + cw, false);
        y -= step;
        last = (x, y);
    }
    let start = centre(px + 2, py + side - 2);
    (r, start, centre(last.0 + 1, last.1 + 1))
}

/// Recursive-division maze; `loops` extra openings add cycles.
fn maze(p: &GenParams, loops: usize, rng: &mut ChaCha8Rng) -> (Raster, Point2, Point2) {
    let (cell, wall) = (6usize, 2usize);
    let cols = ((p.width - wall) / (cell + wall)).max(2);
    let rows = ((p.height - wall) / (cell + wall)).max(2);
    // open[v][y][x]: passage east (v = 0) or north (v = 1) of cell (x, y)
    let mut east = vec![vec![true; cols]; rows];
    let mut north = vec![vec![true; cols]; rows];
    divide(&mut east, &mut north, 0, 0, cols, rows, rng);
    let mut closed: Vec<(bool, usize, usize)> = Vec::new();
    for y in 0..rows {
        for x in 0..cols {
            if x + 1 < cols && !east[y][x] {
                closed.push((true, x, y));
            }
            if y + 1 < rows && !north[y][x] {
                closed.push((false, x, y));
            }
        }
    }
    closed.shuffle(rng);
    for &(is_east, x, y) in closed.iter().take(if p.archetype == Archetype::Maze { 0 } else { loops }) {
        if is_east {
            east[y][x] = true;
        } else {
            north[y][x] = true;
        }
    }
    let mut r = Raster::new(p.width, p.height, true);
    let at = |i: usize| wall + i * (cell + wall);
    for y in 0..rows {
        for x in 0..cols {
            r.fill(at(x), at(y), cell, cell, false);
            if x + 1 < cols && east[y][x] {
                r.fill(at(x) + cell, at(y), wall, cell, false);
            }
            if y + 1 < rows && north[y][x] {
                r.fill(at(x), at(y) + cell, cell, wall, false);
            }
        }
    }
    let mid = cell / 2;
    (r, centre(at(0) + mid, at(0) + mid), centre(at(cols - 1) + mid, at(rows - 1) + mid))
}

fn divide(
    east: &mut [Vec<bool>],
    north: &mut [Vec<bool>],
    x0: usize,
    y0: usize,
    w: usize,
    h: usize,
    rng: &mut ChaCha8Rng,
) {
    if w < 2 || h < 2 {
        return;
    }
    let horizontal = if w == h { rng.gen_bool(0.5) } else { h > w };
    if horizontal {
        let wy = y0 + rng.gen_range(0..h - 1);
        let gap = x0 + rng.gen_range(0..w);
        for x in x0..x0 + w {
            north[wy][x] = x == gap;
        }
        divide(east, north, x0, y0, w, wy - y0 + 1, rng);
        divide(east, north, x0, wy + 1, w, y0 + h - wy - 1, rng);
    } else {
        let wx = x0 + rng.gen_range(0..w - 1);
        let gap = y0 + rng.gen_range(0..h);
        for row in east.iter_mut().skip(y0).take(h) {
            row[wx] = false;
        }
        east[gap][wx] = true;
        divide(east, north, x0, y0, wx - x0 + 1, h, rng);
        divide(east, north, wx + 1, y0, x0 + w - wx - 1, h, rng);
    }
}

/// 2 x 2 rooms or more, one door in every internal wall, and optional
/// free-standing furniture.
fn floorplan(p: &GenParams, rng: &mut ChaCha8Rng) -> (Raster, Point2, Point2) {
    let (w, h) = (p.width, p.height);
    let wall = (w.min(h) / 50).max(2);
    let cols = (w / 60).clamp(2, 6);
    let rows = (h / 60).clamp(2, 6);
    let mut r = Raster::new(w, h, false);
    r.border(wall);
    let rw = (w - wall) / cols;
    let rh = (h - wall) / rows;
    let door = (rw.min(rh) / 4).max(3);
    for i in 1..cols {
        let x = i * rw;
        r.fill(x, 0, wall, h, true);
    }
    for j in 1..rows {
        let y = j * rh;
        r.fill(0, y, w, wall, true);
    }
    for j in 0..rows {
        for i in 1..cols {
            let y = j * rh + wall + rng.gen_range(1..rh - wall - door);
            r.fill(i * rw, y, wall, door, false);
        }
    }
    for i in 0..cols {
        for j in 1..rows {
            let x = i * rw + wall + rng.gen_range(1..rw - wall - door);
            r.fill(x, j * rh, door, wall, false);
        }
    }
    // furniture stays clear of walls so each piece is a separate obstacle
    let pad = door + 1;
    for j in 0..rows {
        for i in 0..cols {
            let (ix, iy) = (i * rw + wall + pad, j * rh + wall + pad);
            let (iw, ih) = (rw.saturating_sub(wall + 2 * pad), rh.saturating_sub(wall + 2 * pad));
            for _ in 0..p.obstacles {
                if iw < 6 || ih < 6 {
                    break;
                }
                let fw = rng.gen_range(2..=iw / 3);
                let fh = rng.gen_range(2..=ih / 3);
                let fx = ix + rng.gen_range(0..=iw - fw);
                let fy = iy + rng.gen_range(0..=ih - fh);
                r.fill(fx, fy, fw, fh, true);
            }
        }
    }
    let start = centre(wall + 1, wall + 1);
    let goal = centre((cols - 1) * rw + wall + rw / 2, (rows - 1) * rh + wall + rh / 2);
    // nudge endpoints off any furniture
    let free = |p: Point2| !r.get(p.x as usize, p.y as usize);
    let goal = if free(goal) { goal } else { centre(w - wall - 2, h - wall - 2) };
    debug_assert!(free(start));
    (r, start, goal)
}

/// Uniform random free point of a grid, in map units.
pub fn random_free_point<R: Rng>(grid: &OccupancyGrid, rng: &mut R) -> Option<Point2> {
    if grid.free_count() == 0 {
        return None;
    }
    loop {
        let p = Point2::new(
            rng.gen::<f64>() * grid.width as f64 * grid.resolution,
            rng.gen::<f64>() * grid.height as f64 * grid.resolution,
        );
        if !grid.occupied_at(p) {
            return Some(p);
        }
    }
}

/// Occupied 4-connected components that do not touch the grid border.
pub fn interior_obstacles(grid: &OccupancyGrid) -> usize {
    let (w, h) = (grid.width, grid.height);
    let mut seen = vec![false; w * h];
    let mut count = 0;
    let mut stack = Vec::new();
    for start in 0..w * h {
        if seen[start] || !grid.occupied(start % w, start / w) {
            continue;
        }
        let mut touches = false;
        seen[start] = true;
        stack.push(start);
        while let Some(i) = stack.pop() {
            let (c, r) = (i % w, i / w);
            if c == 0 || r == 0 || c == w - 1 || r == h - 1 {
                touches = true;
            }
            let mut nb = Vec::with_capacity(4);
            if c > 0 {
                nb.push(i - 1);
            }
            if c + 1 < w {
                nb.push(i + 1);
            }
            if r > 0 {
                nb.push(i - w);
            }
            if r + 1 < h {
                nb.push(i + w);
            }
            for j in nb {
                if !seen[j] && grid.occupied(j % w, j / w) {
                    seen[j] = true;
                    stack.push(j);
                }
            }
        }
        if !touches {
            count += 1;
        }
    }
    count
}
