//! Baseline RRT* on the raw occupancy grid.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use cdt_core::geometry::{Point2, Polyline};
use cdt_core::map_ingest::OccupancyGrid;
use cdt_core::planner::{Task, Termination};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RrtOptions {
    pub goal_bias: f64,
    /// Steering step as a fraction of the map diagonal.
    pub step_fraction: f64,
    pub stop_on_first_solution: bool,
    pub time_budget: Option<Duration>,
}

impl Default for RrtOptions {
    fn default() -> Self {
        RrtOptions {
            goal_bias: 0.05,
            step_fraction: 0.05,
            stop_on_first_solution: false,
            time_budget: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RrtResult {
    pub path: Option<Polyline>,
    pub length: Option<f64>,
    pub t_init_us: Option<u64>,
    pub history: Vec<(u64, f64)>,
    pub iterations: usize,
    pub termination: Termination,
    pub tree_nodes: usize,
    pub elapsed_us: u64,
}

impl RrtResult {
    pub fn time_within(&self, c_opt: f64, factor: f64) -> Option<u64> {
        self.history
            .iter()
            .find(|&&(_, l)| l <= factor * c_opt * (1.0 + 1e-12))
            .map(|&(t, _)| t)
    }
}

/// Whether the open segment `a -> b` crosses only free pixels, walking the
/// pixels it passes through in order.
pub fn segment_free(grid: &OccupancyGrid, a: Point2, b: Point2) -> bool {
    let res = grid.resolution;
    let (ax, ay) = (a.x / res, a.y / res);
    let (bx, by) = (b.x / res, b.y / res);
    let (w, h) = (grid.width as i64, grid.height as i64);
    let cell = |x: f64, y: f64| (x.floor() as i64, y.floor() as i64);
    let (mut cx, mut cy) = cell(ax, ay);
    let (ex, ey) = cell(bx, by);
    let blocked = |cx: i64, cy: i64| {
        cx < 0 || cy < 0 || cx >= w || cy >= h || grid.occupied(cx as usize, (h - 1 - cy) as usize)
    };
    if blocked(cx, cy) {
        return false;
    }
    let (dx, dy) = (bx - ax, by - ay);
    let step_x = if dx > 0.0 { 1 } else { -1 };
    let step_y = if dy > 0.0 { 1 } else { -1 };
    let t_delta_x = if dx != 0.0 { 1.0 / dx.abs() } else { f64::INFINITY };
    let t_delta_y = if dy != 0.0 { 1.0 / dy.abs() } else { f64::INFINITY };
    let next = |c: i64, s: i64, p: f64, d: f64| {
        if d == 0.0 {
            f64::INFINITY
        } else {
            let edge = if s > 0 { (c + 1) as f64 } else { c as f64 };
            (edge - p) / d
        }
    };
    let mut t_max_x = next(cx, step_x, ax, dx);
    let mut t_max_y = next(cy, step_y, ay, dy);
    while (cx, cy) != (ex, ey) {
        if t_max_x.min(t_max_y) > 1.0 {
            break;
        }
        if t_max_x < t_max_y {
            cx += step_x;
            t_max_x += t_delta_x;
        } else if t_max_y < t_max_x {
            cy += step_y;
            t_max_y += t_delta_y;
        } else {
            // through a pixel corner: both side pixels must be free
            if blocked(cx + step_x, cy) || blocked(cx, cy + step_y) {
                return false;
            }
            cx += step_x;
            cy += step_y;
            t_max_x += t_delta_x;
            t_max_y += t_delta_y;
        }
        if blocked(cx, cy) {
            return false;
        }
    }
    true
}

/// Uniform bucket grid over node positions.
struct Buckets {
    size: f64,
    cols: usize,
    rows: usize,
    cells: Vec<Vec<u32>>,
}

impl Buckets {
    fn new(extent: Point2, size: f64) -> Self {
        let cols = ((extent.x / size).ceil() as usize).max(1);
        let rows = ((extent.y / size).ceil() as usize).max(1);
        Buckets {
            size,
            cols,
            rows,
            cells: vec![Vec::new(); cols * rows],
        }
    }

    fn key(&self, p: Point2) -> (usize, usize) {
        let c = ((p.x / self.size).max(0.0) as usize).min(self.cols - 1);
        let r = ((p.y / self.size).max(0.0) as usize).min(self.rows - 1);
        (c, r)
    }

    fn insert(&mut self, p: Point2, id: u32) {
        let (c, r) = self.key(p);
        self.cells[r * self.cols + c].push(id);
    }

    fn ring(&self, c: usize, r: usize, d: usize, mut f: impl FnMut(u32)) {
        let (c, r, d) = (c as i64, r as i64, d as i64);
        for y in r - d..=r + d {
            for x in c - d..=c + d {
                if (x - c).abs().max((y - r).abs()) != d || x < 0 || y < 0 {
                    continue;
                }
                let (x, y) = (x as usize, y as usize);
                if x >= self.cols || y >= self.rows {
                    continue;
                }
                self.cells[y * self.cols + x].iter().for_each(|&i| f(i));
            }
        }
    }

    fn nearest(&self, p: Point2, pts: &[Point2]) -> usize {
        let (c, r) = self.key(p);
        let mut best = (f64::INFINITY, 0usize);
        for d in 0..self.cols.max(self.rows) {
            self.ring(c, r, d, |i| {
                let v = pts[i as usize].dist(p);
                if v < best.0 || (v == best.0 && (i as usize) < best.1) {
                    best = (v, i as usize);
                }
            });
            // every unvisited bucket is at least `d * size` away
            if best.0 <= d as f64 * self.size {
                break;
            }
        }
        best.1
    }

    fn within(&self, p: Point2, radius: f64, pts: &[Point2], out: &mut Vec<usize>) {
        out.clear();
        let (c, r) = self.key(p);
        let reach = (radius / self.size).ceil() as usize;
        for d in 0..=reach {
            self.ring(c, r, d, |i| {
                if pts[i as usize].dist(p) <= radius {
                    out.push(i as usize);
                }
            });
        }
        out.sort_unstable();
    }
}

fn sample_free(grid: &OccupancyGrid, rng: &mut ChaCha8Rng) -> Point2 {
    let ext = grid.extent().max;
    loop {
        let p = Point2::new(rng.gen::<f64>() * ext.x, rng.gen::<f64>() * ext.y);
        if !grid.occupied_at(p) {
            return p;
        }
    }
}

pub fn rrt_star(task: &Task, grid: &OccupancyGrid, opts: &RrtOptions) -> RrtResult {
    let start = Instant::now();
    let elapsed = || start.elapsed().as_micros() as u64;
    let mut rng = ChaCha8Rng::seed_from_u64(task.seed);
    let ext = grid.extent().max;
    let diag = (ext.x * ext.x + ext.y * ext.y).sqrt();
    let step = opts.step_fraction * diag;
    let free_area = grid.free_count() as f64 * grid.resolution * grid.resolution;
    // radius constant of the asymptotically optimal schedule in the plane
    let gamma = 2.0 * (1.5 * free_area / PI).sqrt();

    let (xs, xg) = (task.x_init, task.x_goal);
    let mut pts = vec![xs];
    let mut parent = vec![u32::MAX];
    let mut cost = vec![0.0];
    let mut children: Vec<Vec<u32>> = vec![Vec::new()];
    let mut buckets = Buckets::new(ext, step.max(grid.resolution));
    buckets.insert(xs, 0);
    // nodes with a free straight edge to the goal, and that edge's length
    let mut to_goal: Vec<(usize, f64)> = Vec::new();
    if !grid.occupied_at(xs) && !grid.occupied_at(xg) && segment_free(grid, xs, xg) {
        to_goal.push((0, xs.dist(xg)));
    }
    let mut best: Option<(f64, usize)> = None;
    let mut history = Vec::new();
    let mut t_init = None;
    let mut near = Vec::new();
    let mut termination = Termination::IterationsExhausted;
    let mut iterations = 0;

    let mut update_best = |to_goal: &[(usize, f64)], cost: &[f64], best: &mut Option<(f64, usize)>| {
        let cand = to_goal
            .iter()
            .map(|&(i, d)| (cost[i] + d, i))
            .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        if let Some(c) = cand {
            if best.is_none_or(|b| c.0 < b.0 - 1e-12 * b.0.max(1.0)) {
                let t = elapsed();
                if t_init.is_none() {
                    t_init = Some(t);
                }
                history.push((t, c.0));
                *best = Some(c);
            } else if best.is_some_and(|b| c.0 < b.0) {
                *best = Some(c);
            }
        }
    };
    update_best(&to_goal, &cost, &mut best);

    if !to_goal.is_empty() && best.is_some() {
        // the straight segment is optimal
        termination = Termination::FirstSolution;
    } else {
        while iterations < task.iterations {
            if opts.time_budget.is_some_and(|b| start.elapsed() >= b) {
                termination = Termination::TimeBudget;
                break;
            }
            iterations += 1;
            let x_rand = if rng.gen::<f64>() < opts.goal_bias { xg } else { sample_free(grid, &mut rng) };
            let i_near = buckets.nearest(x_rand, &pts);
            let d = pts[i_near].dist(x_rand);
            let x_new = if d <= step { x_rand } else { pts[i_near].lerp(x_rand, step / d) };
            if grid.occupied_at(x_new) || !segment_free(grid, pts[i_near], x_new) {
                continue;
            }
            let n = pts.len() as f64 + 1.0;
            let radius = (gamma * (n.ln() / n).sqrt()).min(step);
            buckets.within(x_new, radius, &pts, &mut near);
            let mut p_best = i_near;
            let mut c_best = cost[i_near] + pts[i_near].dist(x_new);
            for &j in &near {
                let c = cost[j] + pts[j].dist(x_new);
                if c < c_best && j != i_near && segment_free(grid, pts[j], x_new) {
                    p_best = j;
                    c_best = c;
                }
            }
            let id = pts.len();
            pts.push(x_new);
            parent.push(p_best as u32);
            cost.push(c_best);
            children.push(Vec::new());
            children[p_best].push(id as u32);
            buckets.insert(x_new, id as u32);
            if x_new.dist(xg) <= step && segment_free(grid, x_new, xg) {
                to_goal.push((id, x_new.dist(xg)));
            }
            for &j in &near {
                if j == p_best {
                    continue;
                }
                let c = c_best + x_new.dist(pts[j]);
                if c < cost[j] - 1e-12 * cost[j].max(1.0) && segment_free(grid, x_new, pts[j]) {
                    let old = parent[j] as usize;
                    children[old].retain(|&k| k as usize != j);
                    children[id].push(j as u32);
                    parent[j] = id as u32;
                    let delta = c - cost[j];
                    let mut stack = vec![j];
                    while let Some(k) = stack.pop() {
                        cost[k] += delta;
                        stack.extend(children[k].iter().map(|&q| q as usize));
                    }
                }
            }
            update_best(&to_goal, &cost, &mut best);
            if opts.stop_on_first_solution && best.is_some() {
                termination = Termination::FirstSolution;
                break;
            }
        }
    }

    let path = best.map(|(_, i)| {
        let mut p = vec![xg];
        let mut k = i;
        while k != u32::MAX as usize {
            p.push(pts[k]);
            k = parent[k] as usize;
        }
        p.reverse();
        Polyline::from_points_dedup(p).expect("non-empty")
    });
    RrtResult {
        length: path.as_ref().map(|p| p.length()),
        path,
        t_init_us: t_init,
        history,
        iterations,
        termination,
        tree_nodes: pts.len(),
        elapsed_us: elapsed(),
    }
}
