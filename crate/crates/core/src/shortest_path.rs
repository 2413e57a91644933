//! Shortest path inside one homotopy class by cyclic descent over the
//! crossing points on the code's cutlines.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::decomposition::DissectionMap;
use crate::geometry::{Point2, PointClass, Polyline, Segment};
use crate::topology::{CdtCode, TopologyGraph};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolveError {
    #[error("start point is not in cell {0}")]
    StartNotInCell(usize),
    #[error("end point is not in cell {0}")]
    EndNotInCell(usize),
    #[error("code steps between non-adjacent cells {0} and {1}")]
    NotAdjacent(usize, usize),
    #[error("invalid solver config: {0}")]
    InvalidConfig(String),
}

/// `None` fields take scale-relative defaults: stop at `1e-6` of the map
/// diagonal, at most `10 m` rounds.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub epsilon_stop: Option<f64>,
    pub max_rounds: Option<usize>,
}

impl SolverConfig {
    pub fn validate(&self) -> Result<(), SolveError> {
        if let Some(e) = self.epsilon_stop {
            if !(e > 0.0 && e.is_finite()) {
                return Err(SolveError::InvalidConfig(format!("epsilon_stop {e}")));
            }
        }
        if self.max_rounds == Some(0) {
            return Err(SolveError::InvalidConfig("max_rounds 0".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassPath {
    pub path: Polyline,
    pub length: f64,
    /// Cutline crossed between consecutive cells of the code.
    pub cutlines: Vec<usize>,
    /// Parameter of each crossing along its cutline.
    pub params: Vec<f64>,
    pub rounds: usize,
    /// Length after initialisation and after every round or polish step.
    pub history: Vec<f64>,
}

impl ClassPath {
    pub fn is_monotone(&self) -> bool {
        self.history
            .windows(2)
            .all(|w| w[1] <= w[0] + 1e-12 * w[0].abs().max(1.0))
    }
}

/// Parameter in `[0, 1]` along `c` minimising `|p - x| + |x - q|`.
pub fn project_param(p: Point2, q: Point2, c: &Segment) -> f64 {
    let u = c.b - c.a;
    let l2 = u.dot(u);
    if l2 == 0.0 {
        return 0.0;
    }
    let param = |x: Point2| (x - c.a).dot(u) / l2;
    let sp = u.cross(p - c.a);
    let mut sq = u.cross(q - c.a);
    let scale = l2.sqrt() * (p - c.a).norm().max((q - c.a).norm()).max(l2.sqrt());
    let flat = 1e-14 * scale;
    if sp.abs() <= flat && sq.abs() <= flat {
        // both on the supporting line: any point between them is optimal
        let (tp, tq) = (param(p), param(q));
        let (lo, hi) = (tp.min(tq).max(0.0), tp.max(tq).min(1.0));
        return if lo <= hi {
            0.5 * (lo + hi)
        } else if tp.max(tq) < 0.0 {
            0.0
        } else {
            1.0
        };
    }
    let mut q2 = q;
    if sp * sq > 0.0 {
        let perp = Point2::new(-u.y, u.x);
        q2 = q - perp * (2.0 * sq / l2);
        sq = -sq;
    }
    let s = sp / (sp - sq);
    param(p + (q2 - p) * s).clamp(0.0, 1.0)
}

pub fn project_on_cutline(p: Point2, q: Point2, c: &Segment) -> Point2 {
    c.at(project_param(p, q, c))
}

fn band_length(xs: Point2, pts: &[Point2], xe: Point2) -> f64 {
    let mut len = 0.0;
    let mut prev = xs;
    for &x in pts.iter().chain(std::iter::once(&xe)) {
        len += prev.dist(x);
        prev = x;
    }
    len
}

/// Shortest path from `xs` to `xe` in the class of `code`.
pub fn shortest_in_class(
    code: &CdtCode,
    xs: Point2,
    xe: Point2,
    dm: &DissectionMap,
    g: &TopologyGraph,
    cfg: &SolverConfig,
) -> Result<ClassPath, SolveError> {
    cfg.validate()?;
    if dm.classify(code.start(), xs) == PointClass::Exterior {
        return Err(SolveError::StartNotInCell(code.start()));
    }
    if dm.classify(code.end(), xe) == PointClass::Exterior {
        return Err(SolveError::EndNotInCell(code.end()));
    }
    let mut cutlines = Vec::with_capacity(code.len().saturating_sub(1));
    for (k, w) in code.nodes().windows(2).enumerate() {
        let e = code.path().edges[k]
            .or_else(|| g.edge_between(w[0], w[1]))
            .ok_or(SolveError::NotAdjacent(w[0], w[1]))?;
        cutlines.push(e);
    }
    let segs: Vec<Segment> = cutlines.iter().map(|&e| dm.cutline(e).segment()).collect();
    let m = segs.len();
    let eps_stop = cfg.epsilon_stop.unwrap_or(1e-6 * dm.bbox().diagonal());
    let max_rounds = cfg.max_rounds.unwrap_or(10 * m.max(1));

    let mut t = vec![0.5; m];
    let mut x: Vec<Point2> = segs.iter().map(|s| s.at(0.5)).collect();
    let mut len = band_length(xs, &x, xe);
    let mut history = vec![len];
    let mut rounds = 0;
    let mut polishes = 0;
    while m > 0 && rounds < max_rounds {
        rounds += 1;
        for k in 0..m {
            let p = if k == 0 { xs } else { x[k - 1] };
            let q = if k + 1 == m { xe } else { x[k + 1] };
            let tk = project_param(p, q, &segs[k]);
            let cand = segs[k].at(tk);
            // exact minimiser, but guard against rounding going uphill
            if p.dist(cand) + cand.dist(q) <= p.dist(x[k]) + x[k].dist(q) {
                t[k] = tk;
                x[k] = cand;
            }
        }
        pull(xs, xe, &segs, &mut t, &mut x);
        let new_len = band_length(xs, &x, xe);
        history.push(new_len);
        let gain = len - new_len;
        len = new_len;
        if gain < eps_stop {
            if polishes < 4 * m + 8 && polish(xs, xe, &segs, &mut t, &mut x, &mut len) {
                polishes += 1;
                history.push(len);
                continue;
            }
            break;
        }
    }
    let mut pts = Vec::with_capacity(m + 2);
    pts.push(xs);
    pts.extend_from_slice(&x);
    pts.push(xe);
    let path = Polyline::from_points_dedup(pts).expect("non-empty");
    let length = path.length();
    Ok(ClassPath {
        path,
        length,
        cutlines,
        params: t,
        rounds,
        history,
    })
}

/// Parameters along `a -> b` and along `s` where the two cross, if they do.
fn crossing(a: Point2, b: Point2, s: &Segment) -> Option<(f64, f64)> {
    let d = b - a;
    let e = s.b - s.a;
    let den = d.cross(e);
    if den.abs() <= 1e-15 * d.norm() * e.norm() {
        return None;
    }
    let w = s.a - a;
    let u = w.cross(e) / den;
    let v = w.cross(d) / den;
    ((0.0..=1.0).contains(&u) && (0.0..=1.0).contains(&v)).then_some((u, v))
}

/// Replaces runs of crossings by a straight chord wherever the chord meets
/// every cutline of the run in order. Never lengthens the band.
fn pull(xs: Point2, xe: Point2, segs: &[Segment], t: &mut [f64], x: &mut [Point2]) {
    let m = segs.len();
    let at = |x: &[Point2], k: usize| if k == 0 { xs } else if k == m + 1 { xe } else { x[k - 1] };
    let mut i = 0;
    let mut hits = Vec::new();
    let mut best = Vec::new();
    while i < m {
        let a = at(x, i);
        best.clear();
        let mut reach = i + 1;
        for j in i + 2..=m + 1 {
            let b = at(x, j);
            hits.clear();
            let mut last = 0.0;
            for s in &segs[i..j - 1] {
                match crossing(a, b, s) {
                    Some((u, v)) if u >= last => {
                        last = u;
                        hits.push(v);
                    }
                    _ => break,
                }
            }
            if hits.len() + 1 < j - i {
                break;
            }
            reach = j;
            std::mem::swap(&mut best, &mut hits);
        }
        if reach > i + 1 {
            let old: f64 = (i..reach).map(|k| at(x, k).dist(at(x, k + 1))).sum();
            let new = a.dist(at(x, reach));
            if new < old {
                for (k, &v) in (i..reach - 1).zip(best.iter()) {
                    t[k] = v;
                    x[k] = segs[k].at(v);
                }
            }
        }
        i = reach.max(i + 1);
    }
}

/// Joint move of a run of coincident crossings off their shared vertex.
/// Single-coordinate updates cannot leave such a corner even when moving
/// the whole run shortens the band.
fn polish(xs: Point2, xe: Point2, segs: &[Segment], t: &mut [f64], x: &mut [Point2], len: &mut f64) -> bool {
    let m = segs.len();
    let mut i = 0;
    let mut best: Option<(f64, Vec<(usize, f64)>)> = None;
    while i < m {
        let mut j = i;
        while j + 1 < m && x[j + 1] == x[i] {
            j += 1;
        }
        if j > i {
            for a in i..=j {
                for b in a + 1..=j {
                    for scale in [0.5, 0.1, 1e-2, 1e-3, 1e-4] {
                        let moved: Vec<(usize, f64)> = (a..=b)
                            .map(|k| {
                                let toward = if t[k] <= 0.5 { 1.0 } else { -1.0 };
                                (k, (t[k] + toward * scale).clamp(0.0, 1.0))
                            })
                            .collect();
                        let mut trial = x.to_vec();
                        for &(k, tk) in &moved {
                            trial[k] = segs[k].at(tk);
                        }
                        let l = band_length(xs, &trial, xe);
                        if l < *len - 1e-12 * len.max(1.0) && best.as_ref().is_none_or(|b| l < b.0) {
                            best = Some((l, moved));
                        }
                    }
                }
            }
        }
        i = j + 1;
    }
    match best {
        Some((l, moved)) => {
            for (k, tk) in moved {
                t[k] = tk;
                x[k] = segs[k].at(tk);
            }
            *len = l;
            true
        }
        None => false,
    }
}
