//! Closed-loop Douglas–Peucker with conservative and simplicity repairs.
//!
//! A simplified loop is represented by the sorted indices of the ring
//! vertices it keeps, so repairs can always re-split an edge at one of the
//! original vertices it skipped.

use crate::geometry::{
    point_segment_distance, seg_intersect_with, Aabb, Point2, Segment, SegmentIndex, SegIntersection, Tolerance,
};

use super::trace::Labels;
use super::IngestError;

/// Douglas–Peucker on a closed ring (no repeated last vertex). The ring is
/// split at its lowest-leftmost vertex and the vertex farthest from it.
pub(crate) fn dp_closed(ring: &[Point2], eps: f64) -> Vec<usize> {
    let n = ring.len();
    if n <= 3 {
        return (0..n).collect();
    }
    let s = (0..n)
        .min_by(|&a, &b| {
            let (p, q) = (ring[a], ring[b]);
            p.x.total_cmp(&q.x).then(p.y.total_cmp(&q.y))
        })
        .unwrap();
    let f = (0..n)
        .max_by(|&a, &b| ring[s].dist(ring[a]).total_cmp(&ring[s].dist(ring[b])).then(b.cmp(&a)))
        .unwrap();
    // walk offsets from s so the recursion sees a straight index range
    let off_f = (f + n - s) % n;
    let mut keep = vec![false; n];
    keep[0] = true;
    keep[off_f] = true;
    let at = |k: usize| ring[(s + k) % n];
    let mut stack = vec![(0usize, off_f), (off_f, n)];
    while let Some((a, b)) = stack.pop() {
        if b <= a + 1 {
            continue;
        }
        let seg = Segment {
            a: at(a),
            b: at(b),
        };
        let (mut best, mut dmax) = (a, -1.0);
        for k in a + 1..b {
            let d = point_segment_distance(at(k), &seg);
            if d > dmax {
                dmax = d;
                best = k;
            }
        }
        if dmax > eps {
            keep[best] = true;
            stack.push((a, best));
            stack.push((best, b));
        }
    }
    let mut out: Vec<usize> = (0..n).filter(|&k| keep[k]).map(|k| (s + k) % n).collect();
    out.sort_unstable();
    out
}

/// Original vertex strictly between kept positions `k` and `k+1` (cyclic)
/// that lies farthest from the simplified edge, if any.
pub(crate) fn worst_between(ring: &[Point2], kept: &[usize], k: usize) -> Option<(usize, f64)> {
    let n = ring.len();
    let a = kept[k];
    let b = kept[(k + 1) % kept.len()];
    let seg = Segment {
        a: ring[a],
        b: ring[b],
    };
    let mut i = (a + 1) % n;
    let mut best: Option<(usize, f64)> = None;
    while i != b {
        let d = point_segment_distance(ring[i], &seg);
        if best.is_none_or(|(_, bd)| d > bd) {
            best = Some((i, d));
        }
        i = (i + 1) % n;
    }
    best
}

fn insert_sorted(kept: &mut Vec<usize>, v: usize) {
    if let Err(pos) = kept.binary_search(&v) {
        kept.insert(pos, v);
    }
}

/// Grows `kept` until it has three vertices spanning positive area.
pub(crate) fn ensure_three(ring: &[Point2], kept: &mut Vec<usize>) -> Result<(), IngestError> {
    let mut distinct = ring.to_vec();
    distinct.dedup();
    if distinct.len() < 3 || crate::geometry::signed_area(ring) == 0.0 {
        return Err(IngestError::DegenerateLoop);
    }
    while kept.len() < 3 {
        let k = kept.len() - 1;
        let cand = if kept.len() == 1 {
            let p = ring[kept[0]];
            (0..ring.len())
                .filter(|i| *i != kept[0])
                .max_by(|&a, &b| p.dist(ring[a]).total_cmp(&p.dist(ring[b])))
                .map(|i| (i, 0.0))
        } else {
            // of the two arcs, split the one with the farther vertex
            let x = worst_between(ring, kept, 0);
            let y = worst_between(ring, kept, k);
            match (x, y) {
                (Some(x), Some(y)) => Some(if y.1 > x.1 { y } else { x }),
                (x, y) => x.or(y),
            }
        };
        let (i, _) = cand.ok_or(IngestError::DegenerateLoop)?;
        insert_sorted(kept, i);
    }
    Ok(())
}

/// True when the lattice segment `p → q` only passes through cells of
/// component `comp` (axis-aligned segments on grid lines need the cell on
/// their left).
pub(crate) fn edge_in_component(p: Point2, q: Point2, labels: &Labels, comp: u32) -> bool {
    let inside = |x: i64, y: i64| labels.get(x, y) == Some(comp);
    if p.x == q.x {
        let x = p.x as i64;
        let col = if q.y > p.y { x - 1 } else { x };
        let (y0, y1) = (p.y.min(q.y) as i64, p.y.max(q.y) as i64);
        return (y0..y1).all(|y| inside(col, y));
    }
    if p.y == q.y {
        let y = p.y as i64;
        let row = if q.x > p.x { y } else { y - 1 };
        let (x0, x1) = (p.x.min(q.x) as i64, p.x.max(q.x) as i64);
        return (x0..x1).all(|x| inside(x, row));
    }
    let d = q - p;
    let mut ts = vec![0.0, 1.0];
    let (xl, xh) = (p.x.min(q.x) as i64, p.x.max(q.x) as i64);
    ts.extend((xl + 1..xh).map(|x| (x as f64 - p.x) / d.x));
    let (yl, yh) = (p.y.min(q.y) as i64, p.y.max(q.y) as i64);
    ts.extend((yl + 1..yh).map(|y| (y as f64 - p.y) / d.y));
    ts.sort_by(f64::total_cmp);
    ts.windows(2).filter(|w| w[1] - w[0] > 1e-12).all(|w| {
        let m = p + d * ((w[0] + w[1]) * 0.5);
        inside(m.x.floor() as i64, m.y.floor() as i64)
    })
}

/// Re-splits kept edges that leave the component until none do.
pub(crate) fn fix_conservative(ring: &[Point2], kept: &mut Vec<usize>, labels: &Labels, comp: u32) {
    loop {
        let mut splits = Vec::new();
        for k in 0..kept.len() {
            let a = ring[kept[k]];
            let b = ring[kept[(k + 1) % kept.len()]];
            if !edge_in_component(a, b, labels, comp) {
                if let Some((i, _)) = worst_between(ring, kept, k) {
                    splits.push(i);
                }
            }
        }
        if splits.is_empty() {
            return;
        }
        for i in splits {
            insert_sorted(kept, i);
        }
    }
}

/// Re-splits edges until no two edges of any loop in the set intersect
/// (other than consecutive edges meeting at their shared vertex).
pub(crate) fn fix_simplicity(rings: &[Vec<Point2>], kept: &mut [Vec<usize>]) {
    let all = rings.iter().flatten();
    let Some(bbox) = Aabb::from_points(all) else { return };
    let tol = Tolerance::from_diagonal(bbox.diagonal());
    loop {
        // (loop, position) of every edge
        let mut owners = Vec::new();
        let mut segs = Vec::new();
        for (l, kp) in kept.iter().enumerate() {
            for k in 0..kp.len() {
                let a = rings[l][kp[k]];
                let b = rings[l][kp[(k + 1) % kp.len()]];
                owners.push((l, k));
                segs.push(Segment { a, b });
            }
        }
        let index = SegmentIndex::from_segments(bbox, segs.iter().copied(), tol.eps);
        let mut bad = vec![false; segs.len()];
        let mut cands = Vec::new();
        for i in 0..segs.len() {
            index.candidates(&segs[i], &mut cands);
            for &j in cands.iter().filter(|&&j| j > i) {
                let (li, ki) = owners[i];
                let (lj, kj) = owners[j];
                let n = kept[li].len();
                let hit = seg_intersect_with(&segs[i], &segs[j], tol);
                let ok = match hit {
                    SegIntersection::None => true,
                    SegIntersection::Touch(p) if li == lj && n > 2 => {
                        let adjacent = (ki + 1) % n == kj || (kj + 1) % n == ki;
                        adjacent && (p == segs[i].a || p == segs[i].b)
                    }
                    _ => false,
                };
                if !ok {
                    bad[i] = true;
                    bad[j] = true;
                }
            }
        }
        let mut changed = false;
        let mut splits: Vec<(usize, usize)> = Vec::new();
        for (e, &(l, k)) in owners.iter().enumerate() {
            if bad[e] {
                if let Some((i, _)) = worst_between(&rings[l], &kept[l], k) {
                    splits.push((l, i));
                }
            }
        }
        for (l, i) in splits {
            let before = kept[l].len();
            insert_sorted(&mut kept[l], i);
            changed |= kept[l].len() != before;
        }
        if !changed {
            return;
        }
    }
}
