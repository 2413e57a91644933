//! Hole elimination by zero-width bridges.

use std::collections::HashMap;

use crate::geometry::{
    orient_with, seg_intersect_with, Aabb, Point2, Segment, SegmentIndex, SegIntersection, Tolerance,
};

use super::IngestError;

/// Strict test that direction `d` leaves vertex `v` into the region on the
/// left of the boundary `p → v → n`.
pub(crate) fn in_cone(p: Point2, v: Point2, n: Point2, d: Point2, tol: Tolerance) -> bool {
    let o = Point2::default();
    let a = n - v;
    let b = p - v;
    if orient_with(o, a, b, tol) > 0 {
        orient_with(o, a, d, tol) > 0 && orient_with(o, d, b, tol) > 0
    } else {
        !(orient_with(o, b, d, tol) >= 0 && orient_with(o, d, a, tol) >= 0)
    }
}

fn leftmost(ring: &[Point2]) -> usize {
    (0..ring.len())
        .min_by(|&a, &b| ring[a].x.total_cmp(&ring[b].x).then(ring[a].y.total_cmp(&ring[b].y)))
        .expect("non-empty ring")
}

/// Merges CW `holes` into the CCW `outer` ring. Returns the keyholed ring and
/// the twin edge pairs `(i, j)` created by the bridges, where edge `k` runs
/// from vertex `k` to vertex `k + 1`.
pub(crate) fn merge(
    outer: &[Point2],
    holes: &[Vec<Point2>],
    tol: Tolerance,
) -> Result<(Vec<Point2>, Vec<(usize, usize)>), IngestError> {
    if holes.is_empty() {
        return Ok((outer.to_vec(), Vec::new()));
    }
    let bbox = Aabb::from_points(outer.iter().chain(holes.iter().flatten())).unwrap();
    let mut segs = Vec::new();
    for ring in std::iter::once(outer).chain(holes.iter().map(|h| h.as_slice())) {
        for i in 0..ring.len() {
            segs.push(Segment {
                a: ring[i],
                b: ring[(i + 1) % ring.len()],
            });
        }
    }
    let mut index = SegmentIndex::from_segments(bbox, segs, tol.eps);

    let mut order: Vec<usize> = (0..holes.len()).collect();
    order.sort_by(|&a, &b| {
        let (pa, pb) = (holes[a][leftmost(&holes[a])], holes[b][leftmost(&holes[b])]);
        pa.x.total_cmp(&pb.x).then(pa.y.total_cmp(&pb.y)).then(a.cmp(&b))
    });

    let mut ring = outer.to_vec();
    let mut cands = Vec::new();
    for &hidx in &order {
        let hole = &holes[hidx];
        let m = hole.len();
        let hi = leftmost(hole);
        let h = hole[hi];
        let (hp, hn) = (hole[(hi + m - 1) % m], hole[(hi + 1) % m]);

        let mut targets: Vec<usize> = (0..ring.len()).collect();
        targets.sort_by(|&a, &b| h.dist(ring[a]).total_cmp(&h.dist(ring[b])).then(a.cmp(&b)));
        let n = ring.len();
        let found = targets.into_iter().find(|&j| {
            let v = ring[j];
            let d = v - h;
            if v == h
                || !in_cone(hp, h, hn, d, tol)
                || !in_cone(ring[(j + n - 1) % n], v, ring[(j + 1) % n], -d, tol)
            {
                return false;
            }
            let bridge = Segment { a: h, b: v };
            index.candidates(&bridge, &mut cands);
            cands.iter().all(|&c| match seg_intersect_with(&bridge, index.segment(c), tol) {
                SegIntersection::None => true,
                SegIntersection::Touch(p) => p == h || p == v,
                _ => false,
            })
        });
        let j = found.ok_or(IngestError::NoBridge { hole: hidx })?;
        let v = ring[j];
        let mut merged = Vec::with_capacity(n + m + 2);
        merged.extend_from_slice(&ring[..=j]);
        merged.extend((0..=m).map(|k| hole[(hi + k) % m]));
        merged.extend_from_slice(&ring[j..]);
        ring = merged;
        index.insert(Segment { a: h, b: v });
    }
    let bridges = twin_edges(&ring);
    Ok((ring, bridges))
}

fn key(p: Point2) -> (u64, u64) {
    (p.x.to_bits(), p.y.to_bits())
}

pub(crate) fn twin_edges(ring: &[Point2]) -> Vec<(usize, usize)> {
    let n = ring.len();
    let mut by_edge: HashMap<((u64, u64), (u64, u64)), usize> = HashMap::new();
    for i in 0..n {
        by_edge.insert((key(ring[i]), key(ring[(i + 1) % n])), i);
    }
    let mut out = Vec::new();
    for i in 0..n {
        if let Some(&j) = by_edge.get(&(key(ring[(i + 1) % n]), key(ring[i]))) {
            if i < j {
                out.push((i, j));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::signed_area;

    fn p(x: f64, y: f64) -> Point2 {
        Point2::new(x, y)
    }

    #[test]
    fn square_with_square_hole() {
        let outer = vec![p(0., 0.), p(10., 0.), p(10., 10.), p(0., 10.)];
        let hole = vec![p(4., 4.), p(4., 6.), p(6., 6.), p(6., 4.)];
        let (ring, bridges) = merge(&outer, &[hole], Tolerance::from_diagonal(14.2)).unwrap();
        assert_eq!(ring.len(), 10);
        assert_eq!(bridges.len(), 1);
        assert_eq!(signed_area(&ring), 100.0 - 4.0);
        let (i, j) = bridges[0];
        assert_eq!(ring[i], ring[(j + 1) % 10]);
    }

    #[test]
    fn cone_test() {
        let tol = Tolerance::from_diagonal(1.0);
        // convex corner at origin with interior in the first quadrant
        let (pr, v, nx) = (p(0., 1.), p(0., 0.), p(1., 0.));
        assert!(in_cone(pr, v, nx, p(1., 1.), tol));
        assert!(!in_cone(pr, v, nx, p(-1., 1.), tol));
        assert!(!in_cone(pr, v, nx, p(1., 0.), tol));
        // reversed traversal: interior is everything but the first quadrant
        assert!(in_cone(nx, v, pr, p(-1., 1.), tol));
        assert!(!in_cone(nx, v, pr, p(1., 1.), tol));
    }
}
