use super::{GeometryError, Point2, Segment, Tolerance};

/// Sign of the turn a→b→c: +1 left, −1 right, 0 when `c` lies within the
/// tolerance of the line through `a` and `b` (or `a == b`).
pub fn orient(a: Point2, b: Point2, c: Point2) -> i8 {
    orient_with(a, b, c, Tolerance::for_points([&a, &b, &c]))
}

pub fn orient_with(a: Point2, b: Point2, c: Point2, tol: Tolerance) -> i8 {
    let ab = b - a;
    let len = ab.norm();
    if len == 0.0 {
        return 0;
    }
    let d = ab.cross(c - a) / len;
    if d > tol.eps {
        1
    } else if d < -tol.eps {
        -1
    } else {
        0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SegIntersection {
    /// Interiors cross at a single point.
    Proper(Point2),
    /// Segments meet at a single point that is an endpoint of at least one.
    Touch(Point2),
    /// Collinear with a shared stretch of positive length; carries its midpoint.
    Overlap(Point2),
    None,
}

impl SegIntersection {
    pub fn is_none(&self) -> bool {
        matches!(self, SegIntersection::None)
    }
}

pub fn seg_intersect(s: &Segment, t: &Segment) -> SegIntersection {
    seg_intersect_with(s, t, Tolerance::for_points([&s.a, &s.b, &t.a, &t.b]))
}

pub fn seg_intersect_with(s: &Segment, t: &Segment, tol: Tolerance) -> SegIntersection {
    let eps = tol.eps;
    // cheap reject on bounding boxes
    if s.a.x.max(s.b.x) < t.a.x.min(t.b.x) - eps
        || t.a.x.max(t.b.x) < s.a.x.min(s.b.x) - eps
        || s.a.y.max(s.b.y) < t.a.y.min(t.b.y) - eps
        || t.a.y.max(t.b.y) < s.a.y.min(s.b.y) - eps
    {
        return SegIntersection::None;
    }
    let o1 = orient_with(s.a, s.b, t.a, tol);
    let o2 = orient_with(s.a, s.b, t.b, tol);
    let o3 = orient_with(t.a, t.b, s.a, tol);
    let o4 = orient_with(t.a, t.b, s.b, tol);

    if o1 == 0 && o2 == 0 {
        return collinear_case(s, t, eps);
    }
    if o1 * o2 < 0 && o3 * o4 < 0 {
        let d = s.b - s.a;
        let e = t.b - t.a;
        let den = d.cross(e);
        let u = (t.a - s.a).cross(e) / den;
        return SegIntersection::Proper(s.at(u.clamp(0.0, 1.0)));
    }
    let on = |p: Point2, seg: &Segment| within_box(p, seg, eps);
    if o1 == 0 && on(t.a, s) {
        return SegIntersection::Touch(t.a);
    }
    if o2 == 0 && on(t.b, s) {
        return SegIntersection::Touch(t.b);
    }
    if o3 == 0 && on(s.a, t) {
        return SegIntersection::Touch(s.a);
    }
    if o4 == 0 && on(s.b, t) {
        return SegIntersection::Touch(s.b);
    }
    SegIntersection::None
}

fn within_box(p: Point2, seg: &Segment, eps: f64) -> bool {
    p.x >= seg.a.x.min(seg.b.x) - eps
        && p.x <= seg.a.x.max(seg.b.x) + eps
        && p.y >= seg.a.y.min(seg.b.y) - eps
        && p.y <= seg.a.y.max(seg.b.y) + eps
}

fn collinear_case(s: &Segment, t: &Segment, eps: f64) -> SegIntersection {
    let d = s.b - s.a;
    let len = d.norm();
    let dir = d * (1.0 / len);
    // positions along s, in length units
    let ta = (t.a - s.a).dot(dir);
    let tb = (t.b - s.a).dot(dir);
    let lo = ta.min(tb).max(0.0);
    let hi = ta.max(tb).min(len);
    if hi - lo > eps {
        SegIntersection::Overlap(s.a + dir * ((lo + hi) * 0.5))
    } else if hi - lo >= -eps {
        let m = (lo + hi) * 0.5;
        // snap to whichever endpoint is meant
        let cands = [s.a, s.b, t.a, t.b];
        let p = s.a + dir * m;
        let best = cands
            .into_iter()
            .min_by(|x, y| x.dist(p).total_cmp(&y.dist(p)))
            .unwrap();
        SegIntersection::Touch(best)
    } else {
        SegIntersection::None
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PointClass {
    Interior,
    Boundary,
    Exterior,
}

/// Classifies `p` against a convex counter-clockwise polygon, validating
/// convexity first.
pub fn point_in_convex(poly: &[Point2], p: Point2) -> Result<PointClass, GeometryError> {
    let tol = Tolerance::for_points(poly.iter().chain(std::iter::once(&p)));
    if !is_convex_ccw(poly, tol) {
        return Err(GeometryError::NotConvex);
    }
    Ok(point_in_convex_with(poly, p, tol))
}

/// Same as [`point_in_convex`] without the convexity check.
pub fn point_in_convex_with(poly: &[Point2], p: Point2, tol: Tolerance) -> PointClass {
    let n = poly.len();
    let mut on_edge = false;
    for i in 0..n {
        let a = poly[i];
        let b = poly[(i + 1) % n];
        match orient_with(a, b, p, tol) {
            -1 => return PointClass::Exterior,
            0 => on_edge = true,
            _ => {}
        }
    }
    if on_edge {
        PointClass::Boundary
    } else {
        PointClass::Interior
    }
}

pub(crate) fn is_convex_ccw(poly: &[Point2], tol: Tolerance) -> bool {
    let n = poly.len();
    if n < 3 || super::signed_area(poly) <= 0.0 {
        return false;
    }
    (0..n).all(|i| orient_with(poly[(i + n - 1) % n], poly[i], poly[(i + 1) % n], tol) >= 0)
}

/// Even-odd test for a simple polygon given as a closed ring. Points on the
/// boundary may be classified either way.
pub fn point_in_polygon(ring: &[Point2], p: Point2) -> bool {
    let n = ring.len();
    let mut inside = false;
    let mut j = n - 1;
    for i in 0..n {
        let (a, b) = (ring[i], ring[j]);
        if (a.y > p.y) != (b.y > p.y) {
            let x = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
            if p.x < x {
                inside = !inside;
            }
        }
        j = i;
    }
    inside
}

pub fn point_segment_distance(p: Point2, s: &Segment) -> f64 {
    let d = s.b - s.a;
    let l2 = d.dot(d);
    if l2 == 0.0 {
        return p.dist(s.a);
    }
    let t = ((p - s.a).dot(d) / l2).clamp(0.0, 1.0);
    p.dist(s.at(t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(x: f64, y: f64) -> Point2 {
        Point2::new(x, y)
    }

    fn seg(a: (f64, f64), b: (f64, f64)) -> Segment {
        Segment::new(p(a.0, a.1), p(b.0, b.1)).unwrap()
    }

    #[test]
    fn orient_signs() {
        assert_eq!(orient(p(0., 0.), p(1., 0.), p(0., 1.)), 1);
        assert_eq!(orient(p(0., 0.), p(1., 0.), p(0., -1.)), -1);
        assert_eq!(orient(p(0., 0.), p(1., 0.), p(5., 0.)), 0);
        assert_eq!(orient(p(0., 0.), p(1., 0.), p(0.5, 1e-12)), 0);
        assert_eq!(orient(p(1., 1.), p(1., 1.), p(3., 0.)), 0);
    }

    #[test]
    fn intersection_classes() {
        let s = seg((0., 0.), (2., 2.));
        match seg_intersect(&s, &seg((0., 2.), (2., 0.))) {
            SegIntersection::Proper(q) => assert!(q.dist(p(1., 1.)) < 1e-12),
            other => panic!("{other:?}"),
        }
        assert_eq!(
            seg_intersect(&seg((0., 0.), (1., 0.)), &seg((1., 0.), (1., 1.))),
            SegIntersection::Touch(p(1., 0.))
        );
        // T-junction: endpoint of one on the interior of the other
        assert_eq!(
            seg_intersect(&seg((0., 0.), (2., 0.)), &seg((1., 0.), (1., 1.))),
            SegIntersection::Touch(p(1., 0.))
        );
        match seg_intersect(&seg((0., 0.), (2., 0.)), &seg((1., 0.), (3., 0.))) {
            SegIntersection::Overlap(m) => assert!(m.dist(p(1.5, 0.)) < 1e-12),
            other => panic!("{other:?}"),
        }
        assert_eq!(
            seg_intersect(&seg((0., 0.), (1., 0.)), &seg((1., 0.), (2., 0.))),
            SegIntersection::Touch(p(1., 0.))
        );
        assert!(seg_intersect(&seg((0., 0.), (1., 0.)), &seg((2., 0.), (3., 0.))).is_none());
        assert!(seg_intersect(&seg((0., 0.), (1., 0.)), &seg((0., 1.), (1., 1.))).is_none());
    }

    #[test]
    fn convex_classification() {
        let sq = [p(0., 0.), p(1., 0.), p(1., 1.), p(0., 1.)];
        assert_eq!(point_in_convex(&sq, p(0.5, 0.5)), Ok(PointClass::Interior));
        assert_eq!(point_in_convex(&sq, p(1.0, 0.5)), Ok(PointClass::Boundary));
        assert_eq!(point_in_convex(&sq, p(0.0, 0.0)), Ok(PointClass::Boundary));
        assert_eq!(point_in_convex(&sq, p(1.5, 0.5)), Ok(PointClass::Exterior));
        let l = [p(0., 0.), p(2., 0.), p(2., 1.), p(1., 1.), p(1., 2.), p(0., 2.)];
        assert_eq!(point_in_convex(&l, p(0.5, 0.5)), Err(GeometryError::NotConvex));
        let mut cw = sq;
        cw.reverse();
        assert_eq!(point_in_convex(&cw, p(0.5, 0.5)), Err(GeometryError::NotConvex));
    }

    #[test]
    fn polygon_parity() {
        let l = [p(0., 0.), p(2., 0.), p(2., 1.), p(1., 1.), p(1., 2.), p(0., 2.)];
        assert!(point_in_polygon(&l, p(0.5, 1.5)));
        assert!(!point_in_polygon(&l, p(1.5, 1.5)));
    }

    fn coord() -> impl Strategy<Value = f64> {
        -50.0..50.0f64
    }

    fn pt() -> impl Strategy<Value = Point2> {
        (coord(), coord()).prop_map(|(x, y)| Point2::new(x, y))
    }

    proptest! {
        #[test]
        fn orient_antisymmetric(a in pt(), b in pt(), c in pt()) {
            prop_assert_eq!(orient(a, b, c), -orient(b, a, c));
            prop_assert_eq!(orient(a, b, c), orient(b, c, a));
        }

        #[test]
        fn intersection_symmetric(a in pt(), b in pt(), c in pt(), d in pt()) {
            prop_assume!(a != b && c != d);
            let s = Segment::new(a, b).unwrap();
            let t = Segment::new(c, d).unwrap();
            let st = seg_intersect(&s, &t);
            let ts = seg_intersect(&t, &s);
            let kind = |x: &SegIntersection| std::mem::discriminant(x);
            prop_assert_eq!(kind(&st), kind(&ts));
            if let (SegIntersection::Proper(x), SegIntersection::Proper(y)) = (st, ts) {
                prop_assert!(x.dist(y) < 1e-6);
            }
        }

        #[test]
        fn proper_point_lies_on_both(a in pt(), b in pt(), c in pt(), d in pt()) {
            prop_assume!(a != b && c != d);
            let s = Segment::new(a, b).unwrap();
            let t = Segment::new(c, d).unwrap();
            if let SegIntersection::Proper(x) = seg_intersect(&s, &t) {
                prop_assert!(point_segment_distance(x, &s) < 1e-6);
                prop_assert!(point_segment_distance(x, &t) < 1e-6);
            }
        }

        #[test]
        fn convex_hull_interior(cx in coord(), cy in coord(), r in 0.5..20.0f64, n in 3usize..12,
                                 u in 0.0..0.9f64, th in 0.0..std::f64::consts::TAU) {
            let c = Point2::new(cx, cy);
            let poly: Vec<Point2> = (0..n)
                .map(|i| c + Point2::new(r, 0.0).rotate(std::f64::consts::TAU * i as f64 / n as f64))
                .collect();
            // inscribed radius bounds the interior probe
            let inr = r * (std::f64::consts::PI / n as f64).cos();
            let q = c + Point2::new(u * inr, 0.0).rotate(th);
            prop_assert_eq!(point_in_convex(&poly, q), Ok(PointClass::Interior));
            let far = c + Point2::new(r * 1.01 + 1e-3, 0.0).rotate(th);
            prop_assert_eq!(point_in_convex(&poly, far), Ok(PointClass::Exterior));
        }
    }
}
