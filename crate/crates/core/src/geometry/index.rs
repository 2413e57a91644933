use super::{Aabb, Point2, Segment};

/// Uniform bucket grid over segments. Queries return every segment whose
/// buckets overlap the buckets swept by the query, so callers still run the
/// exact predicate on the candidates.
#[derive(Debug, Clone)]
pub struct SegmentIndex {
    origin: Point2,
    cell: f64,
    cols: usize,
    rows: usize,
    buckets: Vec<Vec<u32>>,
    segs: Vec<Segment>,
    pad: f64,
}

impl SegmentIndex {
    /// Index sized for roughly `expected` segments spread over `bbox`.
    pub fn new(bbox: Aabb, expected: usize, pad: f64) -> Self {
        let w = bbox.width().max(1e-12);
        let h = bbox.height().max(1e-12);
        let target = (expected.max(1) as f64).clamp(1.0, 1.0e6);
        let cell = ((w * h) / target).sqrt().max(w.max(h) / 2048.0);
        let cols = ((w / cell).ceil() as usize).max(1);
        let rows = ((h / cell).ceil() as usize).max(1);
        SegmentIndex {
            origin: bbox.min,
            cell,
            cols,
            rows,
            buckets: vec![Vec::new(); cols * rows],
            segs: Vec::new(),
            pad,
        }
    }

    pub fn from_segments(bbox: Aabb, segs: impl IntoIterator<Item = Segment>, pad: f64) -> Self {
        let segs: Vec<Segment> = segs.into_iter().collect();
        let mut idx = SegmentIndex::new(bbox, segs.len(), pad);
        for s in segs {
            idx.insert(s);
        }
        idx
    }

    pub fn len(&self) -> usize {
        self.segs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.segs.is_empty()
    }

    pub fn segment(&self, id: usize) -> &Segment {
        &self.segs[id]
    }

    pub fn insert(&mut self, s: Segment) -> usize {
        let id = self.segs.len();
        self.segs.push(s);
        let (cols, buckets) = (self.cols, &mut self.buckets);
        sweep(self.origin, self.cell, self.cols, self.rows, self.pad, &s, |c, r| {
            buckets[r * cols + c].push(id as u32);
        });
        id
    }

    /// Ids of segments possibly touching `s`, sorted and deduplicated.
    pub fn candidates(&self, s: &Segment, out: &mut Vec<usize>) {
        out.clear();
        sweep(self.origin, self.cell, self.cols, self.rows, self.pad, s, |c, r| {
            out.extend(self.buckets[r * self.cols + c].iter().map(|&i| i as usize));
        });
        out.sort_unstable();
        out.dedup();
    }

    /// Ids of segments whose buckets intersect the square of half-width `r`
    /// around `p`.
    pub fn candidates_near(&self, p: Point2, r: f64, out: &mut Vec<usize>) {
        out.clear();
        let (c0, c1) = self.span(p.x - r - self.pad, p.x + r + self.pad, self.origin.x, self.cols);
        let (r0, r1) = self.span(p.y - r - self.pad, p.y + r + self.pad, self.origin.y, self.rows);
        for row in r0..=r1 {
            for col in c0..=c1 {
                out.extend(self.buckets[row * self.cols + col].iter().map(|&i| i as usize));
            }
        }
        out.sort_unstable();
        out.dedup();
    }

    fn span(&self, lo: f64, hi: f64, o: f64, n: usize) -> (usize, usize) {
        (
            bucket_of(lo, o, self.cell, n),
            bucket_of(hi, o, self.cell, n),
        )
    }
}

fn bucket_of(v: f64, o: f64, cell: f64, n: usize) -> usize {
    let k = ((v - o) / cell).floor();
    if k <= 0.0 {
        0
    } else {
        (k as usize).min(n - 1)
    }
}

/// Visits each bucket that the segment, thickened by `pad`, passes through.
fn sweep(
    o: Point2,
    cell: f64,
    cols: usize,
    rows: usize,
    pad: f64,
    s: &Segment,
    mut f: impl FnMut(usize, usize),
) {
    let (xa, xb) = (s.a.x.min(s.b.x), s.a.x.max(s.b.x));
    let c0 = bucket_of(xa - pad, o.x, cell, cols);
    let c1 = bucket_of(xb + pad, o.x, cell, cols);
    let dx = s.b.x - s.a.x;
    for c in c0..=c1 {
        // x-slab of this column clipped to the segment
        // the outermost columns also own everything beyond the grid
        let sl = if c == 0 { xa } else { (o.x + c as f64 * cell).max(xa) };
        let sr = if c + 1 == cols { xb } else { (o.x + (c + 1) as f64 * cell).min(xb) };
        let (ylo, yhi) = if dx.abs() < 1e-300 || sl > sr {
            (s.a.y.min(s.b.y), s.a.y.max(s.b.y))
        } else {
            let y1 = s.a.y + (sl - s.a.x) / dx * (s.b.y - s.a.y);
            let y2 = s.a.y + (sr - s.a.x) / dx * (s.b.y - s.a.y);
            (y1.min(y2), y1.max(y2))
        };
        let r0 = bucket_of(ylo - pad, o.y, cell, rows);
        let r1 = bucket_of(yhi + pad, o.y, cell, rows);
        for r in r0..=r1 {
            f(c, r);
        }
    }
}
